import pytest

from helpers import FACTOR_DIR, typed
from zksc.runtime import Inputs, load_input_file


@pytest.fixture(scope="session")
def factor_paths():
    return {
        "program": str(FACTOR_DIR / "factor.zksc"),
        "public": str(FACTOR_DIR / "public.json"),
        "instance": str(FACTOR_DIR / "instance.json"),
        "witness": str(FACTOR_DIR / "witness.json"),
    }


@pytest.fixture(scope="session")
def factor_source(factor_paths):
    with open(factor_paths["program"]) as fh:
        return fh.read()


@pytest.fixture(scope="session")
def factor_tp(factor_source):
    return typed(factor_source)


@pytest.fixture(scope="session")
def factor_inputs(factor_paths):
    return Inputs(
        load_input_file(factor_paths["public"]),
        load_input_file(factor_paths["instance"]),
        load_input_file(factor_paths["witness"]),
    )
