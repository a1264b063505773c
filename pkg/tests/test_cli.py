import json
import shutil

import pytest

from zksc.circuit import deserialize, stats
from zksc.cli import main

from helpers import main_of

NOT_MUTABLE = main_of("let x = 1;\nx = 2")
TRIVIAL = "fn main() -> () $pre @public { assert(wire { true }) }\n"


@pytest.fixture
def work(tmp_path, monkeypatch, factor_paths):
    for name, path in factor_paths.items():
        shutil.copy(path, tmp_path / ("factor.zksc" if name == "program" else f"{name}.json"))
    monkeypatch.chdir(tmp_path)
    return tmp_path


def factor_args(*extra):
    return ["factor.zksc", "--public", "public.json", "--instance", "instance.json", "--witness", "witness.json", *extra]


def test_check(work, capsys):
    assert main(["check", "factor.zksc"]) == 0
    (work / "nm.zksc").write_text(NOT_MUTABLE)
    assert main(["check", "nm.zksc"]) == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert err == ["nm.zksc:3:1: error[NotMutable]: variable 'x' is not mutable"]
    assert main(["check", "missing.zksc"]) == 2


def test_check_syntax_error(work, capsys):
    (work / "bad.zksc").write_text("fn main() {")
    assert main(["check", "bad.zksc"]) == 1
    assert "error[SyntaxError]" in capsys.readouterr().err


def test_fmt_is_idempotent(work, capsys):
    assert main(["fmt", "factor.zksc"]) == 0
    once = capsys.readouterr().out
    (work / "f2.zksc").write_text(once)
    assert main(["fmt", "f2.zksc"]) == 0
    assert capsys.readouterr().out == once


def test_compile(work, capsys):
    assert main(["compile", *factor_args()]) == 0
    line = capsys.readouterr().out.strip()
    circuit = deserialize((work / "factor.circuit").read_text())
    assert line == str(stats(circuit))
    assert stats(circuit).nonlinear > 0
    manifest = json.loads((work / "factor.circuit.manifest.json").read_text())
    assert len(manifest) == circuit.inputs_prover + circuit.inputs_verifier
    assert {"domain", "index", "file", "line"} <= set(manifest[0])


def test_compile_trivial(work, capsys):
    (work / "t.zksc").write_text(TRIVIAL)
    assert main(["compile", "t.zksc", "-o", "t.out"]) == 0
    assert len(deserialize((work / "t.out").read_text()).outputs) == 1


def test_compile_is_deterministic(work):
    main(["compile", *factor_args("-o", "a.circuit")])
    main(["compile", *factor_args("-o", "b.circuit")])
    assert (work / "a.circuit").read_bytes() == (work / "b.circuit").read_bytes()


def test_compile_bad_public(work):
    (work / "bad.json").write_text("{oops")
    assert main(["compile", "factor.zksc", "--public", "bad.json"]) == 2
    (work / "neg.json").write_text('{"fbw": -1}')
    assert main(["compile", "factor.zksc", "--public", "neg.json"]) == 2
    (work / "wrong.json").write_text('{"fbw": true}')
    assert main(["compile", "factor.zksc", "--public", "wrong.json"]) == 2
    assert main(["compile", "factor.zksc"]) == 2


def test_run_prover(work):
    assert main(["run", *factor_args("--role", "prover")]) == 0
    prover = json.loads((work / "prover.stream").read_text())
    verifier = json.loads((work / "verifier.stream").read_text())
    assert prover[:2] == [11, 13] and verifier == [143]
    assert all(isinstance(v, int) for v in prover)


def test_run_verifier_without_witness(work):
    (work / "witness.json").unlink()
    args = ["run", "factor.zksc", "--public", "public.json", "--instance", "instance.json", "--role", "verifier"]
    assert main(args) == 0
    assert json.loads((work / "verifier.stream").read_text()) == [143]
    assert not (work / "prover.stream").exists()


def test_run_wrong_witness(work, capsys):
    (work / "witness.json").write_text('{"x": 12}')
    assert main(["run", *factor_args()]) == 1
    assert "factor.zksc:9:5: error[AssertionFailed]" in capsys.readouterr().err


def test_run_streams_deterministic(work):
    main(["run", *factor_args()])
    first = (work / "prover.stream").read_bytes()
    main(["run", *factor_args()])
    assert (work / "prover.stream").read_bytes() == first


def test_prove(work, capsys):
    assert main(["prove", *factor_args()]) == 0
    assert capsys.readouterr().out.strip() == "ACCEPT"
    assert main(["prove", *factor_args("--tamper", "prover:0:+1")]) == 1
    assert capsys.readouterr().out.strip() == "REJECT"
    assert main(["prove", *factor_args("--tamper", "verifier:0:1")]) == 1
    assert main(["prove", *factor_args("--tamper", "prover:99:1")]) == 2
    assert main(["prove", *factor_args("--tamper", "public:0:1")]) == 2


def test_prove_trivial(work, capsys):
    (work / "t.zksc").write_text(TRIVIAL)
    assert main(["prove", "t.zksc"]) == 0
    assert capsys.readouterr().out.strip() == "ACCEPT"


def test_modulus_flag(work, capsys):
    (work / "t.zksc").write_text(TRIVIAL)
    assert main(["prove", "t.zksc", "--modulus", "97"]) == 0
    assert main(["check", "t.zksc", "--modulus", "10"]) == 0
    assert "not prime" in capsys.readouterr().err
    assert main(["check", "t.zksc", "--modulus", "1"]) == 2


def test_conformance_subcommand(work, capsys):
    assert main(["conformance", "--trials", "5", "--junit", "out.xml"]) == 0
    assert "failures=0" in capsys.readouterr().out
    assert (work / "out.xml").read_text().startswith("<testsuite")
