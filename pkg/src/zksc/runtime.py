"""Runtime values, environments, inputs and output streams.

A value is either ``TOP`` (unknown in the current view) or a known value:
``int`` for naturals, ``bool``, ``UNIT``, or a ``tuple`` of values for a
list.  Known values are stored bare rather than wrapped.  Because Python
treats ``True == 1``, comparisons go through :func:`value_eq`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, NamedTuple, Optional

from .types import Domain


class _Top:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "TOP"

    def __reduce__(self):
        return (_Top, ())


class _Unit:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNIT"

    def __reduce__(self):
        return (_Unit, ())


TOP = _Top()
UNIT = _Unit()


class IndexOutOfBounds(Exception):
    pass


class InputError(Exception):
    """Malformed or missing program inputs."""


def is_known(v) -> bool:
    return v is not TOP


def value_eq(a, b) -> bool:
    """Structural equality that keeps booleans apart from naturals."""
    if type(a) is not type(b):
        return False
    if isinstance(a, tuple):
        return len(a) == len(b) and all(value_eq(x, y) for x, y in zip(a, b))
    return a == b


def allpure(v):
    """Lift a core value (lists possibly given as Python lists) to a value."""
    if isinstance(v, (list, tuple)):
        return tuple(allpure(x) for x in v)
    return v


def encode(v) -> int:
    """Field encoding of a scalar: ``true -> 0``, ``false -> 1``."""
    if type(v) is bool:
        return 0 if v else 1
    return v


def decode_bool(n: int) -> Optional[bool]:
    return {0: True, 1: False}.get(n)


def upd(a, indices, v):
    """Replace the element of ``a`` at the path ``indices`` with ``v``."""
    if not indices:
        return v
    if a is TOP:
        return TOP
    i = indices[0]
    if i is TOP:
        return TOP
    if i >= len(a):
        raise IndexOutOfBounds(f"index {i} out of bounds for list of length {len(a)}")
    return a[:i] + (upd(a[i], indices[1:], v),) + a[i + 1:]


# Environments are tuples of (name, value) with the innermost binding last.

Env = tuple


def env_lookup(env: Env, name: str):
    for n, v in reversed(env):
        if n == name:
            return v
    raise KeyError(name)


def env_push(env: Env, name: str, v) -> Env:
    return env + ((name, v),)


def env_tail(env: Env) -> Env:
    return env[:-1]


def env_update(env: Env, name: str, v) -> Env:
    for k in range(len(env) - 1, -1, -1):
        if env[k][0] == name:
            return env[:k] + ((name, v),) + env[k + 1:]
    raise KeyError(name)


class OutStreams(NamedTuple):
    """Values wired in the prover and verifier domains, in order."""

    prover: tuple = ()
    verifier: tuple = ()

    def of(self, d: Domain) -> tuple:
        return self.verifier if d is Domain.VERIFIER else self.prover

    def append(self, d: Domain, v) -> "OutStreams":
        if d is Domain.PROVER:
            return OutStreams(self.prover + (v,), self.verifier)
        return OutStreams(self.prover, self.verifier + (v,))

    def __add__(self, other: "OutStreams") -> "OutStreams":  # type: ignore[override]
        return OutStreams(self.prover + other.prover, self.verifier + other.verifier)

    @property
    def empty(self) -> bool:
        return not self.prover and not self.verifier


@dataclass(frozen=True)
class Inputs:
    """The three input dictionaries, one per domain."""

    public: dict = field(default_factory=dict)
    verifier: dict = field(default_factory=dict)
    prover: dict = field(default_factory=dict)

    def of(self, d: Domain) -> dict:
        return (self.public, self.verifier, self.prover)[d]

    def replace(self, d: Domain, values: dict) -> "Inputs":
        parts = [self.public, self.verifier, self.prover]
        parts[d] = values
        return Inputs(*parts)

    def to_json(self) -> dict:
        return {d.name.lower(): {k: to_json_value(v) for k, v in self.of(d).items()} for d in Domain}


def to_json_value(v) -> Any:
    if v is UNIT:
        return None
    if isinstance(v, (tuple, list)):
        return [to_json_value(x) for x in v]
    return v


def from_json_value(v, where: str = "input") -> Any:
    if v is None:
        return UNIT
    if isinstance(v, bool):
        return v
    if isinstance(v, int):
        if v < 0:
            raise InputError(f"{where}: negative number {v}")
        return v
    if isinstance(v, list):
        return tuple(from_json_value(x, where) for x in v)
    raise InputError(f"{where}: unsupported value {v!r}")


def load_input_file(path) -> dict:
    """Read a JSON object of input values."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    return {k: from_json_value(v, f"{path}: {k!r}") for k, v in data.items()}
