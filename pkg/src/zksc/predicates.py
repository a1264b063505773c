"""Exactness and coincidence of values, environments and streams.

Each predicate is parameterized by a visibility test on qualified types:
``in_domain(d)`` for the local view of ``d`` and ``IN_CIRCUIT`` for the
circuit view.
"""

from __future__ import annotations

from typing import Callable

from .runtime import TOP, UNIT, OutStreams, value_eq
from .types import BoolType, Domain, ListType, QualType, Stage, UIntType

Visibility = Callable[[QualType], bool]


def in_domain(d: Domain) -> Visibility:
    return lambda q: q.domain <= d


def IN_CIRCUIT(q: QualType) -> bool:
    return q.stage is Stage.POST or q.domain is Domain.PUBLIC


def inhabits(v, t) -> bool:
    if isinstance(t, UIntType):
        return type(v) is int and v >= 0 and (t.modulus is None or v < t.modulus)
    if isinstance(t, BoolType):
        return type(v) is bool
    return v is UNIT


def exposed(q: QualType, v, P: Visibility) -> bool:
    if not P(q):
        return True
    if isinstance(q.data, ListType):
        return isinstance(v, tuple) and all(exposed(q.data.elem, x, P) for x in v)
    return inhabits(v, q.data)


def exact(q: QualType, v, P: Visibility) -> bool:
    if not P(q):
        return v is TOP
    if isinstance(q.data, ListType):
        return isinstance(v, tuple) and all(exact(q.data.elem, x, P) for x in v)
    return inhabits(v, q.data)


def coincident(q: QualType, v, w, P: Visibility) -> bool:
    if not P(q):
        return True
    if isinstance(q.data, ListType):
        return (
            isinstance(v, tuple)
            and isinstance(w, tuple)
            and len(v) == len(w)
            and all(coincident(q.data.elem, x, y, P) for x, y in zip(v, w))
        )
    return inhabits(v, q.data) and value_eq(v, w)


def _same_vars(gamma_types, *envs) -> bool:
    names = [b.name for b in gamma_types]
    return all([n for n, _ in env] == names for env in envs)


def env_exact(gamma_types, env, P: Visibility) -> bool:
    return _same_vars(gamma_types, env) and all(
        exact(b.type, v, P) for b, (_, v) in zip(gamma_types, env)
    )


def env_coincident(gamma_types, env1, env2, P: Visibility) -> bool:
    return _same_vars(gamma_types, env1, env2) and all(
        coincident(b.type, v, w, P) for b, (_, v), (_, w) in zip(gamma_types, env1, env2)
    )


def streams_exact(out: OutStreams, d: Domain) -> bool:
    for dd in (Domain.PROVER, Domain.VERIFIER):
        for v in out.of(dd):
            if dd <= d:
                if v is TOP or not (type(v) is bool or (type(v) is int and v >= 0)):
                    return False
            elif v is not TOP:
                return False
    return True


def streams_coincident(o1: OutStreams, o2: OutStreams, d: Domain) -> bool:
    for dd in (Domain.PROVER, Domain.VERIFIER):
        a, b = o1.of(dd), o2.of(dd)
        if len(a) != len(b):
            return False
        if dd <= d and not value_eq(a, b):
            return False
    return True
