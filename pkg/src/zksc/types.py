"""Qualified types and the stage/domain/effect lattices."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Optional, Union


class Domain(IntEnum):
    """Domains ordered by growing privacy: ``public <= verifier <= prover``."""

    PUBLIC = 0
    VERIFIER = 1
    PROVER = 2

    def __str__(self) -> str:
        return "@" + self.name.lower()


class Stage(IntEnum):
    """Stages ordered as ``post <= pre``."""

    POST = 0
    PRE = 1

    def __str__(self) -> str:
        return "$" + self.name.lower()


class Effect(IntEnum):
    """An upward-closed set of domains.

    Only four such sets exist and they form a chain under inclusion, so the
    integer order is set inclusion and ``|`` (``max``) is union.
    """

    EMPTY = 0
    UP_PROVER = 1
    UP_VERIFIER = 2
    UP_PUBLIC = 3

    def __or__(self, other: "Effect") -> "Effect":  # type: ignore[override]
        return Effect(max(int(self), int(other)))

    def __contains__(self, d: Domain) -> bool:
        return 3 - int(d) <= int(self)

    def __str__(self) -> str:
        if self is Effect.EMPTY:
            return "{}"
        return "<" + str(Domain(3 - int(self))) + ">"


def up(d: Domain) -> Effect:
    """The set of ``d`` and every domain above it."""
    return Effect(3 - int(d))


def stage_effect(s: Stage) -> Effect:
    """Circuit construction is a public effect; local computation is not."""
    return Effect.EMPTY if s is Stage.PRE else Effect.UP_PUBLIC


Modulus = Union[int, str, None]


@dataclass(frozen=True)
class UnitType:
    def __str__(self) -> str:
        return "()"


@dataclass(frozen=True)
class UIntType:
    modulus: Modulus = None

    @property
    def bounded(self) -> bool:
        return self.modulus is not None

    def __str__(self) -> str:
        return "uint" if self.modulus is None else f"uint[{self.modulus}]"


@dataclass(frozen=True)
class BoolType:
    modulus: Modulus = None

    @property
    def bounded(self) -> bool:
        return self.modulus is not None

    def __str__(self) -> str:
        return "bool" if self.modulus is None else f"bool[{self.modulus}]"


@dataclass(frozen=True)
class ListType:
    elem: "QualType"

    def __str__(self) -> str:
        return f"list[{self.elem}]"


DataType = Union[UnitType, UIntType, BoolType, ListType]


@dataclass(frozen=True)
class QualType:
    """A (data type, stage, domain) triple.

    ``stage`` is ``None`` when it was omitted in source and has not been
    inferred yet.
    """

    data: DataType
    stage: Optional[Stage]
    domain: Domain

    def __str__(self) -> str:
        parts = [str(self.data)]
        if self.stage is not None:
            parts.append(str(self.stage))
        parts.append(str(self.domain))
        return " ".join(parts)

    def with_stage(self, s: Stage) -> "QualType":
        return QualType(self.data, s, self.domain)

    def with_domain(self, d: Domain) -> "QualType":
        return QualType(self.data, self.stage, d)


def is_primitive(t: DataType) -> bool:
    return not isinstance(t, ListType)


def is_bounded_scalar(t: DataType) -> bool:
    return isinstance(t, (UIntType, BoolType)) and t.bounded


def type_effect(t: DataType) -> Effect:
    if isinstance(t, ListType):
        q = t.elem
        return type_effect(q.data) | stage_effect(q.stage) | up(q.domain)
    return Effect.EMPTY


def well_structured(q: QualType) -> bool:
    t = q.data
    if isinstance(t, ListType):
        inner = t.elem
        return (
            q.stage is Stage.PRE
            and up(q.domain) >= stage_effect(inner.stage) | up(inner.domain)
            and well_structured(inner)
        )
    if isinstance(t, UnitType):
        return q.stage is Stage.PRE
    return True


def well_formed(q: QualType) -> bool:
    """Well-structured, and unbounded scalars appear only in stage pre."""
    if not well_structured(q):
        return False
    t = q.data
    if isinstance(t, (UIntType, BoolType)) and not t.bounded:
        return q.stage is Stage.PRE
    if isinstance(t, ListType):
        return well_formed(t.elem)
    return True


def allpre(d: Domain, q: QualType) -> bool:
    """Every qualifier occurring in ``q`` is ``$pre`` and ``d``."""
    if q.stage is not Stage.PRE or q.domain is not d:
        return False
    if isinstance(q.data, ListType):
        return allpre(d, q.data.elem)
    return True


def map_modulus(q: QualType, fn) -> QualType:
    """Rewrite every modulus in ``q`` (including nested ones) with ``fn``."""
    t = q.data
    if isinstance(t, UIntType):
        t = UIntType(fn(t.modulus)) if t.bounded else t
    elif isinstance(t, BoolType):
        t = BoolType(fn(t.modulus)) if t.bounded else t
    elif isinstance(t, ListType):
        t = ListType(map_modulus(t.elem, fn))
    return QualType(t, q.stage, q.domain)


def modulus_of(t: DataType) -> Optional[int]:
    if isinstance(t, (UIntType, BoolType)) and isinstance(t.modulus, int):
        return t.modulus
    return None
