"""Abstract syntax for the monomorphic core.

Every expression node carries a source position and, once typechecked, its
qualified type and effect.  None of those three participate in equality, so
two trees compare equal when they have the same shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

from .types import Domain, Effect, QualType, Stage


class Pos(NamedTuple):
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


def _meta(default=None):
    return field(default=default, compare=False, repr=False, kw_only=True)


@dataclass
class Expr:
    pos: Optional[Pos] = _meta()
    ty: Optional[QualType] = _meta()
    eff: Optional[Effect] = _meta()


@dataclass
class UnitLit(Expr):
    pass


@dataclass
class NatLit(Expr):
    value: int


@dataclass
class BoolLit(Expr):
    value: bool


@dataclass
class Var(Expr):
    name: str


ARITH_OPS = ("+", "-", "*", "/", "%")
COMPARE_OPS = ("==", "<", "<=")
LOGIC_OPS = ("&&", "||")
BINARY_OPS = ARITH_OPS + COMPARE_OPS + LOGIC_OPS
PRE_ONLY_OPS = frozenset(("/", "%") + COMPARE_OPS + LOGIC_OPS)


@dataclass
class BinOp(Expr):
    op: str
    lhs: Expr
    rhs: Expr


@dataclass
class Assert(Expr):
    arg: Expr


@dataclass
class AssertZero(Expr):
    arg: Expr


@dataclass
class Get(Expr):
    """``get_public`` / ``get_instance`` / ``get_witness`` reading ``key``."""

    domain: Domain
    key: str
    annotation: Optional[QualType] = None


@dataclass
class If(Expr):
    guard: Expr
    then: Expr
    orelse: Expr


@dataclass
class For(Expr):
    var: str
    lo: Expr
    hi: Expr
    body: Expr


@dataclass
class Wire(Expr):
    body: Expr


CastTarget = Union[QualType, Stage, Domain]


@dataclass
class Cast(Expr):
    body: Expr
    target: CastTarget


@dataclass
class Load(Expr):
    """``lvalue[index]`` where ``lvalue`` is a variable or another load."""

    lvalue: Expr
    index: Expr


@dataclass
class Assign(Expr):
    lvalue: Expr
    rhs: Expr


@dataclass
class Let(Expr):
    mutable: bool
    var: str
    annotation: Optional[QualType]
    bound: Expr
    rest: Expr


@dataclass
class Seq(Expr):
    first: Expr
    rest: Expr


@dataclass
class Call(Expr):
    name: str
    args: tuple


@dataclass
class Param:
    name: str
    type: QualType
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


@dataclass
class FunDef:
    name: str
    params: tuple
    return_type: Optional[QualType]
    body: Expr
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


@dataclass
class Program:
    functions: tuple

    @property
    def main(self) -> FunDef:
        for f in self.functions:
            if f.name == "main":
                return f
        raise LookupError("program has no main function")


def is_lvalue(e: Expr) -> bool:
    if isinstance(e, Var):
        return True
    return isinstance(e, Load) and is_lvalue(e.lvalue)


def lvalue_root(e: Expr) -> Var:
    while isinstance(e, Load):
        e = e.lvalue
    if not isinstance(e, Var):
        raise TypeError(f"not an lvalue: {e!r}")
    return e


def lvalue_indices(e: Expr) -> list:
    """Index expressions of an lvalue, outermost list first."""
    out = []
    while isinstance(e, Load):
        out.append(e.index)
        e = e.lvalue
    out.reverse()
    return out


def children(e: Expr) -> tuple:
    if isinstance(e, BinOp):
        return (e.lhs, e.rhs)
    if isinstance(e, (Assert, AssertZero)):
        return (e.arg,)
    if isinstance(e, If):
        return (e.guard, e.then, e.orelse)
    if isinstance(e, For):
        return (e.lo, e.hi, e.body)
    if isinstance(e, (Wire, Cast)):
        return (e.body,)
    if isinstance(e, Load):
        return (e.lvalue, e.index)
    if isinstance(e, Assign):
        return (e.lvalue, e.rhs)
    if isinstance(e, Let):
        return (e.bound, e.rest)
    if isinstance(e, Seq):
        return (e.first, e.rest)
    if isinstance(e, Call):
        return tuple(e.args)
    return ()


def walk(e: Expr):
    """Pre-order traversal."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def size(e: Expr) -> int:
    return sum(1 for _ in walk(e))
