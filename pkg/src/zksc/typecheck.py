"""Type-and-effect checking.

Checking is bidirectional only in a weak sense: an optional *hint* flows
down from annotations, assignments and sibling operands.  Literals and
unannotated ``get_*`` calls take their type from the hint; every other rule
synthesizes its type and verifies its own side conditions, so the hint never
changes what is accepted beyond fixing literal types.

The checker returns annotated copies of the input tree with ``ty`` and
``eff`` filled in and every symbolic modulus ``N`` replaced by its value.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

from . import ast as A
from .ast import Pos
from .types import (
    BoolType,
    DataType,
    Domain,
    Effect,
    ListType,
    QualType,
    Stage,
    UIntType,
    UnitType,
    allpre,
    map_modulus,
    stage_effect,
    type_effect,
    up,
    well_formed,
)

CODES = (
    "UnknownVariable",
    "StageMismatch",
    "DomainMismatch",
    "TypeMismatch",
    "IllFormedType",
    "NoReadUp",
    "NoWriteDown",
    "NotMutable",
    "MalformedGetAnnotation",
    "UnsupportedConstruct",
)


class TypeCheckError(Exception):
    def __init__(self, code: str, message: str, pos: Optional[Pos]):
        assert code in CODES, code
        super().__init__(f"{pos}: error[{code}]: {message}" if pos else f"error[{code}]: {message}")
        self.code = code
        self.message = message
        self.pos = pos

    def format(self, filename: str = "<input>") -> str:
        line, col = self.pos if self.pos else (0, 0)
        return f"{filename}:{line}:{col}: error[{self.code}]: {self.message}"


class TypeCheckErrors(Exception):
    """Every error found in a program, one per failing function."""

    def __init__(self, errors: list[TypeCheckError]):
        super().__init__("\n".join(str(e) for e in errors))
        self.errors = errors


class Binding(NamedTuple):
    name: str
    type: QualType
    mutable: bool


TypeEnv = tuple  # of Binding, innermost last


def lookup(env: TypeEnv, name: str) -> Optional[Binding]:
    for b in reversed(env):
        if b.name == name:
            return b
    return None


UNIT_TYPE = QualType(UnitType(), Stage.PRE, Domain.PUBLIC)
INDEX_DATA = UIntType(None)


@dataclass(frozen=True)
class TypedProgram:
    program: A.Program
    main: A.FunDef
    modulus: int

    @property
    def body(self) -> A.Expr:
        return self.main.body


def _describe_mismatch(expected: QualType, actual: QualType) -> str:
    if expected.data != actual.data:
        return "TypeMismatch"
    if expected.stage != actual.stage:
        return "StageMismatch"
    return "DomainMismatch"


def _first_difference(expected: QualType, actual: QualType) -> str:
    """Error code naming the outermost component where two types differ."""
    if type(expected.data) is not type(actual.data):
        return "TypeMismatch"
    if isinstance(expected.data, ListType) and expected.data != actual.data:
        return _first_difference(expected.data.elem, actual.data.elem)
    return _describe_mismatch(expected, actual)


def _matches(pattern: QualType, actual: QualType) -> bool:
    """Equality where an omitted stage in ``pattern`` matches anything."""
    if pattern.stage is not None and pattern.stage != actual.stage:
        return False
    if pattern.domain != actual.domain:
        return False
    p, a = pattern.data, actual.data
    if isinstance(p, ListType) and isinstance(a, ListType):
        return _matches(p.elem, a.elem)
    return p == a


def _fill_stages(pattern: QualType, actual: QualType) -> QualType:
    stage = actual.stage if pattern.stage is None else pattern.stage
    data = pattern.data
    if isinstance(data, ListType) and isinstance(actual.data, ListType):
        data = ListType(_fill_stages(data.elem, actual.data.elem))
    return QualType(data, stage, pattern.domain)


def _default_stages(q: QualType) -> QualType:
    data = q.data
    if isinstance(data, ListType):
        data = ListType(_default_stages(data.elem))
    return QualType(data, q.stage if q.stage is not None else Stage.PRE, q.domain)


class Checker:
    def __init__(self, modulus: int):
        self.modulus = modulus

    # types from source

    def resolve(self, q: QualType, pos: Optional[Pos]) -> QualType:
        def fix(m):
            if m == "N" or m == self.modulus:
                return self.modulus
            raise TypeCheckError(
                "UnsupportedConstruct",
                f"modulus {m} differs from the global modulus {self.modulus}",
                pos,
            )

        return map_modulus(q, fix)

    def check_formed(self, q: QualType, pos: Optional[Pos]) -> QualType:
        if not well_formed(q):
            raise TypeCheckError("IllFormedType", f"ill-formed type {q}", pos)
        return q

    # expressions

    def check(self, env: TypeEnv, e: A.Expr, hint: Optional[QualType] = None):
        method = getattr(self, "_" + type(e).__name__)
        node, ty, eff = method(env, e, hint)
        return replace(node, pos=e.pos, ty=ty, eff=eff), ty, eff

    def expect(self, expected: QualType, actual: QualType, pos, what: str):
        if expected != actual:
            code = _first_difference(expected, actual)
            raise TypeCheckError(code, f"{what}: expected {expected}, found {actual}", pos)

    def _UnitLit(self, env, e, hint):
        return e, UNIT_TYPE, Effect.EMPTY

    def _literal(self, e, hint, data_cls):
        if hint is not None and isinstance(hint.data, data_cls):
            q = _default_stages(hint)
        else:
            q = QualType(data_cls(None), Stage.PRE, Domain.PUBLIC)
        self.check_formed(q, e.pos)
        return e, q, stage_effect(q.stage)

    def _NatLit(self, env, e, hint):
        return self._literal(e, hint, UIntType)

    def _BoolLit(self, env, e, hint):
        return self._literal(e, hint, BoolType)

    def _Var(self, env, e, hint):
        b = lookup(env, e.name)
        if b is None:
            raise TypeCheckError("UnknownVariable", f"unknown variable {e.name!r}", e.pos)
        return e, b.type, Effect.EMPTY

    def _pair(self, env, lhs, rhs, hint):
        """Check two operands that must share a type.

        A bare literal on the left takes the type of the right operand.
        """
        if hint is None and _is_literal(lhs) and not _is_literal(rhs):
            r, rt, rd = self.check(env, rhs, None)
            l, lt, ld = self.check(env, lhs, rt)
        else:
            l, lt, ld = self.check(env, lhs, hint)
            r, rt, rd = self.check(env, rhs, lt)
        return l, lt, ld, r, rt, rd

    def _BinOp(self, env, e, hint):
        op = e.op
        if op in A.ARITH_OPS or op in A.LOGIC_OPS:
            operand_hint = hint
        elif op in ("<", "<=") and hint is not None and isinstance(hint.data, BoolType):
            operand_hint = QualType(UIntType(hint.data.modulus), hint.stage, hint.domain)
        else:
            operand_hint = None
        l, lt, ld, r, rt, rd = self._pair(env, e.lhs, e.rhs, operand_hint)
        self.expect(lt, rt, e.rhs.pos, f"right operand of {op!r}")
        t = lt.data
        if op in A.ARITH_OPS or op in ("<", "<="):
            wanted = UIntType
        elif op in A.LOGIC_OPS:
            wanted = BoolType
        else:
            wanted = (UIntType, BoolType)
        if not isinstance(t, wanted):
            raise TypeCheckError("TypeMismatch", f"operator {op!r} cannot be applied to {lt}", e.pos)
        if op in A.PRE_ONLY_OPS and lt.stage is not Stage.PRE:
            raise TypeCheckError("StageMismatch", f"operator {op!r} is only available in $pre", e.pos)
        if op in A.COMPARE_OPS:
            ty = QualType(BoolType(t.modulus), Stage.PRE, lt.domain)
        else:
            ty = lt
        eff = stage_effect(lt.stage) | ld | rd
        return replace(e, lhs=l, rhs=r), ty, eff

    def _assertion(self, env, e, data_cls, name):
        hint = QualType(data_cls(self.modulus), Stage.POST, Domain.PUBLIC)
        arg, at, ad = self.check(env, e.arg, hint)
        if not isinstance(at.data, data_cls) or not at.data.bounded:
            raise TypeCheckError(
                "TypeMismatch", f"{name} expects {data_cls(self.modulus)}, found {at}", e.arg.pos
            )
        if at.stage is not Stage.POST:
            raise TypeCheckError("StageMismatch", f"{name} expects a $post argument, found {at}", e.arg.pos)
        return replace(e, arg=arg), UNIT_TYPE, Effect.UP_PUBLIC

    def _Assert(self, env, e, hint):
        return self._assertion(env, e, BoolType, "assert")

    def _AssertZero(self, env, e, hint):
        return self._assertion(env, e, UIntType, "assert_zero")

    def _Get(self, env, e, hint):
        if e.annotation is not None:
            q = self.resolve(e.annotation, e.pos)
        elif hint is not None:
            q = hint
        else:
            raise TypeCheckError(
                "MalformedGetAnnotation", f"the type of input {e.key!r} must be annotated", e.pos
            )
        q = _default_stages(q)
        if not allpre(e.domain, q):
            raise TypeCheckError(
                "MalformedGetAnnotation",
                f"input {e.key!r} must have every qualifier $pre {e.domain}, found {q}",
                e.pos,
            )
        self.check_formed(q, e.pos)
        return e, q, Effect.EMPTY

    def _If(self, env, e, hint):
        g, gt, gd = self.check(env, e.guard, None)
        if not isinstance(gt.data, BoolType):
            raise TypeCheckError("TypeMismatch", f"if guard must be a bool, found {gt}", e.guard.pos)
        if gt.stage is not Stage.PRE:
            raise TypeCheckError("StageMismatch", f"if guard must be $pre, found {gt}", e.guard.pos)
        t, tt, td = self.check(env, e.then, hint)
        f, ft, fd = self.check(env, e.orelse, tt)
        self.expect(tt, ft, e.orelse.pos, "branches of if")
        self._branching_guard(gt.domain, tt, td | fd, e.pos, "if guard")
        return replace(e, guard=g, then=t, orelse=f), tt, gd | td | fd

    def _branching_guard(self, d: Domain, q: QualType, body_eff: Effect, pos, what: str):
        bound = up(d)
        if not bound >= up(q.domain):
            raise TypeCheckError(
                "NoReadUp", f"{what} in {d} cannot produce a result in {q.domain}", pos
            )
        if not bound >= stage_effect(q.stage):
            raise TypeCheckError(
                "NoWriteDown", f"{what} in {d} cannot produce a $post result", pos
            )
        if not bound >= body_eff:
            raise TypeCheckError(
                "NoWriteDown", f"{what} in {d} cannot control effects in {body_eff}", pos
            )

    def _For(self, env, e, hint):
        lo, lt, ld, hi, ht, hd = self._pair(env, e.lo, e.hi, None)
        for node, q in ((e.lo, lt), (e.hi, ht)):
            if q.data != INDEX_DATA:
                raise TypeCheckError("TypeMismatch", f"loop bound must be uint, found {q}", node.pos)
            if q.stage is not Stage.PRE:
                raise TypeCheckError("StageMismatch", f"loop bound must be $pre, found {q}", node.pos)
        if lt.domain != ht.domain:
            raise TypeCheckError("DomainMismatch", f"loop bounds in {lt.domain} and {ht.domain}", e.hi.pos)
        d = lt.domain
        inner = env + (Binding(e.var, QualType(INDEX_DATA, Stage.PRE, d), False),)
        body_hint = hint.data.elem if hint is not None and isinstance(hint.data, ListType) else None
        body, bt, bd = self.check(inner, e.body, body_hint)
        self._branching_guard(d, bt, bd, e.pos, "loop bound")
        ty = QualType(ListType(bt), Stage.PRE, d)
        return replace(e, lo=lo, hi=hi, body=body), ty, ld | hd | bd

    def _Wire(self, env, e, hint):
        body_hint = hint.with_stage(Stage.PRE) if hint is not None else None
        body, bt, bd = self.check(env, e.body, body_hint)
        if not isinstance(bt.data, (UIntType, BoolType)) or not bt.data.bounded:
            raise TypeCheckError("TypeMismatch", f"only uint[N] and bool[N] can be wired, found {bt}", e.pos)
        if bt.stage is not Stage.PRE:
            raise TypeCheckError("StageMismatch", f"wire body must be $pre, found {bt}", e.pos)
        return replace(e, body=body), bt.with_stage(Stage.POST), Effect.UP_PUBLIC

    def _Cast(self, env, e, hint):
        target = e.target
        if isinstance(target, QualType):
            target = self.resolve(target, e.pos)
            body_hint = _default_stages(target)
        else:
            body_hint = None
        body, bt, bd = self.check(env, e.body, body_hint)
        if isinstance(target, Stage):
            ty = bt.with_stage(target)
        elif isinstance(target, Domain):
            ty = bt.with_domain(target)
        else:
            ty = _fill_stages(target, bt)
            if not _same_data(ty.data, bt.data):
                raise TypeCheckError(
                    "TypeMismatch", f"cast cannot change the data type from {bt.data} to {ty.data}", e.pos
                )
        if bt.stage > ty.stage:
            raise TypeCheckError("StageMismatch", f"cannot cast from {bt.stage} to {ty.stage}", e.pos)
        if ty.domain < bt.domain:
            raise TypeCheckError("NoWriteDown", f"cannot cast from {bt.domain} to {ty.domain}", e.pos)
        if not up(ty.domain) >= type_effect(ty.data):
            raise TypeCheckError(
                "NoReadUp", f"list structure in {ty.domain} would reveal more private elements", e.pos
            )
        self.check_formed(ty, e.pos)
        return replace(e, body=body), ty, bd

    def _Load(self, env, e, hint):
        lv, lt, ld = self.check(env, e.lvalue, None)
        if not isinstance(lt.data, ListType):
            raise TypeCheckError("TypeMismatch", f"cannot index into {lt}", e.pos)
        index_type = QualType(INDEX_DATA, lt.stage, lt.domain)
        idx, it, idd = self.check(env, e.index, index_type)
        if it.data != INDEX_DATA:
            raise TypeCheckError("TypeMismatch", f"index must be uint, found {it}", e.index.pos)
        if it.stage != lt.stage:
            raise TypeCheckError("StageMismatch", f"index must be {lt.stage}, found {it}", e.index.pos)
        if it.domain != lt.domain:
            raise TypeCheckError(
                "DomainMismatch", f"index must be in {lt.domain} like its list, found {it}", e.index.pos
            )
        return replace(e, lvalue=lv, index=idx), lt.data.elem, ld | idd

    def _Assign(self, env, e, hint):
        root = A.lvalue_root(e.lvalue)
        lv, lt, ld = self.check(env, e.lvalue, None)
        b = lookup(env, root.name)
        if not b.mutable:
            raise TypeCheckError("NotMutable", f"variable {root.name!r} is not mutable", e.pos)
        rhs, rt, rd = self.check(env, e.rhs, lt)
        self.expect(lt, rt, e.rhs.pos, "assigned value")
        eff = stage_effect(lt.stage) | up(lt.domain) | ld | rd
        return replace(e, lvalue=lv, rhs=rhs), UNIT_TYPE, eff

    def _Let(self, env, e, hint):
        ann = None
        if e.annotation is not None:
            ann = self.resolve(e.annotation, e.pos)
        bound, bt, bd = self.check(env, e.bound, ann)
        if ann is not None and not _matches(ann, bt):
            code = _first_difference(_fill_stages(ann, bt), bt)
            raise TypeCheckError(code, f"let {e.var}: declared {ann}, found {bt}", e.bound.pos)
        self.check_formed(bt, e.pos)
        inner = env + (Binding(e.var, bt, e.mutable),)
        rest, rt, rd = self.check(inner, e.rest, hint)
        return replace(e, bound=bound, rest=rest), rt, up(bt.domain) | bd | rd

    def _Seq(self, env, e, hint):
        first, ft, fd = self.check(env, e.first, None)
        rest, rt, rd = self.check(env, e.rest, hint)
        return replace(e, first=first, rest=rest), rt, fd | rd

    def _Call(self, env, e, hint):
        raise TypeCheckError(
            "UnsupportedConstruct", f"call to {e.name!r}: function calls are not supported", e.pos
        )


def _same_data(a: DataType, b: DataType) -> bool:
    return a == b


def _is_literal(e: A.Expr) -> bool:
    return isinstance(e, (A.NatLit, A.BoolLit))


def typecheck_expr(env: TypeEnv, e: A.Expr, expected: Optional[QualType] = None, modulus: int = 2**61 - 1):
    """Check ``e`` in ``env``; returns ``(typed_expr, type, effect)``."""
    return Checker(modulus).check(env, e, expected)


def typecheck_lvalue(env: TypeEnv, lv: A.Expr, modulus: int = 2**61 - 1):
    """Decompose an lvalue ``x[y1]..[yn]``.

    Returns ``(root_type, index_domains, element_type, effect)`` where the
    i-th index must live in ``index_domains[i]``.
    """
    checker = Checker(modulus)
    root = A.lvalue_root(lv)
    b = lookup(env, root.name)
    if b is None:
        raise TypeCheckError("UnknownVariable", f"unknown variable {root.name!r}", root.pos)
    q = b.type
    domains = []
    eff = Effect.EMPTY
    for idx in A.lvalue_indices(lv):
        if not isinstance(q.data, ListType):
            raise TypeCheckError("TypeMismatch", f"cannot index into {q}", idx.pos)
        _, it, idd = checker.check(env, idx, QualType(INDEX_DATA, Stage.PRE, q.domain))
        if it != QualType(INDEX_DATA, Stage.PRE, q.domain):
            code = _first_difference(QualType(INDEX_DATA, Stage.PRE, q.domain), it)
            raise TypeCheckError(code, f"index must be uint $pre {q.domain}, found {it}", idx.pos)
        domains.append(q.domain)
        eff = eff | idd
        q = q.data.elem
    return b.type, tuple(domains), q, eff


def typecheck_function(f: A.FunDef, modulus: int) -> A.FunDef:
    checker = Checker(modulus)
    env = tuple(
        Binding(p.name, checker.check_formed(checker.resolve(p.type, p.pos), p.pos), False)
        for p in f.params
    )
    ret = None
    if f.return_type is not None:
        ret = checker.resolve(f.return_type, f.pos)
    body, ty, _ = checker.check(env, f.body, ret)
    if ret is not None and not _matches(ret, ty):
        code = _first_difference(_fill_stages(ret, ty), ty)
        raise TypeCheckError(code, f"{f.name} returns {ty}, declared {ret}", f.body.pos or f.pos)
    return replace(f, body=body)


def typecheck_program(p: A.Program, modulus: int) -> TypedProgram:
    """Check every function; ``main`` is checked in the empty environment."""
    if modulus < 2:
        raise ValueError("modulus must be at least 2")
    errors = []
    typed = []
    for f in p.functions:
        try:
            typed.append(typecheck_function(f, modulus))
        except TypeCheckError as err:
            errors.append(err)
    if errors:
        raise TypeCheckErrors(errors)
    program = A.Program(tuple(typed))
    return TypedProgram(program, program.main, modulus)
