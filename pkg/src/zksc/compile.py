"""Compilation of typed expressions to arithmetic circuits.

The compiler computes with composite values: a pair of a local value (known
only for public data) and a circuit node (present only for ``$post`` data).
Branches and loops are unrolled using the public guard and bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from . import ast as A
from .ast import Pos
from .circuit import Circuit, CircuitBuilder, InputAssignment, input_values, static_values
from .eval import Failure, Stop, apply_op, literal_value
from .runtime import (
    TOP,
    UNIT,
    IndexOutOfBounds,
    InputError,
    allpure,
    encode,
    env_lookup,
    env_push,
    env_tail,
    env_update,
)
from .types import BoolType, Domain, ListType, QualType, Stage, UIntType


class Composite(NamedTuple):
    value: object  # TOP, a scalar, UNIT or a tuple of Composite
    node: object  # TOP or a node id


UNKNOWN = Composite(TOP, TOP)


class InputInfo(NamedTuple):
    domain: Domain
    index: int
    is_bool: bool
    pos: Optional[Pos]


@dataclass
class CompileState:
    builder: CircuitBuilder
    env: tuple = ()
    prover: int = 0
    verifier: int = 0
    outputs: list = field(default_factory=list)
    inputs: list = field(default_factory=list)

    @classmethod
    def initial(cls, modulus: int) -> "CompileState":
        return cls(CircuitBuilder(modulus))

    def counter(self, d: Domain) -> int:
        return self.verifier if d is Domain.VERIFIER else self.prover

    def fork(self) -> "CompileState":
        """An independent copy; the node arena is copied too."""
        return CompileState(
            CircuitBuilder(self.builder.modulus, list(self.builder.nodes)),
            self.env,
            self.prover,
            self.verifier,
            list(self.outputs),
            list(self.inputs),
        )

    def circuit(self, outputs=None) -> Circuit:
        return Circuit(
            self.builder.modulus,
            tuple(self.builder.nodes),
            tuple(self.outputs if outputs is None else outputs),
            self.prover,
            self.verifier,
        )


class CompileResult(NamedTuple):
    value: Composite
    state: CompileState


def allpuretop(v) -> Composite:
    """A known public core value with no circuit attached."""
    if isinstance(v, (tuple, list)):
        return Composite(tuple(allpuretop(x) for x in v), TOP)
    return Composite(v, TOP)


def upd_c(a: Composite, indices: list, v: Composite) -> Composite:
    if not indices:
        return v
    i = indices[0]
    if a.value is TOP or i is TOP:
        return UNKNOWN
    if i >= len(a.value):
        raise IndexOutOfBounds(f"index {i} out of bounds for list of length {len(a.value)}")
    items = a.value
    return Composite(items[:i] + (upd_c(items[i], indices[1:], v),) + items[i + 1:], TOP)


class Compiler:
    def __init__(self, state: CompileState, public: dict):
        self.state = state
        self.public = public
        self.b = state.builder

    def run(self, e: A.Expr) -> Composite:
        return getattr(self, "_" + type(e).__name__)(e)

    def _UnitLit(self, e):
        return Composite(UNIT, TOP)

    def _NatLit(self, e):
        n = literal_value(e)
        value = n if e.ty.domain is Domain.PUBLIC else TOP
        node = self.b.con(encode(n)) if e.ty.stage is Stage.POST else TOP
        return Composite(value, node)

    _BoolLit = _NatLit

    def _Var(self, e):
        return env_lookup(self.state.env, e.name)

    def _BinOp(self, e):
        a = self.run(e.lhs)
        b = self.run(e.rhs)
        if a.value is TOP or b.value is TOP:
            value = TOP
        else:
            value = apply_op(e.op, a.value, b.value, e.lhs.ty.data, e)
        if a.node is TOP or b.node is TOP or e.op not in ("+", "-", "*"):
            node = TOP
        elif e.op == "+":
            node = self.b.op("add", a.node, b.node)
        elif e.op == "*":
            node = self.b.op("mul", a.node, b.node)
        else:
            minus_one = self.b.con(self.b.modulus - 1)
            node = self.b.op("add", a.node, self.b.op("mul", minus_one, b.node))
        return Composite(value, node)

    def _assertion(self, e):
        c = self.run(e.arg)
        if c.node is TOP:
            raise Stop(Failure("internal", "assertion argument has no circuit", e.pos))
        self.state.outputs.append(c.node)
        return Composite(UNIT, TOP)

    _Assert = _assertion
    _AssertZero = _assertion

    def _Get(self, e):
        if e.domain is not Domain.PUBLIC:
            return UNKNOWN
        if e.key not in self.public:
            raise InputError(f"missing public input {e.key!r}")
        return allpuretop(allpure(self.public[e.key]))

    def _If(self, e):
        g = self.run(e.guard)
        if g.value is TOP:
            return UNKNOWN
        return self.run(e.then if g.value else e.orelse)

    def _For(self, e):
        lo = self.run(e.lo).value
        hi = self.run(e.hi).value
        if lo is TOP or hi is TOP:
            return UNKNOWN
        n = max(0, hi - lo)
        if n == 0:
            return Composite((), TOP)
        st = self.state
        st.env = env_push(st.env, e.var, Composite(lo, TOP))
        out = []
        for k in range(n):
            if k:
                st.env = env_update(st.env, e.var, Composite(lo + k, TOP))
            out.append(self.run(e.body))
        st.env = env_tail(st.env)
        return Composite(tuple(out), TOP)

    def _Wire(self, e):
        c = self.run(e.body)
        v = c.value
        if v is not TOP:
            node = self.b.con(encode(v))
        else:
            d = e.ty.domain
            if d is Domain.PUBLIC:
                raise Stop(Failure("internal", "public wire without a known value", e.pos))
            st = self.state
            k = st.counter(d)
            node = self.b.input(d, k)
            if d is Domain.PROVER:
                st.prover += 1
            else:
                st.verifier += 1
            st.inputs.append(InputInfo(d, k, isinstance(e.ty.data, BoolType), e.pos))
        return Composite(v, node)

    def _Cast(self, e):
        c = self.run(e.body)
        value = c.value if e.ty.domain is Domain.PUBLIC else TOP
        node = c.node if e.ty.stage is Stage.POST else TOP
        return Composite(value, node)

    def _Load(self, e):
        a = self.run(e.lvalue)
        i = self.run(e.index).value
        if a.value is TOP or i is TOP:
            return UNKNOWN
        if i >= len(a.value):
            raise Stop(Failure("runtime", f"index {i} out of bounds for list of length {len(a.value)}", e.pos))
        return a.value[i]

    def _Assign(self, e):
        root = A.lvalue_root(e.lvalue)
        a = env_lookup(self.state.env, root.name)
        indices = [self.run(idx).value for idx in A.lvalue_indices(e.lvalue)]
        v = self.run(e.rhs)
        try:
            new = upd_c(a, indices, v)
        except IndexOutOfBounds as exc:
            raise Stop(Failure("runtime", str(exc), e.pos)) from exc
        self.state.env = env_update(self.state.env, root.name, new)
        return Composite(UNIT, TOP)

    def _Let(self, e):
        v = self.run(e.bound)
        self.state.env = env_push(self.state.env, e.var, v)
        r = self.run(e.rest)
        self.state.env = env_tail(self.state.env)
        return r

    def _Seq(self, e):
        self.run(e.first)
        return self.run(e.rest)


def compile_expr(e: A.Expr, state: CompileState, public_inputs: dict):
    """Compile ``e`` starting from ``state``, which is updated in place.

    Returns a :class:`CompileResult` or a :class:`Failure`.
    """
    try:
        value = Compiler(state, public_inputs).run(e)
    except Stop as stop:
        return stop.failure
    return CompileResult(value, state)


def compile_program(program, public_inputs: dict, modulus: int):
    """Compile the body of ``main``; returns a :class:`Circuit` or a :class:`Failure`."""
    result = compile_main(program, public_inputs, modulus)
    if isinstance(result, Failure):
        return result
    return result.state.circuit()


def compile_main(program, public_inputs: dict, modulus: int):
    state = CompileState.initial(modulus)
    return compile_expr(program.body, state, public_inputs)


def manifest(state: CompileState, filename: str) -> list[dict]:
    """Where each circuit input came from, in wire order."""
    return [
        {
            "domain": info.domain.name.lower(),
            "index": info.index,
            "type": "bool" if info.is_bool else "uint",
            "file": filename,
            "line": info.pos.line if info.pos else 0,
        }
        for info in state.inputs
    ]


# Relating compiled values to circuit-semantics values.


def bullet(cv: Composite, pi: InputAssignment, circuit) -> object:
    """The circuit-semantics value a composite value stands for under ``pi``."""
    nodes = circuit.nodes
    roots = list(_nodes_in(cv))
    values = input_values(nodes, circuit.modulus, roots, pi) if roots else {}
    return bullet_with(cv, values)


def _nodes_in(cv: Composite):
    v = cv.value
    if isinstance(v, tuple):
        for x in v:
            yield from _nodes_in(x)
    elif v is TOP and cv.node is not TOP:
        yield cv.node


def bullet_with(cv: Composite, node_values) -> object:
    v = cv.value
    if v is TOP:
        return TOP if cv.node is TOP else node_values[cv.node]
    if isinstance(v, tuple):
        return tuple(bullet_with(x, node_values) for x in v)
    return encode(v)


def sim(a, b) -> bool:
    """Equality up to the field encoding of booleans."""
    if a is TOP or b is TOP:
        return a is b
    if a is UNIT or b is UNIT:
        return a is b
    if isinstance(a, tuple) or isinstance(b, tuple):
        return (
            isinstance(a, tuple)
            and isinstance(b, tuple)
            and len(a) == len(b)
            and all(sim(x, y) for x, y in zip(a, b))
        )
    return encode(a) == encode(b)


def composite_exact(q: QualType, cv: Composite, nodes, modulus: int, samples=()) -> bool:
    """The compile-time exactness of ``cv`` at type ``q``.

    ``samples`` are input assignments used to check that a node whose value
    the compiler knows evaluates to that value on every input.
    """
    t, s, d = q.data, q.stage, q.domain
    v, c = cv
    if s is Stage.POST:
        if c is TOP:
            return False
        if v is not TOP:
            static = static_values(nodes, modulus, [c])[c]
            if static is TOP or static != encode(v):
                return False
            for pi in samples:
                if input_values(nodes, modulus, [c], pi)[c] != static:
                    return False
    if s is Stage.PRE and c is not TOP:
        return False
    if d is not Domain.PUBLIC:
        return v is TOP
    if isinstance(t, ListType):
        return isinstance(v, tuple) and all(
            composite_exact(t.elem, x, nodes, modulus, samples) for x in v
        )
    return v is not TOP and _in_type(v, t)


def _in_type(v, t) -> bool:
    if isinstance(t, UIntType):
        return type(v) is int and (t.modulus is None or 0 <= v < t.modulus)
    if isinstance(t, BoolType):
        return type(v) is bool
    return v is UNIT
