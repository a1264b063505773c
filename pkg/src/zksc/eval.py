"""Local (per-domain) and circuit semantics of typed expressions.

Both evaluators share one interpreter; they differ only in which literals,
inputs and casts are visible and in what ``wire`` does.  The local view for
domain ``d`` appends wired values to an output stream, the circuit view reads
them back from input streams.

Expressions must have been typechecked: the interpreter reads moduli and
domains from the ``ty`` annotations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

from . import ast as A
from .ast import Pos
from .runtime import (
    TOP,
    UNIT,
    Env,
    IndexOutOfBounds,
    InputError,
    Inputs,
    OutStreams,
    allpure,
    decode_bool,
    env_lookup,
    env_push,
    env_tail,
    env_update,
    upd,
)
from .types import BoolType, Domain, ListType, QualType, Stage, UIntType


@dataclass(frozen=True)
class Failure:
    """A run that stopped: a failed assertion, a runtime error or a short stream."""

    kind: str  # "assert", "runtime", "underflow", "decode", "internal"
    reason: str
    pos: Optional[Pos] = None

    def format(self, filename: str = "<input>") -> str:
        line, col = self.pos if self.pos else (0, 0)
        code = {
            "assert": "AssertionFailed",
            "runtime": "RuntimeError",
            "underflow": "StreamUnderflow",
            "decode": "StreamDecode",
            "internal": "InternalError",
        }[self.kind]
        return f"{filename}:{line}:{col}: error[{code}]: {self.reason}"


class Stop(Exception):
    def __init__(self, failure: Failure):
        super().__init__(failure.reason)
        self.failure = failure


def _fail(kind: str, reason: str, e: A.Expr):
    raise Stop(Failure(kind, reason, e.pos))


class LocalResult(NamedTuple):
    value: object
    env: Env
    out: OutStreams


class CircuitResult(NamedTuple):
    value: object
    env: Env
    remaining: OutStreams


def apply_op(op: str, a, b, data, e: Optional[A.Expr] = None):
    """Apply a built-in binary operator to known operands of type ``data``."""
    if isinstance(data, UIntType):
        m = data.modulus
        if op == "+":
            r = a + b
        elif op == "-":
            r = a - b
            if r < 0 and m is None:
                raise Stop(Failure("runtime", f"unbounded subtraction {a} - {b} is negative", e and e.pos))
        elif op == "*":
            r = a * b
        elif op in ("/", "%"):
            if b == 0:
                raise Stop(Failure("runtime", "division by zero", e and e.pos))
            r = a // b if op == "/" else a % b
        elif op == "==":
            return a == b
        elif op == "<":
            return a < b
        elif op == "<=":
            return a <= b
        else:
            raise ValueError(op)
        return r % m if m is not None else r
    if op == "==":
        return a == b
    if op == "&&":
        return a and b
    if op == "||":
        return a or b
    raise ValueError(op)


def literal_value(e: A.Expr):
    if isinstance(e, A.BoolLit):
        return e.value
    m = e.ty.data.modulus
    return e.value % m if m is not None else e.value


class Interpreter:
    """Shared evaluation; subclasses decide visibility and wiring."""

    def literal_visible(self, e: A.Expr) -> bool:
        raise NotImplementedError

    def get_visible(self, e: A.Get) -> bool:
        raise NotImplementedError

    def cast_visible(self, e: A.Cast) -> bool:
        raise NotImplementedError

    def wire(self, e: A.Wire, v):
        raise NotImplementedError

    def __init__(self, inputs: Inputs):
        self.inputs = inputs

    def run(self, e: A.Expr, env: Env):
        method = getattr(self, "_" + type(e).__name__)
        return method(e, env)

    def _UnitLit(self, e, env):
        return UNIT, env

    def _NatLit(self, e, env):
        return (literal_value(e) if self.literal_visible(e) else TOP), env

    _BoolLit = _NatLit

    def _Var(self, e, env):
        return env_lookup(env, e.name), env

    def _BinOp(self, e, env):
        a, env = self.run(e.lhs, env)
        b, env = self.run(e.rhs, env)
        if a is TOP or b is TOP:
            return TOP, env
        return apply_op(e.op, a, b, e.lhs.ty.data, e), env

    def _Assert(self, e, env):
        v, env = self.run(e.arg, env)
        if v is False:
            _fail("assert", "assertion failed", e)
        return UNIT, env

    def _AssertZero(self, e, env):
        v, env = self.run(e.arg, env)
        if v is not TOP and v != 0:
            _fail("assert", f"assert_zero failed: value is {v}", e)
        return UNIT, env

    def _Get(self, e, env):
        if not self.get_visible(e):
            return TOP, env
        values = self.inputs.of(e.domain)
        if e.key not in values:
            raise InputError(f"missing {e.domain.name.lower()} input {e.key!r}")
        return allpure(values[e.key]), env

    def _If(self, e, env):
        g, env = self.run(e.guard, env)
        if g is TOP:
            return TOP, env
        return self.run(e.then if g else e.orelse, env)

    def _For(self, e, env):
        lo, env = self.run(e.lo, env)
        hi, env = self.run(e.hi, env)
        if lo is TOP or hi is TOP:
            return TOP, env
        n = max(0, hi - lo)
        if n == 0:
            return (), env
        env = env_push(env, e.var, lo)
        out = []
        for k in range(n):
            if k:
                env = env_update(env, e.var, lo + k)
            v, env = self.run(e.body, env)
            out.append(v)
        return tuple(out), env_tail(env)

    def _Wire(self, e, env):
        v, env = self.run(e.body, env)
        return self.wire(e, v), env

    def _Cast(self, e, env):
        v, env = self.run(e.body, env)
        return (v if self.cast_visible(e) else TOP), env

    def _Load(self, e, env):
        a, env = self.run(e.lvalue, env)
        i, env = self.run(e.index, env)
        if a is TOP or i is TOP:
            return TOP, env
        if i >= len(a):
            _fail("runtime", f"index {i} out of bounds for list of length {len(a)}", e)
        return a[i], env

    def _Assign(self, e, env):
        root = A.lvalue_root(e.lvalue)
        a = env_lookup(env, root.name)
        indices = []
        for idx in A.lvalue_indices(e.lvalue):
            i, env = self.run(idx, env)
            indices.append(i)
        v, env = self.run(e.rhs, env)
        try:
            new = upd(a, indices, v)
        except IndexOutOfBounds as exc:
            _fail("runtime", str(exc), e)
        return UNIT, env_update(env, root.name, new)

    def _Let(self, e, env):
        v, env = self.run(e.bound, env)
        r, env = self.run(e.rest, env_push(env, e.var, v))
        return r, env_tail(env)

    def _Seq(self, e, env):
        _, env = self.run(e.first, env)
        return self.run(e.rest, env)


class LocalInterpreter(Interpreter):
    def __init__(self, d: Domain, inputs: Inputs):
        super().__init__(inputs)
        self.d = d
        self.prover = []
        self.verifier = []

    def literal_visible(self, e):
        return e.ty.domain <= self.d

    def get_visible(self, e):
        return e.domain <= self.d

    def cast_visible(self, e):
        return e.ty.domain <= self.d

    def wire(self, e, v):
        d = e.ty.domain
        if d is Domain.PROVER:
            self.prover.append(v)
        elif d is Domain.VERIFIER:
            self.verifier.append(v)
        return v


class CircuitInterpreter(Interpreter):
    def __init__(self, inputs: Inputs, streams: OutStreams):
        super().__init__(inputs)
        self.streams = {Domain.PROVER: list(streams.prover), Domain.VERIFIER: list(streams.verifier)}
        self.heads = {Domain.PROVER: 0, Domain.VERIFIER: 0}

    def literal_visible(self, e):
        return e.ty.stage is Stage.POST or e.ty.domain is Domain.PUBLIC

    def get_visible(self, e):
        return e.domain is Domain.PUBLIC

    def cast_visible(self, e):
        return e.ty.stage is Stage.POST or e.ty.domain is Domain.PUBLIC

    def wire(self, e, v):
        d = e.ty.domain
        if d is Domain.PUBLIC:
            return v
        k = self.heads[d]
        stream = self.streams[d]
        if k >= len(stream):
            _fail("underflow", f"{d.name.lower()} stream exhausted", e)
        self.heads[d] = k + 1
        w = stream[k]
        if isinstance(e.ty.data, BoolType) and type(w) is not bool:
            w = decode_bool(w)
            if w is None:
                _fail("decode", f"stream value {stream[k]} does not encode a boolean", e)
        elif isinstance(e.ty.data, UIntType) and type(w) is bool:
            _fail("decode", "boolean stream value for an integer wire", e)
        return w

    def remaining(self) -> OutStreams:
        return OutStreams(
            tuple(self.streams[Domain.PROVER][self.heads[Domain.PROVER]:]),
            tuple(self.streams[Domain.VERIFIER][self.heads[Domain.VERIFIER]:]),
        )


def eval_local(d: Domain, e: A.Expr, env: Env, inputs: Inputs):
    """Evaluate ``e`` as seen from domain ``d``.

    Returns a :class:`LocalResult` or a :class:`Failure`.
    """
    interp = LocalInterpreter(d, inputs)
    try:
        v, env = interp.run(e, env)
    except Stop as stop:
        return stop.failure
    return LocalResult(v, env, OutStreams(tuple(interp.prover), tuple(interp.verifier)))


def eval_circuit(e: A.Expr, env: Env, inputs: Inputs, streams: OutStreams):
    """Evaluate ``e`` the way the circuit sees it, consuming ``streams``.

    Returns a :class:`CircuitResult` or a :class:`Failure`.
    """
    interp = CircuitInterpreter(inputs, streams)
    try:
        v, env = interp.run(e, env)
    except Stop as stop:
        return stop.failure
    return CircuitResult(v, env, interp.remaining())


def is_failure(r) -> bool:
    return isinstance(r, Failure)


def view_inputs(inputs: Inputs, d: Domain) -> Inputs:
    """Drop every input dictionary above ``d``."""
    return Inputs(*(inputs.of(x) if x <= d else {} for x in Domain))


def value_type_ok(v, q: QualType) -> bool:
    """Whether a known core value inhabits the data type of ``q``."""
    t = q.data
    if isinstance(t, UIntType):
        return type(v) is int and (t.modulus is None or v < t.modulus)
    if isinstance(t, BoolType):
        return type(v) is bool
    if isinstance(t, ListType):
        return isinstance(v, (tuple, list)) and all(value_type_ok(x, t.elem) for x in v)
    return v is UNIT
