"""Executable versions of the metatheory, checked on concrete programs.

A program's ``main`` body is a spine of ``let``s.  Each point on the spine is
a *checkpoint*: the remaining expression is checked in the type environment
of the enclosing ``let``s, with value environments obtained by running every
view over the prefix.  Checks whose hypotheses do not hold at a checkpoint
(for example because the prover run fails) pass vacuously there.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from .. import ast as A
from ..circuit import InputAssignment, MissingInput, input_values
from ..compile import (
    CompileState,
    Composite,
    bullet_with,
    compile_expr,
    composite_exact,
    sim,
)
from ..eval import Failure, eval_circuit, eval_local
from ..predicates import (
    IN_CIRCUIT,
    coincident,
    env_coincident,
    env_exact,
    exact,
    in_domain,
    streams_coincident,
    streams_exact,
)
from ..printer import format_program
from ..runtime import TOP, Inputs, OutStreams, encode, env_push, value_eq
from ..typecheck import Binding, TypedProgram
from ..types import Domain, Stage
from .generator import GenConfig, gen_inputs

THEOREMS = (
    "exactness",
    "frame",
    "silence",
    "circuit-frame",
    "safety",
    "soundness",
    "correctness",
    "compile-exact",
    "compile-correct",
)

LOCAL_DOMAINS = (Domain.PUBLIC, Domain.VERIFIER, Domain.PROVER)


@dataclass
class Counterexample:
    theorem: str
    program: str
    inputs: dict
    checkpoint: int
    domains: tuple
    details: str

    def __str__(self) -> str:
        doms = ", ".join(d.name.lower() for d in self.domains)
        return (
            f"{self.theorem} violated at checkpoint {self.checkpoint} ({doms}): {self.details}\n"
            f"--- program ---\n{self.program}--- inputs ---\n{self.inputs}"
        )


class Violation(Exception):
    def __init__(self, checkpoint: int, domains, details: str):
        super().__init__(details)
        self.checkpoint = checkpoint
        self.domains = tuple(domains)
        self.details = details


@dataclass
class Checkpoint:
    index: int
    gamma: tuple  # of Binding
    expr: A.Expr


def spine(body: A.Expr) -> list[Checkpoint]:
    out = []
    gamma = ()
    e = body
    while True:
        out.append(Checkpoint(len(out), gamma, e))
        if not isinstance(e, A.Let):
            return out
        gamma = gamma + (Binding(e.var, e.bound.ty, e.mutable),)
        e = e.rest


def _ok(r) -> bool:
    return not isinstance(r, Failure)


def _vacuous_compile_failure(f: Failure) -> bool:
    return f.kind == "runtime"


def _same_local(a, b) -> bool:
    if isinstance(a, Failure) or isinstance(b, Failure):
        return a == b
    return (
        value_eq(a.value, b.value)
        and _env_eq(a.env, b.env)
        and value_eq(a.out.prover, b.out.prover)
        and value_eq(a.out.verifier, b.out.verifier)
    )


def _env_eq(e1, e2) -> bool:
    return len(e1) == len(e2) and all(
        n1 == n2 and value_eq(v1, v2) for (n1, v1), (n2, v2) in zip(e1, e2)
    )


def _stream_sim(o: OutStreams, p: OutStreams) -> bool:
    return all(
        len(o.of(d)) == len(p.of(d)) and all(sim(x, y) for x, y in zip(o.of(d), p.of(d)))
        for d in (Domain.PROVER, Domain.VERIFIER)
    )


def _nu_bullet(state: CompileState, pi: InputAssignment) -> OutStreams:
    return OutStreams(pi.prover[state.prover:], pi.verifier[state.verifier:])


class Scenario:
    """One typed program with one set of inputs, shared by all checks."""

    def __init__(self, tp: TypedProgram, inputs: Inputs, seed: int = 0, perturbed: Optional[dict] = None):
        self.tp = tp
        self.inputs = inputs
        self.rng = random.Random(seed)
        self.N = tp.modulus
        self.points = spine(tp.body)
        self.perturbed = perturbed or {}

    # prefix runs

    @cached_property
    def local_envs(self) -> dict:
        """Per domain, the environment (and prefix output) at each checkpoint, or None."""
        envs = {}
        for d in LOCAL_DOMAINS:
            env, out = (), OutStreams()
            row = []
            for cp in self.points:
                row.append((env, out))
                e = cp.expr
                if not isinstance(e, A.Let):
                    break
                r = eval_local(d, e.bound, env, self.inputs)
                if not _ok(r):
                    break
                env, out = env_push(r.env, e.var, r.value), out + r.out
            envs[d] = row
        return envs

    @cached_property
    def body_runs(self) -> dict:
        runs = {}
        for d in LOCAL_DOMAINS:
            runs[d] = [eval_local(d, self.points[k].expr, env, self.inputs) for k, (env, _) in enumerate(self.local_envs[d])]
        return runs

    @cached_property
    def continuation(self) -> OutStreams:
        return OutStreams(
            tuple(self.rng.randrange(self.N) for _ in range(self.rng.randrange(3))),
            tuple(self.rng.random() < 0.5 for _ in range(self.rng.randrange(3))),
        )

    @cached_property
    def circuit_envs(self) -> list:
        """Circuit-view environments, fed with the prover's output for each bound."""
        row = []
        env = ()
        rho = self.continuation
        for k, cp in enumerate(self.points):
            row.append(env)
            e = cp.expr
            if not isinstance(e, A.Let) or k + 1 >= len(self.local_envs[Domain.PROVER]):
                break
            prover_env, out_before = self.local_envs[Domain.PROVER][k]
            _, out_after = self.local_envs[Domain.PROVER][k + 1]
            consumed = OutStreams(out_after.prover[len(out_before.prover):], out_after.verifier[len(out_before.verifier):])
            r = eval_circuit(e.bound, env, self.inputs, consumed + rho)
            if not _ok(r) or r.remaining != rho:
                break
            env = env_push(r.env, e.var, r.value)
        return row

    @cached_property
    def compile_states(self) -> list:
        row = []
        state = CompileState.initial(self.N)
        for cp in self.points:
            row.append(state)
            e = cp.expr
            if not isinstance(e, A.Let):
                break
            nxt = state.fork()
            r = compile_expr(e.bound, nxt, self.inputs.public)
            if not _ok(r):
                break
            nxt.env = env_push(nxt.env, e.var, r.value)
            state = nxt
        return row

    @cached_property
    def whole_compile(self):
        st = CompileState.initial(self.N)
        r = compile_expr(self.tp.body, st, self.inputs.public)
        return st if _ok(r) else None

    def random_pi(self, counts=None) -> InputAssignment:
        st = self.whole_compile
        if st is None:
            return None
        bools = {(i.domain, i.index) for i in st.inputs if i.is_bool}
        streams = {}
        for d in (Domain.PROVER, Domain.VERIFIER):
            n = st.counter(d)
            streams[d] = tuple(
                self.rng.randrange(2) if (d, k) in bools else self.rng.randrange(self.N) for k in range(n)
            )
        return InputAssignment(streams[Domain.PROVER], streams[Domain.VERIFIER])

    @cached_property
    def assignments(self) -> list:
        """Honest, tampered and random input assignments for the circuit."""
        out = []
        whole = self.body_runs[Domain.PROVER][0]
        if _ok(whole):
            honest = InputAssignment(
                tuple(encode(v) for v in whole.out.prover), tuple(encode(v) for v in whole.out.verifier)
            )
            out.append(honest)
            st = self.whole_compile
            slots = [(d, k) for d in (Domain.PROVER, Domain.VERIFIER) for k in range(len(honest.of(d)))]
            if slots and st is not None:
                d, k = self.rng.choice(slots)
                kinds = {(i.domain, i.index): i.is_bool for i in st.inputs}
                streams = {Domain.PROVER: list(honest.prover), Domain.VERIFIER: list(honest.verifier)}
                v = streams[d][k]
                streams[d][k] = 1 - v if kinds.get((d, k)) else (v + 1) % self.N
                out.append(InputAssignment(tuple(streams[Domain.PROVER]), tuple(streams[Domain.VERIFIER])))
        rnd = self.random_pi()
        if rnd is not None:
            out.append(rnd)
        return out

    def pi_circuit_envs(self, pi: InputAssignment) -> list:
        """Circuit-view environments and remaining streams, fed with ``pi``."""
        row = []
        env = ()
        streams = OutStreams(pi.prover, pi.verifier)
        for cp in self.points:
            row.append((env, streams))
            e = cp.expr
            if not isinstance(e, A.Let):
                break
            r = eval_circuit(e.bound, env, self.inputs, streams)
            if not _ok(r):
                break
            env, streams = env_push(r.env, e.var, r.value), r.remaining
        return row

    # checks

    def check(self, name: str) -> Optional[Violation]:
        method = getattr(self, "check_" + name.replace("-", "_"))
        try:
            method()
        except Violation as v:
            return v
        return None

    def _local_cases(self):
        for d in LOCAL_DOMAINS:
            for k, (env, _) in enumerate(self.local_envs[d]):
                yield d, self.points[k], env, self.body_runs[d][k]

    def check_exactness(self):
        for d, cp, env, r in self._local_cases():
            P = in_domain(d)
            if not env_exact(cp.gamma, env, P):
                raise Violation(cp.index, [d], "prefix environment is not exact")
            if not _ok(r):
                continue
            if not exact(cp.expr.ty, r.value, P):
                raise Violation(cp.index, [d], f"value {r.value!r} is not {cp.expr.ty}-exact")
            if not env_exact(cp.gamma, r.env, P):
                raise Violation(cp.index, [d], "result environment is not exact")
            if not streams_exact(r.out, d):
                raise Violation(cp.index, [d], f"output streams {r.out} are not exact")

    def check_frame(self):
        for d, cp, env, r in self._local_cases():
            if not _ok(r):
                continue
            for d2 in LOCAL_DOMAINS:
                if d2 <= d and d2 not in cp.expr.eff:
                    if not env_coincident(cp.gamma, env, r.env, in_domain(d2)):
                        raise Violation(cp.index, [d, d2], f"environment changed in {d2} outside effect {cp.expr.eff}")

    def check_silence(self):
        for d, cp, env, r in self._local_cases():
            if _ok(r) and Domain.PUBLIC not in cp.expr.eff and not r.out.empty:
                raise Violation(cp.index, [d], f"output {r.out} without a public effect")

    def check_circuit_frame(self):
        for d, cp, env, r in self._local_cases():
            if d is Domain.PROVER and _ok(r) and Domain.PUBLIC not in cp.expr.eff:
                if not env_coincident(cp.gamma, env, r.env, IN_CIRCUIT):
                    raise Violation(cp.index, [d], "circuit-visible environment changed without a public effect")

    def perturbed_inputs(self, d: Domain) -> Inputs:
        if d not in self.perturbed:
            return self.inputs
        parts = [self.inputs.of(x) if x <= d else self.perturbed[d].of(x) for x in Domain]
        return Inputs(*parts)

    def check_safety(self):
        for d, cp, env, r in self._local_cases():
            if not _ok(r) or d is Domain.PROVER:
                continue
            r2 = eval_local(d, cp.expr, env, self.perturbed_inputs(d))
            if not _same_local(r, r2):
                raise Violation(cp.index, [d], "result depends on inputs of higher domains")

    def check_soundness(self):
        for d in LOCAL_DOMAINS:
            for d2 in LOCAL_DOMAINS:
                if d2 >= d:
                    continue
                P = in_domain(d2)
                rows = min(len(self.local_envs[d]), len(self.local_envs[d2]))
                for k in range(rows):
                    cp = self.points[k]
                    env_d, _ = self.local_envs[d][k]
                    env_d2, _ = self.local_envs[d2][k]
                    if not env_coincident(cp.gamma, env_d, env_d2, P):
                        raise Violation(k, [d, d2], "prefix environments do not coincide")
                    r, r2 = self.body_runs[d][k], self.body_runs[d2][k]
                    if not _ok(r):
                        continue
                    if not _ok(r2):
                        raise Violation(k, [d, d2], f"{d2} run fails where {d} succeeds: {r2.reason}")
                    if not coincident(cp.expr.ty, r.value, r2.value, P):
                        raise Violation(k, [d, d2], f"values {r.value!r} and {r2.value!r} differ")
                    if not env_coincident(cp.gamma, r.env, r2.env, P):
                        raise Violation(k, [d, d2], "result environments do not coincide")
                    if not streams_coincident(r.out, r2.out, d2):
                        raise Violation(k, [d, d2], f"streams {r.out} and {r2.out} do not coincide")

    def check_correctness(self):
        rho = self.continuation
        for k, cenv in enumerate(self.circuit_envs):
            cp = self.points[k]
            penv, _ = self.local_envs[Domain.PROVER][k]
            if not env_exact(cp.gamma, cenv, IN_CIRCUIT):
                raise Violation(k, [Domain.PROVER], "circuit prefix environment is not exact")
            if not env_coincident(cp.gamma, penv, cenv, IN_CIRCUIT):
                raise Violation(k, [Domain.PROVER], "prover and circuit prefix environments differ")
            r = self.body_runs[Domain.PROVER][k]
            if not _ok(r):
                continue
            c = eval_circuit(cp.expr, cenv, self.inputs, r.out + rho)
            if not _ok(c):
                raise Violation(k, [Domain.PROVER], f"circuit semantics fails: {c.reason}")
            if c.remaining != rho:
                raise Violation(k, [Domain.PROVER], "circuit semantics consumed the wrong number of wires")
            if not exact(cp.expr.ty, c.value, IN_CIRCUIT):
                raise Violation(k, [Domain.PROVER], f"circuit value {c.value!r} is not exact")
            if not env_exact(cp.gamma, c.env, IN_CIRCUIT):
                raise Violation(k, [Domain.PROVER], "circuit result environment is not exact")
            if not coincident(cp.expr.ty, r.value, c.value, IN_CIRCUIT):
                raise Violation(k, [Domain.PROVER], f"prover value {r.value!r} and circuit value {c.value!r} differ")
            if not env_coincident(cp.gamma, r.env, c.env, IN_CIRCUIT):
                raise Violation(k, [Domain.PROVER], "prover and circuit result environments differ")

    def _compile_env_exact(self, gamma, state, samples) -> bool:
        names = [b.name for b in gamma]
        if [n for n, _ in state.env] != names:
            return False
        nodes = state.builder.nodes
        return all(
            composite_exact(b.type, cv, nodes, self.N, samples) for b, (_, cv) in zip(gamma, state.env)
        )

    def _samples(self, state: CompileState) -> list:
        out = []
        for _ in range(2):
            out.append(InputAssignment(
                tuple(self.rng.randrange(self.N) for _ in range(state.prover)),
                tuple(self.rng.randrange(self.N) for _ in range(state.verifier)),
            ))
        return out

    def check_compile_exact(self):
        for k, state in enumerate(self.compile_states):
            cp = self.points[k]
            if not self._compile_env_exact(cp.gamma, state, self._samples(state)):
                raise Violation(k, [], "compile prefix environment is not exact")
            st = state.fork()
            r = compile_expr(cp.expr, st, self.inputs.public)
            if isinstance(r, Failure):
                if _vacuous_compile_failure(r):
                    continue
                raise Violation(k, [], f"compilation fails: {r.reason}")
            samples = self._samples(st)
            if not composite_exact(cp.expr.ty, r.value, st.builder.nodes, self.N, samples):
                raise Violation(k, [], f"compiled value {r.value!r} is not {cp.expr.ty}-exact")
            if not self._compile_env_exact(cp.gamma, st, samples):
                raise Violation(k, [], "compile result environment is not exact")

    def check_compile_correct(self):
        for pi in self.assignments:
            rows = self.pi_circuit_envs(pi)
            for k in range(min(len(rows), len(self.compile_states))):
                self._compile_correct_at(k, pi, rows[k], self.compile_states[k])

    def _compile_correct_at(self, k, pi, row, state):
        cp = self.points[k]
        cenv, streams = row
        nodes = state.builder.nodes
        try:
            values = input_values(nodes, self.N, [n for _, cv in state.env for n in _composite_nodes(cv)], pi)
        except MissingInput:
            return
        if not env_exact(cp.gamma, cenv, IN_CIRCUIT):
            raise Violation(k, [], "circuit prefix environment is not exact")
        if not all(sim(bullet_with(cv, values), v) for (_, cv), (_, v) in zip(state.env, cenv)):
            raise Violation(k, [], "compiled prefix environment does not match the circuit semantics")
        if not _stream_sim(_nu_bullet(state, pi), streams):
            raise Violation(k, [], "remaining circuit inputs do not match the remaining streams")
        st = state.fork()
        before = len(st.outputs)
        r = compile_expr(cp.expr, st, self.inputs.public)
        if isinstance(r, Failure):
            return
        outputs = st.outputs[before:]
        c = eval_circuit(cp.expr, cenv, self.inputs, streams)
        if isinstance(c, Failure) and c.kind in ("decode", "underflow"):
            return
        roots = list(outputs) + [n for _, cv in st.env for n in _composite_nodes(cv)] + list(_composite_nodes(r.value))
        try:
            values = input_values(st.builder.nodes, self.N, roots, pi)
        except MissingInput:
            return
        accepted = all(values[o] == 0 for o in outputs)
        if isinstance(c, Failure):
            if accepted:
                raise Violation(k, [], f"circuit accepts although the circuit semantics fails: {c.reason}")
            return
        if not accepted:
            raise Violation(k, [], "circuit rejects although the circuit semantics succeeds")
        if not all(sim(bullet_with(cv, values), v) for (_, cv), (_, v) in zip(st.env, c.env)):
            raise Violation(k, [], "compiled result environment does not match the circuit semantics")
        if not _stream_sim(_nu_bullet(st, pi), c.remaining):
            raise Violation(k, [], "compiler and circuit semantics consumed different inputs")
        q = cp.expr.ty
        if q.domain is Domain.PUBLIC or q.stage is Stage.POST:
            if not sim(bullet_with(r.value, values), c.value):
                raise Violation(k, [], f"compiled value does not match circuit value {c.value!r}")


def _composite_nodes(cv: Composite):
    v = cv.value
    if isinstance(v, tuple):
        for x in v:
            yield from _composite_nodes(x)
    elif v is TOP and cv.node is not TOP:
        yield cv.node


def make_scenario(tp: TypedProgram, inputs: Inputs, cfg=None, seed: int = 0) -> Scenario:
    """A scenario whose safety check perturbs inputs with fresh random values."""
    cfg = cfg or GenConfig(modulus=tp.modulus)
    perturbed = {}
    for d in (Domain.PUBLIC, Domain.VERIFIER):
        perturbed[d] = gen_inputs(cfg, tp, random.Random(seed * 7 + 1000 + int(d)))
    return Scenario(tp, inputs, seed, perturbed)


def check_theorem(name: str, tp: TypedProgram, inputs: Inputs, scenario: Optional[Scenario] = None):
    """Check one property; returns ``None`` on success or a :class:`Counterexample`."""
    if name not in THEOREMS:
        raise ValueError(f"unknown theorem {name!r}")
    sc = scenario or make_scenario(tp, inputs)
    v = sc.check(name)
    if v is None:
        return None
    return Counterexample(name, format_program(tp.program), inputs.to_json(), v.checkpoint, v.domains, v.details)


def check_all(tp: TypedProgram, inputs: Inputs, seed: int = 0, cfg=None) -> dict:
    """Every property on one program; maps theorem name to ``None`` or a counterexample."""
    sc = make_scenario(tp, inputs, cfg, seed)
    return {name: check_theorem(name, tp, inputs, sc) for name in THEOREMS}
