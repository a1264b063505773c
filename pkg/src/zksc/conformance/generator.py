"""Random well-typed programs and inputs.

Generation is type directed: every request names a target qualified type, an
effect budget the expression must stay within, and whether the checker will
pass the target down as a hint.  Bare literals are only produced where a hint
fixes their type; elsewhere they are wrapped in a cast to the exact target.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .. import ast as A
from ..runtime import UNIT, Inputs, allpure
from ..types import (
    BoolType,
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
    up,
)
from ..typecheck import Binding

DEFAULT_WEIGHTS = {
    "lit": 3.0,
    "var": 4.0,
    "get": 1.5,
    "arith": 3.0,
    "cmp": 1.5,
    "assert": 3.0,
    "assert_zero": 3.0,
    "wire": 4.0,
    "cast": 1.5,
    "if": 2.0,
    "for": 3.0,
    "load": 2.5,
    "assign": 2.5,
    "let": 4.0,
    "seq": 2.0,
}


@dataclass
class GenConfig:
    seed: int = 0
    max_depth: int = 5
    max_list_len: int = 4
    modulus: int = 97
    weights: dict = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    max_block: int = 4


def syntax_type(q: QualType) -> QualType:
    """Spell every modulus as ``N`` for printing."""
    return map_modulus(q, lambda m: "N")


class Generator:
    def __init__(self, cfg: GenConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng
        self.N = cfg.modulus
        self.names = 0
        self.keys = 0

    # helpers

    def fresh(self, prefix: str) -> str:
        self.names += 1
        return f"{prefix}{self.names}"

    def fresh_key(self) -> str:
        self.keys += 1
        return f"k{self.keys}"

    def chance(self, p: float) -> bool:
        return self.rng.random() < p

    def pick(self, options: dict):
        names = [k for k, w in options.items() if w > 0]
        weights = [options[k] for k in names]
        return self.rng.choices(names, weights)[0]

    def index_type(self, d: Domain) -> QualType:
        return QualType(UIntType(None), Stage.PRE, d)

    # types

    def rand_type(self, post_ok: bool, min_dom: Domain = Domain.PUBLIC, depth: int = 2) -> QualType:
        d = self.rng.choice([x for x in Domain if x >= min_dom])
        kinds = {"uintN": 4, "boolN": 2, "uint": 2, "bool": 1, "unit": 0.5, "list": 2 if depth > 0 else 0}
        kind = self.pick(kinds)
        if kind == "list":
            elem = self.rand_type(post_ok and d is Domain.PUBLIC, d, depth - 1)
            return QualType(ListType(elem), Stage.PRE, d)
        if kind == "unit":
            return QualType(UnitType(), Stage.PRE, d)
        if kind in ("uint", "bool"):
            data = UIntType(None) if kind == "uint" else BoolType(None)
            return QualType(data, Stage.PRE, d)
        data = UIntType(self.N) if kind == "uintN" else BoolType(self.N)
        stage = Stage.POST if post_ok and self.chance(0.5) else Stage.PRE
        return QualType(data, stage, d)

    # expressions

    def expr(self, env, q: QualType, budget: Effect, depth: int, hinted: bool, block: int = 0) -> A.Expr:
        options = self.options(env, q, budget, depth, block)
        kind = self.pick(options)
        return getattr(self, "gen_" + kind)(env, q, budget, depth, hinted, block)

    def options(self, env, q, budget, depth, block):
        w = self.cfg.weights
        t, s, d = q.data, q.stage, q.domain
        opts = {}
        scalar = isinstance(t, (UIntType, BoolType))
        if scalar or isinstance(t, UnitType):
            opts["lit"] = w["lit"]
        if any(b.type == q for b in env):
            opts["var"] = w["var"]
        if _allpre(q):
            opts["get"] = w["get"]
        if isinstance(t, ListType):
            opts["for"] = w["for"] if depth > 0 else 1.0
        if self.lvalue_paths(env, q, mutable_only=False, min_len=1):
            opts["load"] = w["load"]
        if depth <= 0:
            return opts
        public_unit = isinstance(t, UnitType) and d is Domain.PUBLIC
        if isinstance(t, UIntType):
            opts["arith"] = w["arith"]
        if isinstance(t, BoolType) and s is Stage.PRE:
            opts["cmp"] = w["cmp"]
        if public_unit and budget is Effect.UP_PUBLIC:
            opts["assert"] = w["assert"]
            opts["assert_zero"] = w["assert_zero"]
        if public_unit and self.assign_targets(env, budget):
            opts["assign"] = w["assign"]
        if scalar and t.bounded and s is Stage.POST:
            opts["wire"] = w["wire"]
        if self.cast_sources(q, budget):
            opts["cast"] = w["cast"]
        opts["if"] = w["if"]
        if block < self.cfg.max_block:
            if budget is not Effect.EMPTY:  # a let always has the effect of its bound's domain
                opts["let"] = w["let"]
            opts["seq"] = w["seq"]
        return opts

    def leaf_literal(self, q: QualType):
        t = q.data
        if isinstance(t, BoolType):
            return A.BoolLit(self.chance(0.5))
        if isinstance(t, UIntType):
            if t.bounded:
                n = self.rng.choice([0, 1, 2, 3, self.rng.randrange(self.N), self.N - 1])
            else:
                n = self.rng.randrange(self.cfg.max_list_len + 1)
            return A.NatLit(n)
        return A.UnitLit()

    def gen_lit(self, env, q, budget, depth, hinted, block):
        lit = self.leaf_literal(q)
        if isinstance(q.data, UnitType):
            return lit if q.domain is Domain.PUBLIC else A.Cast(lit, q.domain)
        default = QualType(type(q.data)(None), Stage.PRE, Domain.PUBLIC)
        if hinted or q == default:
            return lit
        return A.Cast(lit, syntax_type(q))

    def gen_var(self, env, q, budget, depth, hinted, block):
        return A.Var(self.rng.choice([b.name for b in env if b.type == q]))

    def gen_get(self, env, q, budget, depth, hinted, block):
        return A.Get(q.domain, self.fresh_key(), syntax_type(q))

    def gen_arith(self, env, q, budget, depth, hinted, block):
        ops = ["+", "*"]
        if q.data.bounded or self.chance(0.2):
            ops.append("-")
        if q.stage is Stage.PRE:
            ops += ["/", "%"]
        op = self.rng.choice(ops)
        lhs = self.expr(env, q, budget, depth - 1, hinted)
        rhs = self.expr(env, q, budget, depth - 1, True)
        if op in ("/", "%"):
            rhs = A.BinOp("+", rhs, A.NatLit(1))
        return A.BinOp(op, lhs, rhs)

    def gen_cmp(self, env, q, budget, depth, hinted, block):
        operand = UIntType if self.chance(0.6) else BoolType
        oq = QualType(operand(q.data.modulus), Stage.PRE, q.domain)
        ops = ["==", "<", "<="] if operand is UIntType else ["==", "&&", "||"]
        op = self.rng.choice(ops)
        lhs = self.expr(env, oq, budget, depth - 1, False)
        rhs = self.expr(env, oq, budget, depth - 1, True)
        return A.BinOp(op, lhs, rhs)

    def _assertion(self, env, budget, depth, data):
        d = self.rng.choice(list(Domain))
        q = QualType(data, Stage.POST, d)
        roll = self.rng.random()
        if roll < 0.15:
            lit = A.BoolLit(True) if isinstance(data, BoolType) else A.NatLit(0)
            return A.Cast(lit, syntax_type(q))
        arg = self.expr(env, q, budget, depth - 1, False)
        if isinstance(data, UIntType) and roll < 0.45:
            zero = A.Cast(A.NatLit(0), syntax_type(q))
            return A.BinOp("*", arg, zero) if self.chance(0.5) else A.BinOp("-", arg, _copy_pure(arg) or zero)
        return arg

    def gen_assert(self, env, q, budget, depth, hinted, block):
        return A.Assert(self._assertion(env, budget, depth, BoolType(self.N)))

    def gen_assert_zero(self, env, q, budget, depth, hinted, block):
        return A.AssertZero(self._assertion(env, budget, depth, UIntType(self.N)))

    def gen_wire(self, env, q, budget, depth, hinted, block):
        return A.Wire(self.expr(env, q.with_stage(Stage.PRE), budget, depth - 1, hinted))

    def cast_sources(self, q: QualType, budget: Effect):
        t = q.data
        stages = [Stage.POST, Stage.PRE] if q.stage is Stage.PRE else [Stage.POST]
        if not (isinstance(t, (UIntType, BoolType)) and t.bounded) or budget is not Effect.UP_PUBLIC:
            stages = [s for s in stages if s is Stage.PRE]
        out = []
        for s in stages:
            if s is Stage.PRE and q.stage is Stage.POST:
                continue
            for d in Domain:
                if d <= q.domain and (s, d) != (q.stage, q.domain):
                    out.append(QualType(t, s, d))
        return out

    def gen_cast(self, env, q, budget, depth, hinted, block):
        src = self.rng.choice(self.cast_sources(q, budget))
        body = self.expr(env, src, budget, depth - 1, False)
        if src.stage == q.stage:
            target = q.domain
        elif src.domain == q.domain:
            target = q.stage
        else:
            target = syntax_type(q)
        return A.Cast(body, target)

    def gen_if(self, env, q, budget, depth, hinted, block):
        guards = [g for g in Domain if g <= q.domain and (q.stage is Stage.PRE or g is Domain.PUBLIC)]
        g = self.rng.choice(guards)
        inner = Effect(min(budget, up(g)))
        modulus = self.N if self.chance(0.5) else None
        guard = self.expr(env, QualType(BoolType(modulus), Stage.PRE, g), budget, depth - 1, False)
        then = self.expr(env, q, inner, depth - 1, hinted)
        orelse = self.expr(env, q, inner, depth - 1, True)
        return A.If(guard, then, orelse)

    def loop_bounds(self, env, d: Domain):
        lo_val = self.rng.randrange(3)
        count = self.rng.randrange(self.cfg.max_list_len + 1)

        def lit(n):
            return A.NatLit(n) if d is Domain.PUBLIC else A.Cast(A.NatLit(n), d)

        index_vars = [b.name for b in env if b.type == self.index_type(d) and not b.mutable]
        roll = self.rng.random()
        if roll < 0.15:
            key_type = self.index_type(d)
            return lit(0), A.Get(d, self.fresh_key(), syntax_type(key_type))
        if roll < 0.3 and index_vars:
            v = A.Var(self.rng.choice(index_vars))
            return v, A.BinOp("+", A.Var(v.name), A.NatLit(count))
        return lit(lo_val), lit(lo_val + count)

    def gen_for(self, env, q, budget, depth, hinted, block):
        d = q.domain
        var = self.fresh("i")
        lo, hi = self.loop_bounds(env, d)
        inner = env + (Binding(var, self.index_type(d), False),)
        body_budget = Effect(min(budget, up(d)))
        body = self.expr(inner, q.data.elem, body_budget, depth - 1, hinted)
        return A.For(var, lo, hi, body)

    def lvalue_paths(self, env, q, mutable_only: bool, min_len: int):
        """``(name, list_domains, element_type)`` for lvalues whose element type is ``q``."""
        paths = []
        for b in env:
            if mutable_only and not b.mutable:
                continue
            cur = b.type
            domains = []
            while True:
                if len(domains) >= min_len and (q is None or cur == q):
                    paths.append((b.name, tuple(domains), cur))
                if not isinstance(cur.data, ListType):
                    break
                domains.append(cur.domain)
                cur = cur.data.elem
        return paths

    def index_expr(self, env, d: Domain):
        vars_ = [b.name for b in env if b.type == self.index_type(d)]
        if vars_ and self.chance(0.4):
            return A.Var(self.rng.choice(vars_))
        return A.NatLit(self.rng.randrange(max(1, self.cfg.max_list_len - 1)))

    def lvalue(self, env, name, domains):
        e = A.Var(name)
        for d in domains:
            e = A.Load(e, self.index_expr(env, d))
        return e

    def gen_load(self, env, q, budget, depth, hinted, block):
        name, domains, _ = self.rng.choice(self.lvalue_paths(env, q, False, 1))
        return self.lvalue(env, name, domains)

    def assign_targets(self, env, budget):
        return [
            p for p in self.lvalue_paths(env, None, True, 0)
            if stage_effect(p[2].stage) | up(p[2].domain) <= budget
        ]

    def gen_assign(self, env, q, budget, depth, hinted, block):
        name, domains, elem = self.rng.choice(self.assign_targets(env, budget))
        rhs = self.expr(env, elem, budget, depth - 1, True)
        return A.Assign(self.lvalue(env, name, domains), rhs)

    def gen_let(self, env, q, budget, depth, hinted, block):
        min_dom = Domain(3 - int(budget))
        q1 = self.rand_type(budget is Effect.UP_PUBLIC, min_dom)
        annotated = self.chance(0.75)
        bound = self.expr(env, q1, budget, depth - 1, annotated)
        var = self.fresh("v")
        mutable = self.chance(0.4)
        inner = env + (Binding(var, q1, mutable),)
        rest = self.expr(inner, q, budget, depth, hinted, block + 1)
        ann = syntax_type(q1) if annotated else None
        if ann is not None and isinstance(bound, A.Get):
            bound.annotation = ann
        return A.Let(mutable, var, ann, bound, rest)

    def gen_seq(self, env, q, budget, depth, hinted, block):
        q1 = self.rand_type(budget is Effect.UP_PUBLIC)
        first = self.expr(env, q1, budget, depth - 1, False)
        rest = self.expr(env, q, budget, depth, hinted, block + 1)
        return A.Seq(first, rest)

    def program(self) -> A.Program:
        q = self.rand_type(True, depth=1)
        if self.chance(0.5):
            q = QualType(UnitType(), Stage.PRE, Domain.PUBLIC)
        body = self.top_block(q)
        return A.Program((A.FunDef("main", (), syntax_type(q), body),))

    def top_block(self, q: QualType) -> A.Expr:
        """A let-heavy spine so that programs have several checkpoints."""
        depth = self.cfg.max_depth
        n = self.rng.randint(1, self.cfg.max_block)
        env = ()

        def build(env, k):
            if k == 0:
                return self.expr(env, q, Effect.UP_PUBLIC, depth, True, self.cfg.max_block)
            if self.chance(0.75):
                q1 = self.rand_type(True)
                annotated = self.chance(0.75)
                bound = self.expr(env, q1, Effect.UP_PUBLIC, depth - 1, annotated)
                var = self.fresh("v")
                mutable = self.chance(0.4)
                ann = syntax_type(q1) if annotated else None
                if ann is not None and isinstance(bound, A.Get):
                    bound.annotation = ann
                rest = build(env + (Binding(var, q1, mutable),), k - 1)
                return A.Let(mutable, var, ann, bound, rest)
            first = self.expr(env, QualType(UnitType(), Stage.PRE, Domain.PUBLIC), Effect.UP_PUBLIC, depth - 1, False)
            return A.Seq(first, build(env, k - 1))

        return build(env, n)


def _allpre(q: QualType) -> bool:
    return allpre(q.domain, q)


def _copy_pure(e: A.Expr):
    """A copy of ``e`` when duplicating it cannot change the program's effects."""
    if all(isinstance(n, (A.Var, A.NatLit, A.BoolLit, A.BinOp, A.Cast)) for n in A.walk(e)):
        return e
    return None


def gen_program(cfg: GenConfig, rng: random.Random | None = None) -> A.Program:
    return Generator(cfg, rng or random.Random(cfg.seed)).program()


def random_value(q: QualType, cfg: GenConfig, rng: random.Random):
    t = q.data
    if isinstance(t, UIntType):
        if t.bounded:
            return rng.choice([0, 1, rng.randrange(t.modulus), rng.randrange(t.modulus)])
        return rng.randrange(cfg.max_list_len + 1)
    if isinstance(t, BoolType):
        return rng.random() < 0.5
    if isinstance(t, ListType):
        return tuple(random_value(t.elem, cfg, rng) for _ in range(rng.randrange(cfg.max_list_len + 1)))
    return UNIT


def gen_inputs(cfg: GenConfig, program, rng: random.Random | None = None) -> Inputs:
    """Type-correct inputs for every ``get`` in a typechecked program."""
    rng = rng or random.Random(cfg.seed * 1_000_003 + 17)
    parts = {d: {} for d in Domain}
    for node in A.walk(program.body):
        if isinstance(node, A.Get) and node.key not in parts[node.domain]:
            parts[node.domain][node.key] = allpure(random_value(node.ty, cfg, rng))
    return Inputs(parts[Domain.PUBLIC], parts[Domain.VERIFIER], parts[Domain.PROVER])
