import random
import xml.etree.ElementTree as ET

import pytest

from zksc import ast as A
from zksc import compile as C
from zksc import eval as E
from zksc.circuit import InputAssignment, accepts
from zksc.cli import tamper
from zksc.compile import compile_main
from zksc.conformance.__main__ import TrialResult, junit_xml, run_trials, summary
from zksc.conformance.generator import GenConfig, Generator, gen_inputs, gen_program, syntax_type
from zksc.conformance.shrink import shrink
from zksc.conformance.theorems import THEOREMS, Scenario, check_all, check_theorem, make_scenario, spine
from zksc.eval import Failure, eval_circuit, eval_local
from zksc.parser import parse_program
from zksc.printer import format_program
from zksc.runtime import TOP, Inputs, OutStreams, encode
from zksc.typecheck import typecheck_expr, typecheck_program
from zksc.types import Domain, Effect, ListType, QualType, Stage, UIntType, UnitType, stage_effect

from helpers import P61, typed_body


def test_leaf_fallback_at_depth_zero():
    g = Generator(GenConfig(seed=1), random.Random(1))
    q = QualType(UIntType(97), Stage.PRE, Domain.PUBLIC)
    e = g.expr((), q, Effect.UP_PUBLIC, 0, True)
    assert isinstance(e, A.NatLit)


def test_unit_target_can_produce_assert():
    kinds = set()
    for seed in range(200):
        g = Generator(GenConfig(seed=seed), random.Random(seed))
        e = g.expr((), QualType(UnitType(), Stage.PRE, Domain.PUBLIC), Effect.UP_PUBLIC, 3, True)
        kinds.add(type(e).__name__)
    assert "Assert" in kinds


def post_effect(q):
    eff = stage_effect(q.stage)
    if isinstance(q.data, ListType):
        eff |= post_effect(q.data.elem)
    return eff


def test_generated_exprs_have_exact_target_type():
    for seed in range(300):
        rng = random.Random(seed)
        g = Generator(GenConfig(seed=seed), rng)
        q = g.rand_type(True)
        # building a fresh $post value, even inside a list, has a public effect
        budget = rng.choice([b for b in Effect if b >= post_effect(q)])
        e = g.expr((), q, budget, 4, False)
        _, ty, eff = typecheck_expr((), e, None, 97)
        assert ty == q
        assert budget >= eff


def test_gen_inputs_factor(factor_tp):
    inputs = gen_inputs(GenConfig(modulus=P61), factor_tp)
    assert set(inputs.public) == {"fbw"}
    assert set(inputs.verifier) == {"z"}
    assert set(inputs.prover) == {"x"}


def test_gen_inputs_empty_program():
    assert gen_inputs(GenConfig(), typed_body("{ }", 97)) == Inputs()


def test_gen_inputs_list_shape():
    tp = typed_body('get_witness("k") : list[list[bool $pre @prover] $pre @prover] $pre @prover;', 97)
    for seed in range(20):
        v = gen_inputs(GenConfig(seed=seed), tp).prover["k"]
        assert isinstance(v, tuple) and all(isinstance(x, tuple) and all(type(b) is bool for b in x) for x in v)


def test_spine():
    tp = typed_body("let a = 1; let b = 2; a + b;", 97)
    points = spine(tp.body)
    assert [len(p.gamma) for p in points] == [0, 1, 2]
    assert isinstance(points[-1].expr, A.Seq)


@pytest.mark.parametrize("name", THEOREMS)
def test_factor_passes(name, factor_tp, factor_inputs):
    assert check_theorem(name, factor_tp, factor_inputs) is None


def test_factor_safety_perturbing_witness(factor_tp, factor_inputs):
    other = factor_inputs.replace(Domain.PROVER, {"x": 5})
    for d in (Domain.PUBLIC, Domain.VERIFIER):
        a = eval_local(d, factor_tp.body, (), factor_inputs)
        b = eval_local(d, factor_tp.body, (), other)
        assert a == b


def test_factor_tampered_pi_fails_both_ways(factor_tp, factor_inputs):
    local = eval_local(Domain.PROVER, factor_tp.body, (), factor_inputs)
    circuit = compile_main(factor_tp, factor_inputs.public, P61).state.circuit()
    honest = InputAssignment(tuple(map(encode, local.out.prover)), tuple(map(encode, local.out.verifier)))
    assert accepts(circuit, honest)
    bad = tamper(honest, [(Domain.PROVER, 0, 1)], P61)
    assert not accepts(circuit, bad)
    sem = eval_circuit(factor_tp.body, (), factor_inputs, OutStreams(bad.prover, bad.verifier))
    assert isinstance(sem, Failure)


def test_soundness_prover_verifier_on_generated():
    for seed in range(100):
        cfg = GenConfig(seed=seed)
        tp = typecheck_program(gen_program(cfg), 97)
        inputs = gen_inputs(cfg, tp)
        assert check_theorem("soundness", tp, inputs, make_scenario(tp, inputs, cfg, seed)) is None


def test_all_theorems_on_generated_programs():
    results = run_trials(GenConfig(seed=3), 60, shrink_failures=False)
    assert all(not r.failures for r in results), [r.failures for r in results if r.failures]


def test_unknown_theorem():
    with pytest.raises(ValueError):
        check_theorem("nonsense", typed_body("{ }", 97), Inputs())


# Fault injection: each deliberately broken component must be caught.


def run_checks(seeds=range(80)):
    hit = set()
    for seed in seeds:
        cfg = GenConfig(seed=seed)
        tp = typecheck_program(gen_program(cfg), 97)
        inputs = gen_inputs(cfg, tp)
        hit |= {k for k, v in check_all(tp, inputs, seed, cfg).items() if v}
    return hit


def _leaky_cast(self, e):
    c = self.run(e.body)
    return C.Composite(c.value, c.node if e.ty.stage is Stage.POST else TOP)


def _skip_verifier(self, e, v):
    if e.ty.domain is Domain.PROVER:
        self.prover.append(v)
    return v


FAULTS = {
    "compile keeps private values": (C.Compiler, "_Cast", _leaky_cast, {"compile-exact"}),
    "compile drops asserts": (C.Compiler, "_Assert", lambda self, e: (self.run(e.arg), C.Composite(C.UNIT, TOP))[1], {"compile-correct"}),
    "local view reads private inputs": (E.LocalInterpreter, "get_visible", lambda self, e: True, {"exactness", "safety"}),
    "local view reads private casts": (E.LocalInterpreter, "cast_visible", lambda self, e: True, {"exactness"}),
    "circuit view sees private literals": (E.CircuitInterpreter, "literal_visible", lambda self, e: True, {"correctness"}),
    "verifier wires not streamed": (E.LocalInterpreter, "wire", _skip_verifier, {"correctness"}),
}


@pytest.mark.parametrize("fault", list(FAULTS))
def test_fault_is_detected(fault, monkeypatch):
    cls, attr, impl, expected = FAULTS[fault]
    monkeypatch.setattr(cls, attr, impl)
    assert run_checks() & expected


def test_shrink_reduces_failing_program(monkeypatch):
    monkeypatch.setattr(C.Compiler, "_Assert", FAULTS["compile drops asserts"][2])
    for seed in range(200):
        cfg = GenConfig(seed=seed)
        tp = typecheck_program(gen_program(cfg), 97)
        inputs = gen_inputs(cfg, tp)
        if check_theorem("compile-correct", tp, inputs, make_scenario(tp, inputs, cfg, seed)):
            break
    else:
        pytest.fail("fault never observed")

    def still_fails(candidate):
        return check_theorem("compile-correct", candidate, inputs, make_scenario(candidate, inputs, cfg, seed)) is not None

    small = shrink(tp, still_fails)
    assert still_fails(small)
    assert A.size(small.body) < A.size(tp.body)
    assert parse_program(format_program(small.program)) == small.program


def test_report_formats():
    results = [TrialResult(0, 0, {}), TrialResult(1, 1, {"frame": "frame violated"})]
    text = summary(results)
    assert "frame            passed=1 failed=1" in text
    assert text.endswith("trials=2 checks=18 failures=1")
    root = ET.fromstring(junit_xml(results))
    assert root.get("tests") == "18" and root.get("failures") == "1"
    failing = [c for c in root if c.find("failure") is not None]
    assert [(c.get("classname"), c.get("name")) for c in failing] == [("trial1", "frame")]


def test_parallel_matches_serial():
    base = GenConfig(seed=9)
    serial = run_trials(base, 8, jobs=1, shrink_failures=False)
    parallel = run_trials(base, 8, jobs=2, shrink_failures=False)
    assert [(r.seed, r.failures) for r in serial] == [(r.seed, r.failures) for r in parallel]


def test_scenario_vacuous_on_prover_failure():
    tp = typed_body("assert(false as bool[N] $post @prover)", 97)
    sc = Scenario(tp, Inputs())
    for name in THEOREMS:
        assert sc.check(name) is None


def test_syntax_type_spells_modulus():
    assert str(syntax_type(QualType(UIntType(97), Stage.POST, Domain.PROVER))) == "uint[N] $post @prover"
