"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line with its measured time,
then asserts.  Run with ``pytest -v tests/test_acceptance.py``.
"""

import json
import shutil
import time

import pytest

from zksc.circuit import Con, InputAssignment, accepts, deserialize, serialize, stats
from zksc.cli import main
from zksc.compile import compile_main
from zksc.conformance.__main__ import run_trials, summary
from zksc.conformance.generator import GenConfig, gen_inputs, gen_program
from zksc.conformance.theorems import THEOREMS
from zksc.eval import Failure, eval_local
from zksc.runtime import encode
from zksc.typecheck import typecheck_program
from zksc.types import Domain

from helpers import P61, typed_body


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, seconds, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({seconds:.2f}s)"
        if detail:
            line += f" -- {detail}"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return emit


@pytest.fixture
def work(tmp_path, monkeypatch, factor_paths):
    for name, path in factor_paths.items():
        shutil.copy(path, tmp_path / ("factor.zksc" if name == "program" else f"{name}.json"))
    monkeypatch.chdir(tmp_path)
    return tmp_path


FACTOR_ARGS = ["factor.zksc", "--public", "public.json", "--instance", "instance.json", "--witness", "witness.json"]


def timed(fn):
    start = time.perf_counter()
    result = fn()
    return result, time.perf_counter() - start


def generated(count, seed=0):
    """Typed generated programs (N = 97) with their inputs."""
    for trial in range(count):
        cfg = GenConfig(seed=seed * 100_003 + trial, max_depth=5, max_list_len=4, modulus=97)
        tp = typecheck_program(gen_program(cfg), 97)
        yield tp, gen_inputs(cfg, tp)


def test_factor_end_to_end(work, capsys, report):
    honest, t_honest = timed(lambda: main(["prove", *FACTOR_ARGS]))
    out = capsys.readouterr()
    honest_ok = honest == 0 and out.out.strip() == "ACCEPT"

    (work / "witness.json").write_text('{"x": 12}')
    bad, t_bad = timed(lambda: main(["prove", *FACTOR_ARGS]))
    out = capsys.readouterr()
    bad_ok = bad == 1 and out.out.strip() == "REJECT" and "error[AssertionFailed]: assert_zero failed" in out.err
    bad_run, _ = timed(lambda: main(["run", *FACTOR_ARGS, "--role", "prover"]))
    run_err = capsys.readouterr().err
    run_ok = bad_run == 1 and "factor.zksc:9:5" in run_err

    ok = honest_ok and bad_ok and run_ok and t_honest < 1.0 and t_bad < 1.0
    detail = f"x=11 exit {honest} in {t_honest:.3f}s; x=12 exit {bad} in {t_bad:.3f}s"
    report(1, "factor ACCEPT with x=11, prover failure at assert_zero with x=12", ok, t_honest + t_bad, detail)


def test_tamper_rejection(work, capsys, report):
    main(["run", *FACTOR_ARGS, "--role", "prover"])
    capsys.readouterr()
    sizes = {d: len(json.loads((work / f"{d}.stream").read_text())) for d in ("prover", "verifier")}
    start = time.perf_counter()
    rejected = total = 0
    for dom, n in sizes.items():
        for i in range(n):
            code = main(["prove", *FACTOR_ARGS, "--tamper", f"{dom}:{i}:+1"])
            total += 1
            rejected += code == 1 and capsys.readouterr().out.strip() == "REJECT"
    elapsed = time.perf_counter() - start
    ok = rejected == total > 0 and elapsed < 5.0
    report(2, "every single +1 tamper of the honest factor inputs is rejected", ok, elapsed, f"{rejected}/{total} rejected")


def test_metatheorem_suite(report):
    results, elapsed = timed(lambda: run_trials(GenConfig(seed=0, max_depth=5, max_list_len=4, modulus=97), 300))
    failures = sum(len(r.failures) for r in results)
    ok = len(results) == 300 and failures == 0 and elapsed < 60.0
    detail = f"{len(results)} programs x {len(THEOREMS)} checks, {failures} failures"
    if failures:
        detail += "\n" + summary(results)
    report(3, "300 generated programs pass all nine theorem checks", ok, elapsed, detail)


def test_boolean_encoding(report):
    def go():
        tp = typed_body("assert(wire { true })")
        c = compile_main(tp, {}, P61).state.circuit()
        return c, accepts(c, InputAssignment())

    (c, accepted), elapsed = timed(go)
    ok = len(c.outputs) == 1 and c.nodes[c.outputs[0]] == Con(0) and accepted
    report(4, "assert(wire{true}) has the single output Con 0 and accepts the empty input", ok, elapsed)


def factor_circuit(factor_tp, factor_inputs):
    return compile_main(factor_tp, factor_inputs.public, P61).state.circuit()


def generated_circuits(count):
    out = []
    for tp, inputs in generated(10 * count):
        r = compile_main(tp, inputs.public, 97)
        if not isinstance(r, Failure) and r.state.builder.nodes:
            out.append(r.state.circuit())
            if len(out) == count:
                break
    return out


def test_serialization_roundtrip(factor_tp, factor_inputs, report):
    def go():
        circuits = [factor_circuit(factor_tp, factor_inputs)] + generated_circuits(50)
        good = sum(deserialize(serialize(c)) == c for c in circuits)
        return circuits, good

    (circuits, good), elapsed = timed(go)
    ok = len(circuits) == 51 and good == 51
    report(5, "serialize/deserialize is exact on the factor circuit and 50 generated circuits", ok, elapsed, f"{good}/{len(circuits)} exact")


def recount_nonlinear(text: str) -> int:
    """Multiplications whose operands are both non-constant, read straight off the file."""
    kinds = {}
    count = 0
    for line in text.splitlines():
        words = line.split()
        if words[0] != "node":
            continue
        kinds[words[1]] = words[2]
        if words[2] == "mul" and kinds[words[3]] != "con" and kinds[words[4]] != "con":
            count += 1
    return count


def test_nonlinear_count(factor_tp, factor_inputs, report):
    def go():
        rows = []
        for c in [factor_circuit(factor_tp, factor_inputs)] + generated_circuits(50):
            rows.append((stats(c).nonlinear, recount_nonlinear(serialize(c))))
        return rows

    rows, elapsed = timed(go)
    mismatches = [r for r in rows if r[0] != r[1]]
    ok = not mismatches and rows[0][0] > 0
    detail = f"factor nonlinear={rows[0][0]}, {len(rows) - len(mismatches)}/{len(rows)} circuits agree"
    report(6, "stats nonlinear count equals a brute-force recount of the emitted file", ok, elapsed, detail)


def test_honest_streams_are_the_circuit_input(factor_tp, factor_inputs):
    # the prover's encoded streams are exactly what the circuit consumes
    local = eval_local(Domain.PROVER, factor_tp.body, (), factor_inputs)
    c = factor_circuit(factor_tp, factor_inputs)
    pi = InputAssignment(tuple(map(encode, local.out.prover)), tuple(map(encode, local.out.verifier)))
    assert (len(pi.prover), len(pi.verifier)) == (c.inputs_prover, c.inputs_verifier)
    assert accepts(c, pi)
