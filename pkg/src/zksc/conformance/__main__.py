"""Differential conformance runs over generated programs.

    python -m zksc.conformance --seed 0 --trials 300 --depth 5 [--junit out.xml]
"""

from __future__ import annotations

import argparse
import sys
import time
import xml.etree.ElementTree as ET
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from ..printer import format_program
from ..typecheck import typecheck_program
from .generator import GenConfig, gen_inputs, gen_program
from .shrink import shrink
from .theorems import THEOREMS, check_all, check_theorem, make_scenario


@dataclass
class TrialResult:
    trial: int
    seed: int
    failures: dict = field(default_factory=dict)  # theorem -> counterexample text
    seconds: float = 0.0


def trial_config(base: GenConfig, trial: int) -> GenConfig:
    return GenConfig(
        seed=base.seed * 100_003 + trial,
        max_depth=base.max_depth,
        max_list_len=base.max_list_len,
        modulus=base.modulus,
        weights=dict(base.weights),
    )


def run_trial(base: GenConfig, trial: int, shrink_failures: bool = True) -> TrialResult:
    start = time.perf_counter()
    cfg = trial_config(base, trial)
    program = gen_program(cfg)
    tp = typecheck_program(program, cfg.modulus)
    inputs = gen_inputs(cfg, tp)
    results = check_all(tp, inputs, seed=cfg.seed, cfg=cfg)
    failures = {}
    for name, cex in results.items():
        if cex is None:
            continue
        if shrink_failures:
            def still_fails(candidate, name=name):
                sc = make_scenario(candidate, inputs, cfg, cfg.seed)
                return check_theorem(name, candidate, inputs, sc) is not None

            small = shrink(tp, still_fails)
            cex = check_theorem(name, small, inputs, make_scenario(small, inputs, cfg, cfg.seed)) or cex
        failures[name] = str(cex)
    return TrialResult(trial, cfg.seed, failures, time.perf_counter() - start)


def _run(args):
    return run_trial(*args)


def run_trials(base: GenConfig, trials: int, jobs: int = 1, shrink_failures: bool = True) -> list[TrialResult]:
    work = [(base, t, shrink_failures) for t in range(trials)]
    if jobs <= 1:
        return [_run(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run, work, chunksize=4))


def junit_xml(results: list[TrialResult]) -> str:
    failures = sum(len(r.failures) for r in results)
    suite = ET.Element(
        "testsuite",
        name="zksc-conformance",
        tests=str(len(results) * len(THEOREMS)),
        failures=str(failures),
        time=f"{sum(r.seconds for r in results):.3f}",
    )
    for r in results:
        for name in THEOREMS:
            case = ET.SubElement(suite, "testcase", classname=f"trial{r.trial}", name=name)
            if name in r.failures:
                fail = ET.SubElement(case, "failure", message=f"{name} violated")
                fail.text = r.failures[name]
    return ET.tostring(suite, encoding="unicode") + "\n"


def summary(results: list[TrialResult]) -> str:
    lines = []
    for name in THEOREMS:
        failed = sum(1 for r in results if name in r.failures)
        lines.append(f"{name:<16} passed={len(results) - failed} failed={failed}")
    total = sum(len(r.failures) for r in results)
    lines.append(f"trials={len(results)} checks={len(results) * len(THEOREMS)} failures={total}")
    return "\n".join(lines)


def add_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=300)
    p.add_argument("--depth", type=int, default=5)
    p.add_argument("--list-len", type=int, default=4)
    p.add_argument("--modulus", dest="conf_modulus", type=int, default=97,
                   help="modulus for generated programs (default 97)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--junit", help="write a JUnit XML report here")
    p.add_argument("--no-shrink", action="store_true")
    p.add_argument("--show", action="store_true", help="print each generated program")


def run_cli(args) -> int:
    base = GenConfig(seed=args.seed, max_depth=args.depth, max_list_len=args.list_len, modulus=args.conf_modulus)
    if args.show:
        for t in range(args.trials):
            print(format_program(gen_program(trial_config(base, t))))
        return 0
    results = run_trials(base, args.trials, args.jobs, not args.no_shrink)
    for r in results:
        for name, text in r.failures.items():
            print(f"FAIL trial {r.trial} (seed {r.seed}): {text}\n")
    print(summary(results))
    if args.junit:
        with open(args.junit, "w") as fh:
            fh.write(junit_xml(results))
    return 1 if any(r.failures for r in results) else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="zksc-conformance", description="differential conformance testing")
    add_arguments(parser)
    return run_cli(parser.parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
