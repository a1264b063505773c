"""Command-line driver: check, fmt, compile, run, prove and conformance."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import ast as A
from .circuit import InputAssignment, MissingInput, accepts, serialize, stats
from .compile import compile_main, manifest
from .eval import Failure, eval_circuit, eval_local, value_type_ok, view_inputs
from .parser import ParseError, parse_program
from .printer import format_program
from .runtime import TOP, InputError, Inputs, OutStreams, allpure, encode, load_input_file
from .typecheck import TypeCheckErrors, TypedProgram, typecheck_program
from .types import Domain

DEFAULT_MODULUS = 2**61 - 1

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Bad arguments or unreadable files; exits with status 2."""


class Rejected(Exception):
    """The program or its run was rejected; exits with status 1."""


def _modulus(text: str) -> int:
    try:
        n = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n < 2:
        raise argparse.ArgumentTypeError("modulus must be at least 2")
    return n


def _warn_if_composite(n: int) -> None:
    import gmpy2

    if not gmpy2.is_prime(n):
        print(f"warning: modulus {n} is not prime", file=sys.stderr)


def load_program(path: str, modulus: int) -> TypedProgram:
    try:
        src = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror or exc}") from exc
    try:
        program = parse_program(src)
    except ParseError as exc:
        raise Rejected(f"{path}:{exc.pos.line}:{exc.pos.col}: error[SyntaxError]: {exc.message}") from exc
    try:
        return typecheck_program(program, modulus)
    except TypeCheckErrors as exc:
        raise Rejected("\n".join(err.format(path) for err in exc.errors)) from exc


def input_gets(tp: TypedProgram) -> list:
    return [node for node in A.walk(tp.body) if isinstance(node, A.Get)]


def validate_inputs(tp: TypedProgram, inputs: Inputs, visible: Domain) -> None:
    """Every input the view of ``visible`` reads exists and has its declared type."""
    for get in input_gets(tp):
        if get.domain > visible:
            continue
        values = inputs.of(get.domain)
        if get.key not in values:
            raise InputError(f"missing {get.domain.name.lower()} input {get.key!r}")
        if not value_type_ok(allpure(values[get.key]), get.ty):
            raise InputError(f"{get.domain.name.lower()} input {get.key!r} is not a value of type {get.ty}")


_FILES = {Domain.PUBLIC: "public", Domain.VERIFIER: "instance", Domain.PROVER: "witness"}


def load_inputs(args, tp: TypedProgram, visible: Domain) -> Inputs:
    parts = {}
    needed = {g.domain for g in input_gets(tp)}
    for d in Domain:
        path = getattr(args, _FILES[d], None)
        if d > visible or (path is None and d not in needed):
            parts[d] = {}
            continue
        if path is None:
            raise UsageError(f"the program reads {d.name.lower()} inputs: pass --{_FILES[d]}")
        try:
            parts[d] = load_input_file(path)
        except InputError as exc:
            raise UsageError(str(exc)) from exc
    inputs = Inputs(parts[Domain.PUBLIC], parts[Domain.VERIFIER], parts[Domain.PROVER])
    try:
        validate_inputs(tp, inputs, visible)
    except InputError as exc:
        raise UsageError(str(exc)) from exc
    return inputs


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror or exc}") from exc


def _stream_json(values) -> str:
    return json.dumps([encode(v) for v in values]) + "\n"


def cmd_check(args) -> int:
    load_program(args.program, args.modulus)
    print("ok")
    return EXIT_OK


def cmd_fmt(args) -> int:
    try:
        src = Path(args.program).read_text()
    except OSError as exc:
        raise UsageError(f"{args.program}: {exc.strerror or exc}") from exc
    try:
        print(format_program(parse_program(src)), end="")
    except ParseError as exc:
        raise Rejected(f"{args.program}:{exc.pos.line}:{exc.pos.col}: error[SyntaxError]: {exc.message}") from exc
    return EXIT_OK


def cmd_compile(args) -> int:
    tp = load_program(args.program, args.modulus)
    inputs = load_inputs(args, tp, Domain.PUBLIC)
    result = compile_main(tp, inputs.public, args.modulus)
    if isinstance(result, Failure):
        raise Rejected(result.format(args.program))
    circuit = result.state.circuit()
    out = Path(args.output) if args.output else Path(args.program).with_suffix(".circuit")
    _write(out, serialize(circuit))
    sidecar = out.with_name(out.name + ".manifest.json")
    _write(sidecar, json.dumps(manifest(result.state, args.program), indent=2) + "\n")
    print(stats(circuit))
    return EXIT_OK


def cmd_run(args) -> int:
    role = Domain[args.role.upper()]
    tp = load_program(args.program, args.modulus)
    inputs = load_inputs(args, tp, role)
    result = eval_local(role, tp.body, (), view_inputs(inputs, role))
    if isinstance(result, Failure):
        raise Rejected(result.format(args.program))
    outdir = Path(args.output or ".")
    if not outdir.is_dir():
        raise UsageError(f"{outdir}: not a directory")
    written = []
    for d in (Domain.PROVER, Domain.VERIFIER):
        if d > role:
            continue
        stream = result.out.of(d)
        if any(v is TOP for v in stream):
            raise RuntimeError(f"{d.name.lower()} stream has unknown entries in the {role.name.lower()} view")
        path = outdir / f"{d.name.lower()}.stream"
        _write(path, _stream_json(stream))
        written.append(str(path))
    for path in written:
        print(path)
    return EXIT_OK


def parse_tamper(text: str):
    try:
        dom, index, delta = text.split(":")
        d = Domain[dom.upper()]
        if d is Domain.PUBLIC:
            raise KeyError(dom)
        return d, int(index), int(delta)
    except (ValueError, KeyError):
        raise argparse.ArgumentTypeError(f"expected prover|verifier:INDEX:DELTA, got {text!r}")


def tamper(pi: InputAssignment, edits, modulus: int) -> InputAssignment:
    streams = {Domain.PROVER: list(pi.prover), Domain.VERIFIER: list(pi.verifier)}
    for d, i, delta in edits:
        if not 0 <= i < len(streams[d]):
            raise UsageError(f"cannot tamper with {d.name.lower()} input {i}: only {len(streams[d])} inputs")
        streams[d][i] = (streams[d][i] + delta) % modulus
    return InputAssignment(tuple(streams[Domain.PROVER]), tuple(streams[Domain.VERIFIER]))


def prove(tp: TypedProgram, inputs: Inputs, edits=(), filename: str = "<input>"):
    """Run the prover, compile, and check the circuit on the prover's wires.

    Returns ``(accepted, message)``.  Without tampering the verdict of the
    circuit must agree with the prover's run; any disagreement is a bug and
    raises ``RuntimeError``.
    """
    local = eval_local(Domain.PROVER, tp.body, (), inputs)
    if isinstance(local, Failure):
        return False, local.format(filename)
    compiled = compile_main(tp, inputs.public, tp.modulus)
    if isinstance(compiled, Failure):
        return False, compiled.format(filename)
    circuit = compiled.state.circuit()
    pi = InputAssignment(
        tuple(encode(v) for v in local.out.prover),
        tuple(encode(v) for v in local.out.verifier),
    )
    pi = tamper(pi, edits, tp.modulus)
    try:
        accepted = accepts(circuit, pi)
    except MissingInput as exc:
        raise RuntimeError(f"prover streams do not cover the circuit inputs: {exc}") from exc
    semantic = eval_circuit(tp.body, (), inputs, OutStreams(pi.prover, pi.verifier))
    if not (isinstance(semantic, Failure) and semantic.kind == "decode"):
        if accepted == isinstance(semantic, Failure):
            raise RuntimeError("circuit verdict disagrees with the circuit semantics")
    message = None if accepted else (semantic.format(filename) if isinstance(semantic, Failure) else None)
    return accepted, message


def cmd_prove(args) -> int:
    tp = load_program(args.program, args.modulus)
    inputs = load_inputs(args, tp, Domain.PROVER)
    accepted, message = prove(tp, inputs, args.tamper or (), args.program)
    if message:
        print(message, file=sys.stderr)
    print("ACCEPT" if accepted else "REJECT")
    return EXIT_OK if accepted else EXIT_FAIL


def cmd_conformance(args) -> int:
    from .conformance.__main__ import run_cli

    return run_cli(args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zksc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, inputs=True):
        p.add_argument("program", help="source file")
        p.add_argument("--modulus", type=_modulus, default=DEFAULT_MODULUS, help="field size N (default 2^61-1)")
        if inputs:
            p.add_argument("--public", help="public.json")
            p.add_argument("--instance", help="instance.json (verifier inputs)")
            p.add_argument("--witness", help="witness.json (prover inputs)")

    p = sub.add_parser("check", help="parse and typecheck")
    common(p, inputs=False)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("fmt", help="pretty-print a program")
    p.add_argument("program")
    p.set_defaults(func=cmd_fmt, modulus=DEFAULT_MODULUS)

    p = sub.add_parser("compile", help="emit the circuit and its input manifest")
    common(p)
    p.add_argument("-o", "--output", help="circuit file (default: PROGRAM.circuit)")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("run", help="evaluate in one domain and write the wire streams")
    common(p)
    p.add_argument("--role", choices=["public", "verifier", "prover"], default="prover")
    p.add_argument("-o", "--output", help="directory for the stream files (default: .)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("prove", help="run the prover and check the circuit on its wires")
    common(p)
    p.add_argument("--tamper", type=parse_tamper, action="append", metavar="D:I:DELTA",
                   help="add DELTA to input I of domain D before checking")
    p.set_defaults(func=cmd_prove)

    from .conformance.__main__ import add_arguments

    p = sub.add_parser("conformance", help="differential testing on generated programs")
    add_arguments(p)
    p.set_defaults(func=cmd_conformance, modulus=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.modulus is not None and args.command != "fmt":
        _warn_if_composite(args.modulus)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Rejected as exc:
        print(exc, file=sys.stderr)
        return EXIT_FAIL
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
