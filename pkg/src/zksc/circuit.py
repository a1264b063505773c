"""Arithmetic circuits over Z_N with a line-oriented text format.

Nodes live in an arena; a node may only refer to nodes with smaller ids, so
arena order is a topological order.  A circuit accepts an input assignment
when every output node evaluates to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

from .runtime import TOP
from .types import Domain


class Con(NamedTuple):
    value: int


class In(NamedTuple):
    domain: Domain
    index: int


class Op(NamedTuple):
    kind: str  # "add" or "mul"
    left: int
    right: int


Node = Union[Con, In, Op]


class InputAssignment(NamedTuple):
    prover: tuple = ()
    verifier: tuple = ()

    def of(self, d: Domain) -> tuple:
        return self.verifier if d is Domain.VERIFIER else self.prover


class CircuitError(ValueError):
    pass


class MissingInput(CircuitError):
    pass


class FormatError(CircuitError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Circuit:
    modulus: int
    nodes: tuple
    outputs: tuple
    inputs_prover: int = 0
    inputs_verifier: int = 0

    def __post_init__(self):
        validate(self.modulus, self.nodes, self.outputs, self.inputs_prover, self.inputs_verifier)

    def input_count(self, d: Domain) -> int:
        return self.inputs_verifier if d is Domain.VERIFIER else self.inputs_prover


def validate(modulus, nodes, outputs, n_prover, n_verifier):
    if modulus < 2:
        raise CircuitError("modulus must be at least 2")
    for i, node in enumerate(nodes):
        if isinstance(node, Con):
            if not 0 <= node.value < modulus:
                raise CircuitError(f"node {i}: constant {node.value} not in [0, {modulus})")
        elif isinstance(node, In):
            limit = n_verifier if node.domain is Domain.VERIFIER else n_prover
            if node.domain is Domain.PUBLIC:
                raise CircuitError(f"node {i}: inputs must be prover or verifier")
            if not 0 <= node.index < limit:
                raise CircuitError(f"node {i}: input index {node.index} out of range")
        elif isinstance(node, Op):
            if node.kind not in ("add", "mul"):
                raise CircuitError(f"node {i}: unknown operation {node.kind!r}")
            if not (0 <= node.left < i and 0 <= node.right < i):
                raise CircuitError(f"node {i}: operands must refer to earlier nodes")
        else:
            raise CircuitError(f"node {i}: not a circuit node")
    for o in outputs:
        if not 0 <= o < len(nodes):
            raise CircuitError(f"output {o} does not refer to a node")


@dataclass
class CircuitBuilder:
    """Append-only node arena used during compilation."""

    modulus: int
    nodes: list = field(default_factory=list)

    def add(self, node: Node) -> int:
        self.nodes.append(node)
        return len(self.nodes) - 1

    def con(self, v: int) -> int:
        return self.add(Con(v % self.modulus))

    def op(self, kind: str, left: int, right: int) -> int:
        return self.add(Op(kind, left, right))

    def input(self, d: Domain, k: int) -> int:
        return self.add(In(d, k))


# Evaluation.  Both evaluators only visit the nodes reachable from the query
# so an arena may hold nodes that are never used.


def _reachable(nodes: Sequence[Node], roots) -> list[int]:
    seen = set()
    stack = [r for r in roots]
    while stack:
        i = stack.pop()
        if i in seen:
            continue
        seen.add(i)
        node = nodes[i]
        if isinstance(node, Op):
            stack.append(node.left)
            stack.append(node.right)
    return sorted(seen)


def _evaluate(nodes, modulus, roots, leaf):
    values = {}
    for i in _reachable(nodes, roots):
        node = nodes[i]
        if isinstance(node, Con):
            values[i] = node.value
        elif isinstance(node, In):
            values[i] = leaf(node)
        else:
            a, b = values[node.left], values[node.right]
            if a is TOP or b is TOP:
                values[i] = TOP
            elif node.kind == "add":
                values[i] = (a + b) % modulus
            else:
                values[i] = (a * b) % modulus
    return values


def static_values(nodes, modulus, roots) -> dict:
    """``|c|`` for every node reachable from ``roots``; inputs are unknown."""
    return _evaluate(nodes, modulus, roots, lambda node: TOP)


def input_values(nodes, modulus, roots, pi: InputAssignment) -> dict:
    """``c(pi)`` for every node reachable from ``roots``."""

    def leaf(node):
        stream = pi.of(node.domain)
        if node.index >= len(stream):
            raise MissingInput(f"no {node.domain.name.lower()} input {node.index}")
        return stream[node.index] % modulus

    return _evaluate(nodes, modulus, roots, leaf)


def eval_static(node: int, circuit: Circuit):
    return static_values(circuit.nodes, circuit.modulus, [node])[node]


def eval_with_input(node: int, circuit: Circuit, pi: InputAssignment) -> int:
    return input_values(circuit.nodes, circuit.modulus, [node], pi)[node]


def accepts(circuit: Circuit, pi: InputAssignment) -> bool:
    for d in (Domain.PROVER, Domain.VERIFIER):
        if len(pi.of(d)) < circuit.input_count(d):
            raise MissingInput(
                f"{d.name.lower()} needs {circuit.input_count(d)} inputs, got {len(pi.of(d))}"
            )
    values = input_values(circuit.nodes, circuit.modulus, circuit.outputs, pi)
    return all(values[o] == 0 for o in circuit.outputs)


# Text format.

HEADER = "zksc-circuit 1"


def serialize(circuit: Circuit) -> str:
    lines = [
        HEADER,
        f"modulus {circuit.modulus}",
        f"inputs prover {circuit.inputs_prover}",
        f"inputs verifier {circuit.inputs_verifier}",
    ]
    for i, node in enumerate(circuit.nodes):
        if isinstance(node, Con):
            lines.append(f"node {i} con {node.value}")
        elif isinstance(node, In):
            lines.append(f"node {i} in {node.domain.name.lower()} {node.index}")
        else:
            lines.append(f"node {i} {node.kind} {node.left} {node.right}")
    lines.extend(f"output {o}" for o in circuit.outputs)
    return "\n".join(lines) + "\n"


def _nat(text: str, line: int) -> int:
    if not text.isdigit() or not text.isascii():
        raise FormatError(f"expected a natural number, found {text!r}", line)
    return int(text)


def deserialize(text: str) -> Circuit:
    if text and not text.endswith("\n"):
        raise FormatError("file must end with a newline", text.count("\n") + 1)
    lines = text.split("\n")[:-1] if text else []
    if len(lines) < 4:
        raise FormatError("truncated header", len(lines) + 1)
    if lines[0] != HEADER:
        raise FormatError(f"expected {HEADER!r}", 1)

    def header_value(k: int, prefix: list) -> int:
        words = lines[k].split(" ")
        if words[:-1] != prefix:
            raise FormatError(f"expected {' '.join(prefix)!r} header line", k + 1)
        return _nat(words[-1], k + 1)

    modulus = header_value(1, ["modulus"])
    n_prover = header_value(2, ["inputs", "prover"])
    n_verifier = header_value(3, ["inputs", "verifier"])
    nodes = []
    outputs = []
    for lineno, line in enumerate(lines[4:], start=5):
        words = line.split(" ")
        if words[0] == "node" and not outputs:
            if len(words) < 4:
                raise FormatError("malformed node line", lineno)
            if _nat(words[1], lineno) != len(nodes):
                raise FormatError(f"expected node id {len(nodes)}", lineno)
            kind, args = words[2], words[3:]
            if kind == "con" and len(args) == 1:
                nodes.append(Con(_nat(args[0], lineno)))
            elif kind == "in" and len(args) == 2 and args[0] in ("prover", "verifier"):
                nodes.append(In(Domain[args[0].upper()], _nat(args[1], lineno)))
            elif kind in ("add", "mul") and len(args) == 2:
                nodes.append(Op(kind, _nat(args[0], lineno), _nat(args[1], lineno)))
            else:
                raise FormatError(f"malformed {kind!r} node", lineno)
        elif words[0] == "output" and len(words) == 2:
            outputs.append(_nat(words[1], lineno))
        else:
            raise FormatError(f"unexpected line {line!r}", lineno)
    try:
        return Circuit(modulus, tuple(nodes), tuple(outputs), n_prover, n_verifier)
    except CircuitError as exc:
        raise FormatError(str(exc), len(lines)) from exc


class Stats(NamedTuple):
    linear: int
    nonlinear: int
    inputs_prover: int
    inputs_verifier: int

    def __str__(self) -> str:
        return (
            f"linear={self.linear} nonlinear={self.nonlinear} "
            f"inputs_prover={self.inputs_prover} inputs_verifier={self.inputs_verifier}"
        )


def stats(circuit: Circuit) -> Stats:
    """Gate counts: a mul is nonlinear when neither operand is a constant node."""
    linear = nonlinear = 0
    nodes = circuit.nodes
    for node in nodes:
        if isinstance(node, Con):
            linear += 1
        elif isinstance(node, Op):
            if node.kind == "add":
                linear += 1
            elif isinstance(nodes[node.left], Con) or isinstance(nodes[node.right], Con):
                linear += 1
            else:
                nonlinear += 1
    return Stats(linear, nonlinear, circuit.inputs_prover, circuit.inputs_verifier)
