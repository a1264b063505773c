import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zksc import ast as A
from zksc.conformance.generator import GenConfig, gen_program
from zksc.parser import ParseError, parse_expr, parse_program, parse_type
from zksc.printer import format_expr, format_program
from zksc.types import Domain, Stage

from helpers import main_of

SMALLEST = "fn main() -> () $pre @public { assert(wire { true }) }"


def test_smallest_program():
    p = parse_program(SMALLEST)
    assert len(p.functions) == 1
    assert p.main.body == A.Assert(A.Wire(A.BoolLit(True)))


def test_factor_shape(factor_source):
    body = parse_program(factor_source).main.body
    assert isinstance(body, A.Let) and isinstance(body.bound, A.Get)
    kinds = [type(n).__name__ for n in A.walk(body)]
    assert "Wire" in kinds and "AssertZero" in kinds and "For" in kinds


def test_unbalanced_brace():
    with pytest.raises(ParseError) as err:
        parse_program("fn main() {")
    assert err.value.pos is not None


@pytest.mark.parametrize(
    "src",
    [
        "fn main() -> () $pre @public { 1 + }",
        "fn main() -> () $pre @public { let = 3 }",
        "fn main() -> () $pre @public { -1 }",
        "fn main() -> () $pre @public { 1 < 2 < 3 }",
        "fn f() -> () $pre @public { }",
        "fn main() -> () $pre @public { } fn main() -> () $pre @public { }",
        "fn main(x : uint $pre @public) -> () $pre @public { }",
        "fn main() -> () $pre @public { } fn f(x : uint $pre @public, x : uint $pre @public) -> () $pre @public { }",
        "fn main() -> () $pre @public { let r = ref 1; }",
        "fn main[N : Nat]() -> () $pre @public { }",
        "fn main() -> () $pre @public { get_witness(\"k\") : uint $pre @D }",
        "fn main() -> () $pre @public { x # y }",
    ],
)
def test_errors_carry_positions(src):
    with pytest.raises(ParseError) as err:
        parse_program(src)
    line, col = err.value.pos
    assert line >= 1 and col >= 1


def test_precedence():
    e = parse_expr("1 + 2 * 3 == 7 && true || false")
    assert e.op == "||"
    assert e.lhs.op == "&&"
    assert e.lhs.lhs.op == "=="
    assert e.lhs.lhs.lhs.op == "+"
    assert e.lhs.lhs.lhs.rhs.op == "*"


def test_left_associative_subtraction():
    e = parse_expr("a - b - c")
    assert e.lhs == A.BinOp("-", A.Var("a"), A.Var("b"))


def test_cast_binds_tighter_than_arithmetic():
    e = parse_expr("x as $pre / y")
    assert e.op == "/" and isinstance(e.lhs, A.Cast) and e.lhs.target is Stage.PRE


def test_cast_targets():
    assert parse_expr("x as @prover").target is Domain.PROVER
    assert parse_expr("x as $post").target is Stage.POST
    assert parse_expr("x as uint[N] $post @verifier").target == parse_type("uint[N] $post @verifier")


def test_omitted_domain_is_public_and_omitted_stage_is_open():
    q = parse_type("uint[N]")
    assert q.domain is Domain.PUBLIC and q.stage is None


def test_blocks_desugar():
    assert parse_expr("{ }") == A.UnitLit()
    assert parse_expr("{ 1 }") == A.NatLit(1)
    assert parse_expr("{ 1; 2 }") == A.Seq(A.NatLit(1), A.NatLit(2))
    assert parse_expr("{ 1; }") == A.Seq(A.NatLit(1), A.UnitLit())
    let = parse_expr("{ let mut x : uint $pre @public = 1; x }")
    assert let == A.Let(True, "x", parse_type("uint $pre @public"), A.NatLit(1), A.Var("x"))


def test_if_without_else():
    assert parse_expr("if c { 1 }").orelse == A.UnitLit()


def test_else_if_chain():
    e = parse_expr("if a { 1 } else if b { 2 } else { 3 }")
    assert isinstance(e.orelse, A.If) and e.orelse.orelse == A.NatLit(3)


def test_lvalues():
    e = parse_expr("xs[i][j] = 3")
    assert isinstance(e, A.Assign)
    assert A.lvalue_root(e.lvalue) == A.Var("xs")
    assert A.lvalue_indices(e.lvalue) == [A.Var("i"), A.Var("j")]


def test_get_annotation_inherits_let_annotation():
    e = parse_expr('{ let x : uint $pre @prover = get_witness("x"); x }')
    assert e.bound.annotation == parse_type("uint $pre @prover")


def test_big_literals():
    n = 2**200 + 7
    assert parse_expr(str(n)) == A.NatLit(n)


def test_call_parses():
    e = parse_expr("length(xs, 1)")
    assert e == A.Call("length", (A.Var("xs"), A.NatLit(1)))


def test_positions():
    p = parse_program(main_of("    let x = 1;\n    x + y"))
    body = p.main.body
    assert body.pos == A.Pos(2, 5)
    assert body.rest.rhs.pos == A.Pos(3, 9)


def test_print_contains_literal():
    assert "0" in format_program(parse_program(main_of("0")))


def test_roundtrip_smallest():
    p = parse_program(SMALLEST)
    assert parse_program(format_program(p)) == p


def test_roundtrip_factor(factor_source):
    p = parse_program(factor_source)
    text = format_program(p)
    assert parse_program(text) == p
    assert format_program(parse_program(text)) == text


@pytest.mark.parametrize(
    "src",
    [
        "(1 + 2) * 3",
        "1 - (2 - 3)",
        "(a as @prover) - b",
        "(a + b) as uint[N] $post @prover",
        "xs[i + 1][0]",
        "if a < b { wire { x } } else { { } }",
        "for i in 0 .. n { xs[i] = i; }",
        "a || b && c",
        "(a || b) && c",
    ],
)
def test_expr_roundtrip(src):
    e = parse_expr(src)
    assert parse_expr(format_expr(e)) == e


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_roundtrip_generated(seed):
    p = gen_program(GenConfig(seed=seed))
    assert parse_program(format_program(p)) == p
