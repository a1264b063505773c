import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zksc.circuit import Con, In, InputAssignment, Op, accepts
from zksc.compile import (
    UNKNOWN,
    Composite,
    CompileState,
    allpuretop,
    bullet,
    compile_expr,
    compile_main,
    compile_program,
    manifest,
    sim,
    upd_c,
)
from zksc.conformance.generator import GenConfig, gen_inputs, gen_program
from zksc.eval import Failure
from zksc.runtime import TOP, UNIT, IndexOutOfBounds
from zksc.typecheck import typecheck_program
from zksc.types import Domain

from helpers import P61, check, typed_body

P = Domain.PROVER


def compile_src(src, public=None, modulus=P61, env=(), tenv=()):
    e, _, _ = check(src, tenv, modulus=modulus)
    st_ = CompileState.initial(modulus)
    st_.env = env
    return compile_expr(e, st_, public or {})


def test_true_literal_is_zero_node():
    r = compile_src("true as bool[N] $post @public")
    assert r.state.builder.nodes[r.value.node] == Con(0)
    assert r.value.value is True
    r = compile_src("false as bool[N] $post @prover")
    assert r.state.builder.nodes[r.value.node] == Con(1)
    assert r.value.value is TOP


def test_pre_literal_has_no_node():
    r = compile_src("3 as uint[N] $pre @public")
    assert r.value == Composite(3, TOP)


def test_wire_unknown_creates_input():
    r = compile_src('wire { get_witness("x") : uint[N] $pre @prover }')
    assert r.state.builder.nodes[r.value.node] == In(P, 0)
    assert (r.state.prover, r.state.verifier) == (1, 0)


def test_wire_known_creates_constant():
    r = compile_src("wire { 5 as uint[N] $pre @public }")
    assert r.state.builder.nodes[r.value.node] == Con(5)
    assert r.state.prover == r.state.verifier == 0


def test_assert_zero_adds_output():
    src = '{ let x = wire { get_witness("x") : uint[N] $pre @prover }; let y = wire { get_witness("y") : uint[N] $pre @prover }; assert_zero(x - y) }'
    r = compile_src(src)
    assert len(r.state.outputs) == 1
    c = r.state.circuit()
    assert accepts(c, InputAssignment((4, 4), ()))
    assert not accepts(c, InputAssignment((4, 5), ()))


def test_subtraction_lowering():
    src = '{ let x = wire { get_witness("x") : uint[N] $pre @prover }; x - x }'
    r = compile_src(src, modulus=97)
    nodes = r.state.builder.nodes
    top = nodes[r.value.node]
    assert top.kind == "add"
    neg = nodes[top.right]
    assert neg.kind == "mul" and nodes[neg.left] == Con(96)


def test_variables_share_nodes():
    src = '{ let x = wire { get_witness("x") : uint[N] $pre @prover }; x * x }'
    r = compile_src(src)
    top = r.state.builder.nodes[r.value.node]
    assert top == Op("mul", top.left, top.left)


def test_for_unrolls_inputs():
    src = 'for i in 0 .. 2 { wire { get_witness("w") : uint[N] $pre @prover } }'
    r = compile_src(src)
    nodes = r.state.builder.nodes
    assert [nodes[c.node] for c in r.value.value] == [In(P, 0), In(P, 1)]


def test_public_if_is_unrolled():
    r = compile_src('if get_public("b") : bool $pre @public { 1 } else { 2 }', {"b": False})
    assert r.value.value == 2


def test_get_public_allpuretop():
    r = compile_src('get_public("xs") : list[uint $pre @public] $pre @public', {"xs": (1, 2)})
    assert r.value == Composite((Composite(1, TOP), Composite(2, TOP)), TOP)


def test_out_of_bounds_fails():
    r = compile_src("{ let xs = for i in 0 .. 2 { i }; xs[5] }")
    assert isinstance(r, Failure) and r.kind == "runtime"


def test_allpuretop():
    assert allpuretop(3) == Composite(3, TOP)
    assert allpuretop((1, 2)) == Composite((Composite(1, TOP), Composite(2, TOP)), TOP)
    assert allpuretop(UNIT) == Composite(UNIT, TOP)


def test_upd_c():
    v = Composite(9, 4)
    assert upd_c(UNKNOWN, [], v) == v
    lst = Composite((Composite(1, 0), Composite(2, 1)), 7)
    assert upd_c(lst, [1], v) == Composite((Composite(1, 0), v), TOP)
    assert upd_c(UNKNOWN, [0], v) == UNKNOWN
    with pytest.raises(IndexOutOfBounds):
        upd_c(lst, [2], v)


def test_bullet_and_sim():
    tp = typed_body('let x : uint[N] $post @prover = wire { get_witness("x") }; assert_zero(x)')
    r = compile_main(tp, {}, P61)
    c = r.state.circuit()
    in_node = next(i for i, n in enumerate(c.nodes) if isinstance(n, In))
    assert bullet(Composite(True, 123), InputAssignment(), c) == 0
    assert bullet(Composite(TOP, in_node), InputAssignment((5,), ()), c) == 5
    assert bullet(UNKNOWN, InputAssignment(), c) is TOP
    assert sim(True, 0) and sim(False, 1) and not sim(1, 0)
    assert sim(TOP, TOP) and not sim(TOP, 0)
    assert sim((True, 3), (0, 3))


def test_assert_wire_true_program():
    tp = typed_body("assert(wire { true })")
    c = compile_program(tp, {}, P61)
    assert [c.nodes[o] for o in c.outputs] == [Con(0)]
    assert (c.inputs_prover, c.inputs_verifier) == (0, 0)
    assert accepts(c, InputAssignment())


def test_factor_compiles(factor_tp, factor_inputs):
    r = compile_main(factor_tp, factor_inputs.public, P61)
    c = r.state.circuit()
    assert c.inputs_prover >= 2 and c.inputs_verifier >= 1
    m = manifest(r.state, "factor.zksc")
    assert [e["domain"] for e in m].count("verifier") == c.inputs_verifier
    assert m[0] == {"domain": "verifier", "index": 0, "type": "uint", "file": "factor.zksc", "line": 6}


def test_private_loop_bound_rejected_by_checker():
    from zksc.typecheck import TypeCheckErrors

    with pytest.raises(TypeCheckErrors):
        typed_body('for i in 0 .. get_witness("n") : uint $pre @prover { assert(wire { true }) }')


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_input_indices_are_dense(seed):
    cfg = GenConfig(seed=seed)
    tp = typecheck_program(gen_program(cfg), 97)
    inputs = gen_inputs(cfg, tp)
    r = compile_main(tp, inputs.public, 97)
    if isinstance(r, Failure):
        assert r.kind == "runtime"
        return
    c = r.state.circuit()
    for d, n in ((Domain.PROVER, c.inputs_prover), (Domain.VERIFIER, c.inputs_verifier)):
        idx = sorted(node.index for node in c.nodes if isinstance(node, In) and node.domain is d)
        assert idx == list(range(n))


def test_determinism(factor_tp, factor_inputs):
    a = compile_program(factor_tp, factor_inputs.public, P61)
    b = compile_program(factor_tp, factor_inputs.public, P61)
    assert a == b


def test_empty_program():
    c = compile_program(typed_body("{ }"), {}, P61)
    assert c.nodes == () and c.outputs == ()
