import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conekit.errors import EvaluationError, ExprSyntaxError
from conekit.expr import Binary, Const, Unary, Var, compile_expr, evaluate_expr, parse_expr, to_text


def test_examples():
    assert evaluate_expr(parse_expr("x1^2 + t"), [[2.0, 0.0]], [3.0])[0] == 7.0
    assert evaluate_expr(parse_expr("exp(-t)*x2"), [[0.0, 1.0]], [0.0])[0] == 1.0
    f = compile_expr("sqrt(abs(x1)) + cos(x2) * sin(t)")
    x = np.array([[4.0, 0.0], [1.0, np.pi]])
    assert np.allclose(f(x, np.array([np.pi / 2, 0.0])), [3.0, 1.0])


def test_syntax_error_position():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("x1 + * t")
    assert (info.value.line, info.value.col) == (1, 6)
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("t + foo(x1)")
    assert info.value.col == 5
    with pytest.raises(ExprSyntaxError):
        parse_expr("(x1 + t")
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("x1 +\n  $")
    assert info.value.line == 2


def test_precedence():
    assert parse_expr("-x1^2") == Unary("neg", Binary("^", Var("x1"), Const(2.0)))
    assert parse_expr("2^3^2") == Binary("^", Const(2.0), Binary("^", Const(3.0), Const(2.0)))
    assert parse_expr("1 - 2 - 3") == Binary("-", Binary("-", Const(1.0), Const(2.0)), Const(3.0))
    v = evaluate_expr(parse_expr("-t^2 + 2^3^2 / 8"), [[0.0, 0.0]], [3.0])[0]
    assert v == -9.0 + 512.0 / 8


def test_evaluation_errors():
    with pytest.raises(EvaluationError):
        evaluate_expr(parse_expr("sqrt(x1)"), [[-1.0, 0.0]], [0.5])
    with pytest.raises(EvaluationError):
        evaluate_expr(parse_expr("1 / t"), [[0.0, 0.0]], [0.0])
    with pytest.raises(EvaluationError):
        evaluate_expr(parse_expr("x3 + t"), [[0.0, 0.0]], [0.5])
    with pytest.raises(EvaluationError):
        evaluate_expr(parse_expr("x1^0.5"), [[-1.0, 0.0]], [0.5])


def test_constant_broadcasts():
    out = evaluate_expr(parse_expr("2"), np.zeros((4, 2)), np.zeros(4))
    assert out.shape == (4,) and np.all(out == 2.0)


_leaf = st.one_of(
    st.floats(min_value=0, max_value=1e6, allow_nan=False, allow_infinity=False).map(Const),
    st.sampled_from(["x1", "x2", "x3", "t"]).map(Var),
)


def _extend(children):
    return st.one_of(
        st.tuples(st.sampled_from(["neg", "exp", "sin", "cos", "sqrt", "abs"]), children).map(lambda a: Unary(*a)),
        st.tuples(st.sampled_from(["+", "-", "*", "/", "^"]), children, children).map(lambda a: Binary(*a)),
    )


@settings(max_examples=200, deadline=None)
@given(st.recursive(_leaf, _extend, max_leaves=12))
def test_to_text_round_trip(node):
    assert parse_expr(to_text(node)) == node
