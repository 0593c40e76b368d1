import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from adaptscan.errors import DSLSyntaxError, NonFiniteResult, UnboundSymbol
from adaptscan.expr import eval_expr, parse_expr, symbols, to_source


def ev(text, **b):
    return eval_expr(parse_expr(text), b)


def test_precedence_and_associativity():
    assert ev("1 + 2*3") == 7
    assert ev("(1 + 2)*3") == 9
    assert ev("8 - 3 - 2") == 3
    assert ev("8/4/2") == 1
    assert ev("2^3^2") == 2 ** 9
    assert ev("-2^2") == -4
    assert ev("pow(2, 0.5)") == pytest.approx(math.sqrt(2))


def test_equilibrium_residual_at_solution():
    assert ev("X_I - U_I", X_I=5.0, U_I=5.0) == 0.0


def test_saturated_buffer_residual():
    xc = 0.7 * 0.7 / 0.6
    assert abs(ev("X_C*k_CB - F_B*k_FBB", X_C=xc, k_CB=0.6, F_B=0.7, k_FBB=0.7)) < 1e-12


def test_division_by_zero():
    with pytest.raises(NonFiniteResult):
        ev("x/0", x=1.0)


def test_negative_power_of_zero():
    with pytest.raises(NonFiniteResult):
        ev("x^(-1)", x=0.0)


def test_unbound_symbol():
    with pytest.raises(UnboundSymbol) as exc:
        ev("a + b", a=1.0)
    assert exc.value.name == "b"


def test_symbols_in_order_of_appearance():
    assert symbols(parse_expr("b*a + pow(c, a) - b")) == ["b", "a", "c"]


@pytest.mark.parametrize("text", ["1 +", "(a", "a b", "pow(a)", "3 $ 4", ""])
def test_syntax_errors(text):
    with pytest.raises(DSLSyntaxError):
        parse_expr(text)


def test_syntax_error_position():
    with pytest.raises(DSLSyntaxError) as exc:
        parse_expr("a + * b", line=7)
    assert exc.value.line == 7
    assert exc.value.col == 5


_names = st.sampled_from(["a", "b", "c"])
_leaves = st.one_of(
    st.floats(min_value=0.1, max_value=10, allow_nan=False).map(lambda x: f"{x!r}"),
    _names,
)


def _combine(children):
    ops = st.sampled_from(["+", "-", "*", "/"])
    return st.one_of(
        st.tuples(children, ops, children).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        children.map(lambda c: f"-{c}"),
    )


_exprs = st.recursive(_leaves, _combine, max_leaves=8)


@given(_exprs)
def test_source_round_trip(text):
    e = parse_expr(text)
    assert parse_expr(to_source(e)) == e


@given(_exprs)
def test_round_trip_preserves_value(text):
    b = {"a": 1.7, "b": 0.3, "c": 2.9}
    e = parse_expr(text)
    try:
        v = eval_expr(e, b)
    except NonFiniteResult:
        return
    assert eval_expr(parse_expr(to_source(e)), b) == v
