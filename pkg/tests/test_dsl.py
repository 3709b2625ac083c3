import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from htd import HTDError, ParseError, build, canonical, format_expr, parse
from htd.distributions import format_number

# -- generators of canonical expressions ------------------------------------

pos_num = st.sampled_from([0.25, 0.5, 0.8, 1, 1.5, 2, 3, 10]).map(format_number)
unit_num = st.sampled_from([0.1, 0.25, 0.5, 0.75, 0.9]).map(format_number)

leaf = st.one_of(
    st.builds("pareto({})".format, pos_num),
    st.builds("frechet({})".format, pos_num),
    st.builds("lomax({})".format, pos_num),
    st.just("logcauchy()"),
    st.just("paper(EX_V_NOT_H)"),
    st.builds("paper(FN_FAMILY, {})".format, st.sampled_from(["1", "10", "1000"])),
    st.just("piecewise_eta((0, 0), (1, 0.5), (3, 0.5), (4, 1))"),
)


def _mixture(pair):
    (w, a), b = pair
    return f"mixture({format_number(w)}:{a}, {format_number(round(1 - w, 10))}:{b})"


def extend(children):
    return st.one_of(
        st.builds("powcdf({}, {})".format, children, pos_num),
        st.builds("powsurv({}, {})".format, children, unit_num),
        st.builds("scale({}, {})".format, children, pos_num),
        st.builds("maxof({}, {})".format, children, children),
        st.builds("excess({}, {})".format, children, pos_num),
        st.builds("convexmap({}, pow({}))".format, children, st.sampled_from(["1.5", "2", "3"])),
        st.builds(lambda w, a, b: _mixture(((w, a), b)), st.sampled_from([0.2, 0.5, 0.7]), children, children),
    )


expressions = st.recursive(leaf, extend, max_leaves=4)


@settings(max_examples=100, deadline=None)
@given(expr=expressions)
def test_round_trip(expr):
    tree = parse(expr)
    assert format_expr(tree) == expr
    assert parse(format_expr(tree)) == tree


@settings(max_examples=100, deadline=None)
@given(expr=expressions)
def test_build_serializes_back(expr):
    F = build(expr)
    assert F.to_dsl() == expr
    x = np.geomspace(0.5, 50, 7)
    assert np.allclose(build(F.to_dsl()).survival(x), F.survival(x), rtol=0, atol=0)


@settings(max_examples=100, deadline=None)
@given(expr=expressions, data=st.data())
def test_whitespace_is_insignificant(expr, data):
    noisy = expr.replace(", ", data.draw(st.sampled_from([",", " ,  ", ",\t"]))).replace("(", "( ")
    assert canonical(noisy) == expr


@pytest.mark.parametrize(
    "text",
    [
        "mixture(0.3:pareto(1), 0.7:lomax(2))",
        "convexmap(frechet(1), poly((0, 0), (1, 1), (2, 3)))",
        "compound_binomial(2, 0.5, pareto(1))",
        "excess_rand(pareto(1), lomax(1))",
        "sum2(pareto(1))",
        "trunc(pareto(0.5), 100)",
        "cond(lomax(1), 2)",
        "shift(frechet(1), 1)",
        "uniform(0, 1)",
    ],
)
def test_fixed_round_trips(text):
    assert canonical(text) == text
    assert build(text).to_dsl() == text


def test_number_normalization():
    assert canonical("pareto( 1.50 )") == "pareto(1.5)"
    assert canonical("pareto(2.0)") == "pareto(2)"


@pytest.mark.parametrize(
    "text,code,offset",
    [
        ("pareto(1", "SYNTAX", 8),
        ("pareto(1))", "SYNTAX", 9),
        ("pareto(x)", "SYNTAX", 7),
        ("", "SYNTAX", 0),
        ("pareto(1) @", "SYNTAX", 10),
        ("pareto(1, 2)", "ARITY", 10),
        ("foo(1)", "UNKNOWN_NAME", 0),
        ("pareto(-1)", "PARAM_RANGE", 7),
        ("powsurv(pareto(1), 2)", "PARAM_RANGE", 19),
    ],
)
def test_parse_errors(text, code, offset):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert err.value.code == code
    assert err.value.offset == offset


def test_errors_list_expected_tokens():
    with pytest.raises(ParseError) as err:
        parse("foo(1)")
    assert "pareto" in err.value.expected


def test_weight_sum_checked_at_build():
    parse("mixture(0.5:pareto(1), 0.6:lomax(1))")
    with pytest.raises(HTDError) as err:
        build("mixture(0.5:pareto(1), 0.6:lomax(1))")
    assert err.value.code == "WEIGHT_SUM"


def test_ast_equality_ignores_offsets():
    assert parse("pareto(1)") == parse("  pareto( 1 )")
