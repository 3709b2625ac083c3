import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from htd import (
    MC,
    HTDError,
    TriggerModel,
    check_h_monotone,
    check_power_product_inequality,
    check_sd,
    check_sd_cp,
    check_sd_star,
    check_sd_triggered,
    check_sd_truncated,
    check_tail_type,
    h_function,
    make_example,
    make_frechet,
    make_lomax,
    make_pareto,
    survival_weighted_sum,
    t_transform_chain,
    triggered_survival,
    var_additivity_probe,
    var_quantile,
    weighted_sum_quantile,
)
from htd.dominance import DominanceRelation, quantile_grid, tail_decomposition

P_EX41_ETA = 0.75 + math.log(2.5) / 12
P_EX41_THETA = 0.7 + 8 * math.log(22 / 7) / 75


def test_counterexample_closed_forms():
    F = make_example("EX_SD_COUNTER")
    assert survival_weighted_sum(F, (0.25, 0.75), 1.5) == pytest.approx(P_EX41_ETA, abs=1e-6)
    assert survival_weighted_sum(F, (0.4, 0.6), 1.5) == pytest.approx(P_EX41_THETA, abs=1e-6)


def test_counterexample_is_violated_at_three_halves():
    v = check_sd(make_example("EX_SD_COUNTER"), (0.4, 0.6), (0.25, 0.75), x=[1.5])
    assert v.relation is DominanceRelation.VIOLATED
    assert v.witness.x == 1.5
    assert v.witness.margin < 0


QUAD_MC_CASES = [
    ([make_pareto(1)] * 2, (0.4, 0.6)),
    ([make_pareto(0.5), make_lomax(1)], (0.3, 0.7)),
    ([make_frechet(0.8)] * 2, (0.5, 0.5)),
    ([make_example("EX_SD_COUNTER")] * 2, (0.25, 0.75)),
]


@pytest.mark.parametrize("F_list,theta", QUAD_MC_CASES, ids=["pareto1", "pareto_lomax", "frechet", "counter"])
def test_quad_agrees_with_mc(F_list, theta):
    xs = weighted_sum_quantile_grid(F_list, theta)
    quad = np.array([survival_weighted_sum(F_list, theta, x) for x in xs])
    mc = survival_weighted_sum(F_list, theta, xs, method=MC(1_000_000, seed=11))
    for q, est in zip(quad, mc):
        assert abs(q - est.value) <= 3 * est.std_error + 1e-12


def weighted_sum_quantile_grid(F_list, theta, n=20):
    return [weighted_sum_quantile(F_list, theta, u) for u in np.linspace(0.05, 0.95, n)]


@settings(max_examples=30, deadline=None)
@given(c=st.floats(0.01, 100), x=st.floats(1.1, 500), w=st.floats(0.05, 0.95))
def test_scale_equivariance(c, x, w):
    F = make_pareto(0.7)
    theta = (w, 1 - w)
    a = survival_weighted_sum(F, theta, x)
    b = survival_weighted_sum(F, (c * w, c * (1 - w)), c * x)
    assert a == pytest.approx(b, rel=1e-7, abs=1e-10)


def test_chain_reduction():
    F = make_pareto(0.5)
    theta = (0.2, 0.3, 0.5)
    eta = (0.0, 0.2, 0.8)
    mc = MC(400_000, seed=5)
    chain = t_transform_chain(theta, eta)
    assert len(chain) >= 3
    xs = [4.0, 20.0, 200.0]
    links = [check_sd(F, lo.w, hi.w, x=xs, method=mc) for lo, hi in zip(chain, chain[1:])]
    ends = check_sd(F, theta, eta, x=xs, method=mc)
    assert all(v.relation is not DominanceRelation.VIOLATED for v in links)
    assert ends.relation is DominanceRelation.DOMINATES_ON_GRID


def test_theta_lhs_is_the_concentrated_side():
    v = check_sd(make_pareto(0.5), (0.4, 0.6), (0.25, 0.75))
    assert v.relation is DominanceRelation.DOMINATES_ON_GRID
    assert all(r.margin >= -v.tol for r in v.rows)


def test_not_comparable_rejected():
    with pytest.raises(HTDError) as err:
        check_sd(make_pareto(0.5), (0.1, 0.2, 0.7), (0.5, 0.25, 0.25))
    assert err.value.code == "NOT_COMPARABLE"


def test_finite_mean_can_violate():
    # for pareto(2) the concentrated position is riskier only in far tails
    v = check_sd_star(make_pareto(2), (0.5, 0.5))
    assert v.relation is DominanceRelation.VIOLATED


def test_sd_star_holds_for_infinite_mean():
    v = check_sd_star(make_pareto(0.5), (0.3, 0.7))
    assert v.relation is DominanceRelation.DOMINATES_ON_GRID


def test_heterogeneous_sd_cp():
    F_list = [make_pareto(0.6), make_frechet(0.9), make_lomax(0.8)]
    v = check_sd_cp(F_list, (0.2, 0.3, 0.5), method=MC(300_000, seed=2), n_grid=10)
    assert v.relation is not DominanceRelation.VIOLATED


def test_sd_cp_bad_weights():
    with pytest.raises(HTDError) as err:
        check_sd_cp([make_pareto(1)] * 2, (0.3, 0.3), method=MC(1000, seed=0))
    assert err.value.code == "BAD_WEIGHTS"


def _joint_table(p, q11):
    return (1 - 2 * p + q11, p - q11, p - q11, q11)


@pytest.mark.parametrize("q11", [0.0, 0.05, 0.15, 0.3])
def test_triggered_exact_vs_mc(q11):
    F = make_pareto(0.5)
    trig = TriggerModel(2, 0.3, "JOINT", _joint_table(0.3, q11))
    for x in (2.0, 10.0, 100.0):
        exact = triggered_survival(F, trig, (0.4, 0.6), x)
        est = triggered_survival(F, trig, (0.4, 0.6), x, method=MC(400_000, seed=9))
        assert abs(exact - est.value) <= 3 * est.std_error


def test_trigger_table_marginals_checked():
    with pytest.raises(HTDError) as err:
        TriggerModel(2, 0.3, "JOINT", (0.5, 0.2, 0.1, 0.2))
    assert err.value.code == "BAD_JOINT"


def test_triggered_monotone_in_lambda():
    F = make_pareto(0.5)
    trig = TriggerModel(2, 0.3)
    for u in (0.5, 0.8, 0.95):
        x = float(F.quantile(u))
        s = [triggered_survival(F, trig, (lam, 1 - lam), x) for lam in np.arange(0.05, 0.51, 0.05)]
        assert np.all(np.diff(s) > 1e-9)


def test_triggered_dominance_comonotone():
    v = check_sd_triggered(make_pareto(0.5), TriggerModel(2, 0.4, "COMONOTONE"), (0.4, 0.6), (0.2, 0.8))
    assert v.relation is DominanceRelation.DOMINATES_ON_GRID


def test_truncated_region_and_identity():
    v = check_sd_truncated(make_pareto(0.5), 100.0, (0.4, 0.6), (0.2, 0.8))
    assert v.relation is DominanceRelation.DOMINATES_ON_GRID
    inside = [r for r in v.rows if r.region == "IN"]
    assert len(inside) == 20 and all(r.x < 20.0 for r in inside)
    gap = [n for n in v.notes if n.startswith("truncation_gap")]
    assert gap and float(gap[0].split("=")[1]) < 1e-8


def test_truncated_rows_outside_region_are_flagged():
    v = check_sd_truncated(make_pareto(0.5), 100.0, (0.4, 0.6), (0.2, 0.8), x=[10.0, 50.0])
    assert [r.region for r in v.rows] == ["IN", "OUT_OF_REGION"]


def test_tail_decomposition_matches_direct_quadrature():
    G = make_lomax(0.7)
    c = 3.0
    for x in (3.5, 10.0, 80.0):
        s1, s2 = tail_decomposition(G, c, (0.3, 0.7), x)
        total = survival_weighted_sum(G, (0.3, 0.7), x)
        assert s1 + s2 == pytest.approx(total, rel=1e-8)


def test_tail_type_part_i():
    v = check_tail_type(make_pareto(0.5), 2.0, (0.4, 0.6), (0.2, 0.8), part="i")
    assert v.relation is not DominanceRelation.VIOLATED


def test_var_superadditive_for_infinite_mean():
    rows = var_additivity_probe([make_pareto(0.5)] * 2, (0.5, 0.5), [0.9, 0.99])
    assert all(r.gap > 0 for r in rows)


def test_var_comonotone_is_additive():
    rows = var_additivity_probe([make_pareto(0.5)] * 2, (0.5, 0.5), [0.9, 0.99], comonotone=True)
    assert all(abs(r.gap) < 1e-9 for r in rows)


def test_var_subadditive_for_finite_mean_far_tail():
    rows = var_additivity_probe([make_pareto(2)] * 2, (0.5, 0.5), [0.99])
    assert rows[0].gap < 0


def test_var_quantile_range():
    with pytest.raises(HTDError):
        var_quantile(make_pareto(1), 1.0)
    assert var_quantile(make_pareto(1), 0.5) == pytest.approx(2.0)


def test_h_function_decreasing_and_consistent():
    F = make_pareto(1)
    a = np.arange(1, 11) * 0.05
    assert check_h_monotone(F, 3.0, a).passed
    for v in a:
        assert h_function(F, 3.0, v) == pytest.approx(1 - survival_weighted_sum(F, (v, 1 - v), 3.0), abs=1e-9)


def test_power_product_inequality():
    assert check_power_product_inequality(10_000, seed=0).passed


def test_quantile_grid_shape():
    g = quantile_grid(make_pareto(0.5), 40)
    assert len(g) == 40 and np.all(np.diff(g) > 0)


def test_verdict_serialization():
    v = check_sd(make_example("EX_SD_COUNTER"), (0.4, 0.6), (0.25, 0.75), x=[1.5, 2.5])
    d = v.to_dict()
    assert d["relation"] == "VIOLATED"
    csv = v.to_csv().splitlines()
    assert csv[0] == "x,S_lhs,S_rhs,margin,method,se"
    assert len(csv) == 3


def test_unsupported_quad_for_three_live_weights():
    with pytest.raises(HTDError) as err:
        survival_weighted_sum(make_pareto(1), (0.2, 0.3, 0.5), 2.0)
    assert err.value.code == "UNSUPPORTED_QUAD"
