import numpy as np
import pytest
from scipy import stats

from htd import (
    MC,
    HTDError,
    CompoundSpec,
    TriggerModel,
    check_compound_dominance,
    compound_binomial,
    compound_poisson,
    compound_sample,
    compound_survival,
    make_example,
    make_frechet,
    make_pareto,
    make_point_mass,
    small_p_expansion_check,
    triggered_survival,
)
from htd.compound import draws_for, kfold_survival, schur_gap_witness

SEVERITIES = {"pareto1": make_pareto(1), "frechet1": make_frechet(1)}


@pytest.mark.parametrize("sev", sorted(SEVERITIES))
@pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_representation_matches_direct_simulation(m, p, sev):
    spec = CompoundSpec.binomial(m, p, SEVERITIES[sev])
    grid = np.geomspace(1.05, 200.0, 20)
    rep = compound_survival(spec, grid)
    # one stream per case: a shared count stream would make every case fail together
    seed = 1000 * m + int(round(100 * p)) + (0 if sev == "pareto1" else 500)
    mc = compound_survival(spec, grid, method=MC(400_000, seed=seed))
    for x, r, est in zip(grid, np.atleast_1d(rep), mc):
        value = r.value if hasattr(r, "value") else float(r)
        se = np.hypot(est.std_error, getattr(r, "std_error", 0.0))
        assert abs(value - est.value) <= 3 * se + 1e-12, x


def test_single_trial_is_a_triggered_loss():
    F = make_pareto(1)
    for x in (1.5, 4.0, 30.0):
        a = compound_survival(CompoundSpec.binomial(1, 0.3, F), x)
        b = triggered_survival(F, TriggerModel(1, 0.3), (1.0,), x)
        assert a == pytest.approx(b, abs=1e-12)


@pytest.mark.parametrize("m,p", [(1, 0.3), (3, 0.5), (7, 0.2)])
def test_point_mass_severity_gives_binomial(m, p):
    D = compound_binomial(m, p, make_point_mass(1.0))
    atoms = dict(D.atoms())
    for k in range(m + 1):
        assert atoms[float(k)] == pytest.approx(stats.binom.pmf(k, m, p), abs=1e-14)


def test_pmf_sums_to_one():
    spec = CompoundSpec.binomial(5, 0.37, make_pareto(1))
    assert sum(spec.pmf(k) for k in range(6)) == pytest.approx(1.0, abs=1e-14)


def test_survival_nondecreasing_in_p():
    F = make_pareto(0.5)
    x = np.array([2.0, 10.0, 100.0])
    ps = [0.05, 0.2, 0.5, 0.8, 0.95]
    vals = [np.asarray(compound_survival(CompoundSpec.binomial(2, p, F), x)) for p in ps]
    assert all(np.all(b >= a) for a, b in zip(vals, vals[1:]))


def test_survival_nondecreasing_in_p_shared_seed():
    F = make_frechet(1)
    x = [3.0, 30.0]
    mc = MC(200_000, seed=4)
    vals = [[e.value for e in compound_survival(CompoundSpec.binomial(4, p, F), x, method=mc)] for p in (0.2, 0.4, 0.6)]
    assert np.all(np.diff(np.array(vals), axis=0) >= 0)


def test_sampler_matches_survival():
    spec = CompoundSpec.binomial(2, 0.4, make_pareto(1))
    xs = compound_sample(spec, np.random.default_rng(0), 200_000)
    for x in (1.5, 3.0, 20.0):
        s = compound_survival(spec, x)
        se = np.sqrt(s * (1 - s) / xs.size)
        assert abs(np.mean(xs > x) - s) <= 3 * se


def test_kfold_closed_form_for_pareto1():
    F = make_pareto(1)
    # P(X1 + X2 > 5) from the convolution formula
    s2, se2 = kfold_survival(F, 2, 5.0)
    assert float(np.squeeze(s2)) == pytest.approx(0.4 + 0.08 * np.log(4), abs=1e-12)
    assert float(np.squeeze(se2)) == 0.0
    assert float(np.squeeze(kfold_survival(F, 1, 5.0)[0])) == pytest.approx(0.2)


def test_poisson_compound_is_sampled_not_represented():
    spec = CompoundSpec.poisson(1.5, make_pareto(1))
    with pytest.raises(HTDError) as err:
        compound_survival(spec, 3.0)
    assert err.value.code == "UNSUPPORTED"
    D = compound_poisson(1.5, make_pareto(1))
    assert float(D.atoms()[0][1]) == pytest.approx(np.exp(-1.5))


def test_parameter_checks():
    with pytest.raises(HTDError):
        CompoundSpec.binomial(0, 0.5, make_pareto(1))
    with pytest.raises(HTDError):
        CompoundSpec.binomial(2, 1.5, make_pareto(1))
    with pytest.raises(HTDError):
        CompoundSpec.poisson(-1.0, make_pareto(1))


def test_draw_budget_scales_inversely_with_p():
    assert draws_for(0.1) == 100_000
    assert draws_for(0.003) == 3_333_334
    with pytest.raises(HTDError) as err:
        draws_for(1e-5)
    assert err.value.code == "BUDGET_EXCEEDED"


def test_small_p_expansion():
    rep = small_p_expansion_check(2, make_pareto(0.5), (0.25, 0.75), 2.0, (0.1, 0.03, 0.01), seed=0)
    assert rep.passed
    last = rep.rows[-1]
    assert abs(last.ratio - 1) <= 1.96 * last.ratio_se


def test_compound_sufficiency():
    rep = check_compound_dominance(2, make_pareto(0.5), "SD", p_list=(0.5,), mc=MC(300_000, seed=0))
    assert rep.passed


def test_schur_gap_for_v_not_h():
    x, theta, eta, gap = schur_gap_witness(make_example("EX_V_NOT_H"))
    assert gap > 0.05
    assert theta == (0.5, 0.5)


def test_schur_gap_absent_for_h_member():
    assert schur_gap_witness(make_pareto(0.5)) is None
