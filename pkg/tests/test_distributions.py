import math

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from htd import (
    HTDError,
    check_g,
    check_h,
    make_cauchy_std,
    make_example,
    make_frechet,
    make_logcauchy,
    make_lomax,
    make_pareto,
    make_piecewise_eta,
    make_point_mass,
)

from conftest import family_zoo

ZOO = family_zoo()
NAMES = sorted(ZOO)

unit = st.floats(min_value=1e-9, max_value=1 - 1e-9, allow_nan=False)
positive = st.floats(min_value=1e-4, max_value=1e6, allow_nan=False)


@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(name=st.sampled_from(NAMES), u=unit, x=positive)
def test_galois_pair(name, u, x):
    F = ZOO[name]
    Fx = float(F.cdf(x))
    # the equivalence is exact; skip ties that sit inside rounding
    assume(abs(u - Fx) > 1e-9)
    assert (float(F.quantile(u)) <= x) == (u <= Fx)


@settings(max_examples=100, deadline=None)
@given(name=st.sampled_from(NAMES), u=unit)
def test_quantile_inverts_cdf(name, u):
    F = ZOO[name]
    q = float(F.quantile(u))
    if math.isinf(q):
        # log-Cauchy quantiles overflow double range near u = 1
        assert float(F.cdf(1e300)) < u
        return
    if q == 0.0 and F.lower == 0.0:
        # and underflow to zero near u = 0
        assert float(F.cdf(np.finfo(float).tiny)) > u
        return
    assert float(F.cdf(q)) >= u - 1e-9
    if q > F.lower:
        below = q - max(1e-7 * abs(q), 1e-12)
        assert float(F.cdf(below)) <= u + 1e-7


@pytest.mark.parametrize("name", NAMES)
def test_sampling_matches_survival(name):
    F = ZOO[name]
    n = 200_000
    xs = F.sample(np.random.default_rng(7), n)
    grid = F.quantile(np.linspace(0.05, 0.95, 20))
    for x in grid:
        s = float(F.survival(x))
        emp = np.mean(xs > x)
        se = math.sqrt(max(s * (1 - s), 1e-12) / n)
        assert abs(emp - s) <= 3 * se + 1e-12, (x, emp, s)


@pytest.mark.parametrize(
    "F",
    [make_pareto(1), make_pareto(0.6), make_frechet(1), make_frechet(0.7), make_lomax(1), make_logcauchy()],
    ids=["pareto1", "pareto0.6", "frechet1", "frechet0.7", "lomax1", "logcauchy"],
)
def test_infinite_mean_sample_average_grows(F):
    sizes = [10**3, 10**4, 10**5, 10**6]
    medians = []
    for n in sizes:
        # truncating at n keeps log-Cauchy draws finite
        means = [np.minimum(F.sample(np.random.default_rng(100 + k), n), n).mean() for k in range(15)]
        medians.append(np.median(means))
    assert all(b > a for a, b in zip(medians, medians[1:])), medians


@pytest.mark.parametrize("name", NAMES)
def test_survival_plus_cdf_is_one(name):
    F = ZOO[name]
    x = np.geomspace(1e-3, 1e6, 400)
    assert np.max(np.abs(F.survival(x) + F.cdf(x) - 1.0)) <= 1e-12


def test_cdf_monotone_with_limits(zoo):
    x = np.concatenate([[0.0], np.geomspace(1e-8, 1e300, 4000)])
    for name, F in zoo.items():
        c = F.cdf(x)
        assert np.all(np.diff(c) >= -1e-15), name
        assert c[0] <= 1e-12 or F.lower == 0.0 and F.atoms()
        assert c[-1] > 0.99, name


def test_deep_tail_is_not_cancelled():
    assert make_pareto(0.5).survival(1e20) == pytest.approx(1e-10, rel=1e-12)
    assert make_lomax(1).survival(1e15) == pytest.approx(1 / (1 + 1e15), rel=1e-12)
    assert make_frechet(1).survival(1e12) == pytest.approx(-math.expm1(-1e-12), rel=1e-10)


@pytest.mark.parametrize("F", [make_pareto(0.5), make_frechet(0.8), make_lomax(1), make_logcauchy()], ids=str)
def test_members_of_g_and_hstar_have_vanishing_jumps(F):
    hi = float(F.quantile(0.999))
    lo = max(F.lower, 1e-6)
    jumps = []
    for n in (100, 1_000, 10_000, 100_000, 1_000_000):
        c = F.cdf(np.geomspace(lo, hi, n))
        jumps.append(np.max(np.diff(c)))
    assert all(b < a for a, b in zip(jumps, jumps[1:]))
    assert jumps[-1] < 1e-3


def test_eta_and_lambda_definitions(zoo):
    t = np.geomspace(1e-3, 1e3, 50)
    for name, F in zoo.items():
        assert np.allclose(F.eta(t), F.survival(1 / t), atol=1e-15), name
        with np.errstate(divide="ignore"):
            ref = -np.log(F.cdf(1 / t))
        assert np.allclose(F.lambda_fn(t), ref, rtol=1e-9, atol=1e-12), name


def test_pareto_closed_forms():
    F = make_pareto(0.5)
    assert F.lower == 1.0
    assert float(F.survival(4.0)) == pytest.approx(0.5)
    assert float(F.quantile(0.75)) == pytest.approx(16.0)


def test_piecewise_eta_interpolates_linearly():
    F = make_piecewise_eta(((0, 0), (1, 0.5), (3, 1)))
    assert float(F.eta(2.0)) == pytest.approx(0.75)
    assert float(F.survival(0.5)) == pytest.approx(0.75)
    assert F.lower == pytest.approx(1 / 3)


def test_cauchy_base_is_symmetric():
    C = make_cauchy_std()
    assert float(C.cdf(0.0)) == pytest.approx(0.5)
    assert float(C.survival(1.0)) == pytest.approx(0.25)


def test_example_values():
    F = make_example("SQRT_LAMBDA")
    assert float(F.survival(1.0)) == pytest.approx(1 - math.exp(-1), abs=1e-12)


@pytest.mark.parametrize("n", [1, 10, 1000])
def test_fn_family_members_are_valid(n):
    F = make_example("FN_FAMILY", n)
    assert F.lower == 0.0
    assert not F.is_degenerate


def test_fn_family_limit_is_rejected():
    with pytest.raises(HTDError) as err:
        make_example("FN_FAMILY", math.inf)
    assert err.value.code == "DEGENERATE"


def test_point_mass_rejected_by_certifiers():
    with pytest.raises(HTDError) as err:
        check_h(make_point_mass(2.0))
    assert err.value.code == "DEGENERATE"
    with pytest.raises(HTDError):
        check_g(make_point_mass(2.0))


@pytest.mark.parametrize("bad", [lambda: make_pareto(-1), lambda: make_frechet(0), lambda: make_lomax(-2)])
def test_non_positive_parameters(bad):
    with pytest.raises(HTDError) as err:
        bad()
    assert err.value.code == "NON_POSITIVE_PARAM"


def test_invalid_eta_rejected():
    with pytest.raises(HTDError) as err:
        make_piecewise_eta(((0, 0), (1, 0.7), (2, 0.5), (3, 1)))
    assert err.value.code == "INVALID_ETA"


def test_quantile_domain():
    with pytest.raises(HTDError):
        make_pareto(1).isf(1.5)
