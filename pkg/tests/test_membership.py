import json
import math

import numpy as np
import pytest

from htd import (
    GridSpec,
    HTDError,
    Verdict,
    build,
    check_concave_lambda,
    check_g,
    check_h,
    check_hr_order,
    check_hstar,
    check_v,
    classify,
    is_super_frechet,
    is_super_pareto,
    make_example,
    make_frechet,
    make_lomax,
    make_pareto,
    sum_iid_closed,
)

from conftest import ETA_1, ETA_2, family_zoo

LATTICE_CASES = dict(family_zoo())
LATTICE_CASES.update(
    {
        "powcdf_logcauchy": build("powcdf(logcauchy(), 0.5)"),
        "hr_f": make_example("EX_HR_PAIR_F"),
        "hr_g": make_example("EX_HR_PAIR_G"),
        "sum_pareto1": sum_iid_closed("PARETO1"),
        "sum_lomax1": sum_iid_closed("LOMAX1"),
        "g_min": make_example("G_MIN"),
        "fn_10": make_example("FN_FAMILY", 10),
    }
)


@pytest.mark.parametrize("name", sorted(LATTICE_CASES))
def test_lattice_consistency(name):
    r = classify(LATTICE_CASES[name])
    ok = {k: v.passed for k, v in r.items()}
    if ok["H"]:
        assert ok["V"]
    if ok["V"]:
        assert ok["Hstar"]
    if ok["G"]:
        assert ok["Hstar"]


def _pointwise_margin(F, w):
    """Recompute a witness margin directly from eta / Lambda."""
    eta = lambda t: float(F.eta(t))
    if w.kind == "TRIPLE":
        lam = (w.z - w.y) / (w.z - w.x)
        return lam * eta(w.x) + (1 - lam) * eta(w.z) - eta(w.y)
    if w.kind == "PAIR" and "Lambda" in w.relation:
        return float(F.lambda_fn(w.x + w.y) - F.lambda_fn(w.x) - F.lambda_fn(w.y))
    if w.kind == "PAIR":
        return eta(w.x + w.y) - eta(w.x) - eta(w.y)
    raise AssertionError(w.kind)


@pytest.mark.parametrize(
    "F,check",
    [
        (make_example("EX_HR_PAIR_G"), check_h),
        (make_example("EX_V_NOT_H"), check_h),
        (sum_iid_closed("LOMAX1"), check_g),
        (sum_iid_closed("PARETO1"), check_hstar),
        (build("powcdf(logcauchy(), 0.5)"), check_h),
    ],
    ids=["hr_g.H", "v_not_h.H", "lomax_sum.G", "pareto_sum.Hstar", "powcdf.H"],
)
def test_violation_persists_under_refinement(F, check):
    for grid in (None, GridSpec(1e-6, 1e6, 4096)):
        r = check(F) if grid is None else check(F, grid)
        assert r.verdict is Verdict.VIOLATED
        assert r.witness is not None
        assert r.witness.margin > r.tolerance
        assert _pointwise_margin(F, r.witness) == pytest.approx(r.witness.margin, rel=1e-6, abs=1e-12)


def test_hazard_order_does_not_preserve_h():
    F, G = make_example("EX_HR_PAIR_F"), make_example("EX_HR_PAIR_G")
    assert check_h(F).passed
    assert check_hr_order(F, G).passed
    r = check_h(G)
    assert not r.passed and r.witness.kind == "TRIPLE"
    assert 2 / 3 - 1e-12 <= r.witness.x < r.witness.z <= 5 / 6 + 1e-12


@pytest.mark.parametrize("n", [1, 10, 1000])
def test_fn_family_in_every_class(n):
    F = make_example("FN_FAMILY", n)
    assert all(r.passed for r in classify(F).values())


def test_eta1_placement():
    from htd import make_piecewise_eta

    r = classify(make_piecewise_eta(ETA_1))
    assert r["V"].passed and not r["H"].passed
    assert r["G"].witness.kind == "ESS_INF"


def test_eta2_placement():
    from htd import make_piecewise_eta

    r = classify(make_piecewise_eta(ETA_2))
    assert r["Hstar"].passed and not r["V"].passed


def test_sqrt_lambda_in_g_but_not_v():
    F = make_example("SQRT_LAMBDA")
    assert not check_v(F).passed
    assert check_g(F).passed


def test_g_min_violation_at_probe():
    r = check_g(make_example("G_MIN"), probes=[(0.4, 0.4)])
    assert not r.passed
    assert (r.witness.x, r.witness.y) == (0.4, 0.4)


def test_discrete_part_excluded_from_g_and_hstar():
    F = build("mixture(0.5: pareto(1), 0.5: point(3))")
    for check in (check_g, check_hstar):
        r = check(F)
        assert not r.passed
        assert r.witness.kind in ("JUMP", "ESS_INF")
    assert check_hstar(F).witness.kind == "JUMP"


def test_positive_ess_inf_excludes_g():
    r = check_g(make_pareto(0.5))
    assert r.witness.kind == "ESS_INF"
    assert r.witness.x == 1.0


def test_probe_points_are_preferred_witnesses():
    r = check_hstar(sum_iid_closed("PARETO1"), probes=[(0.1, 0.1)])
    w = r.witness
    assert w.lhs == pytest.approx(0.4 + 0.08 * math.log(4), abs=1e-12)
    assert w.rhs == pytest.approx(2 * (0.2 + 0.02 * math.log(9)), abs=1e-12)


def test_report_json_shape():
    r = check_hstar(sum_iid_closed("PARETO1"), probes=[(0.1, 0.1)])
    d = json.loads(json.dumps(r.to_dict()))
    assert {"class", "verdict", "witness", "grid", "tolerance"} <= set(d)
    assert {"x", "y", "lhs", "rhs", "margin"} <= set(d["witness"])


def test_no_violation_records_worst_margin():
    r = check_h(make_pareto(0.5))
    assert r.verdict is Verdict.NO_VIOLATION_ON_GRID
    assert r.witness is None
    assert np.isfinite(r.worst_margin) and r.worst_margin <= r.tolerance


def test_workers_do_not_change_result():
    F = sum_iid_closed("LOMAX1")
    a, b = check_g(F, workers=1), check_g(F, workers=3)
    assert a.to_dict() == b.to_dict()


def test_grid_validation():
    with pytest.raises(HTDError):
        GridSpec(0.0, 1.0, 10, "LOG")
    g = GridSpec(1e-3, 1e3, 64)
    assert np.all(np.diff(g.points()) > 0)


def test_convex_order_hierarchy():
    assert is_super_pareto(make_pareto(0.5)).passed
    assert is_super_frechet(make_frechet(0.8)).passed
    # lomax(1) is a shifted pareto(1); pareto(2) needs a concave map
    assert is_super_pareto(make_lomax(1)).passed
    assert not is_super_pareto(make_pareto(2)).passed


def test_concave_lambda_pareto1_is_violated():
    # -log(1 - t) is convex on (0, 1)
    assert not check_concave_lambda(make_pareto(1)).passed
