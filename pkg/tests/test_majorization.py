import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from htd import HTDError, Relation, WeightVector, is_majorized_by, majorizes, schur_probe, t_transform_chain
from htd.majorization import random_comparable_pairs

weights = st.lists(st.floats(min_value=0.0, max_value=10.0, allow_nan=False), min_size=2, max_size=6).filter(
    lambda w: sum(w) > 1e-3
)


def _normalize(w):
    a = np.asarray(w, dtype=float)
    return tuple(a / a.sum())


@settings(max_examples=200, deadline=None)
@given(w=weights)
def test_reflexive(w):
    assert majorizes(w, w) is Relation.EQUAL


@settings(max_examples=200, deadline=None)
@given(a=weights, b=weights, seed=st.integers(0, 2**32 - 1))
def test_permutation_invariance(a, b, seed):
    n = min(len(a), len(b))
    a, b = _normalize(a[:n] if sum(a[:n]) > 0 else a[:1] * n), _normalize(b[:n] if sum(b[:n]) > 0 else b[:1] * n)
    rng = np.random.default_rng(seed)
    rel = majorizes(a, b)
    pa, pb = tuple(rng.permutation(a)), tuple(rng.permutation(b))
    assert majorizes(pa, pb) is rel


@settings(max_examples=200, deadline=None)
@given(a=weights, b=weights)
def test_antisymmetry(a, b):
    n = min(len(a), len(b))
    if sum(a[:n]) <= 0 or sum(b[:n]) <= 0:
        return
    a, b = _normalize(a[:n]), _normalize(b[:n])
    if is_majorized_by(a, b) and is_majorized_by(b, a):
        assert np.allclose(sorted(a), sorted(b), atol=1e-9)


def test_two_point_examples():
    assert majorizes((0.25, 0.75), (0.4, 0.6)) is Relation.A_MAJ_B
    assert majorizes((0.4, 0.6), (0.25, 0.75)) is Relation.B_MAJ_A
    assert majorizes((0.5, 0.25, 0.25), (0.4, 0.4, 0.2)) is Relation.INCOMPARABLE


def test_length_mismatch():
    with pytest.raises(HTDError):
        majorizes((0.5, 0.5), (0.2, 0.3, 0.5))


def _check_chain(a, b):
    chain = t_transform_chain(a, b)
    assert chain[0].w == tuple(a)
    assert np.array_equal(chain[-1].w, b)
    for lo, hi in zip(chain, chain[1:]):
        assert is_majorized_by(lo, hi)
        moved = np.flatnonzero(~np.isclose(lo.w, hi.w, atol=0, rtol=0))
        assert len(moved) == 2
    return chain


@pytest.mark.parametrize("dim", [2, 3, 5, 8])
def test_chain_validity_on_random_pairs(dim):
    rng = np.random.default_rng(dim)
    for less, more in random_comparable_pairs(rng, 50, dim=dim):
        # compose with a second random transfer for longer chains
        _check_chain(less.w, more.w)


def test_chain_length_when_similarly_ordered():
    a = (0.1, 0.2, 0.3, 0.4)
    b = (0.0, 0.0, 0.2, 0.8)
    chain = _check_chain(a, b)
    assert len(chain) - 1 <= len(a) - 1


def test_chain_to_full_concentration():
    chain = _check_chain((0.2, 0.3, 0.5), (0.0, 0.0, 1.0))
    assert len(chain) - 1 <= 2 * 2


def test_chain_rejects_non_comparable():
    with pytest.raises(HTDError) as err:
        t_transform_chain((0.25, 0.75), (0.4, 0.6))
    assert err.value.code == "NOT_COMPARABLE"


def test_weight_vector_validation():
    with pytest.raises(HTDError):
        WeightVector((0.5, -0.1))
    with pytest.raises(HTDError):
        WeightVector((0.4, 0.4), normalized=True)
    assert WeightVector.parse("0.2,0.8").w == (0.2, 0.8)


def test_schur_probe_detects_concavity():
    # -sum(w^2) is Schur-concave: spreading mass lowers it
    pairs = random_comparable_pairs(np.random.default_rng(0), 100, dim=3)
    ok = schur_probe(lambda *w: -np.sum(np.square(w)), pairs)
    assert ok.passed
    bad = schur_probe(lambda *w: np.sum(np.square(w)), pairs)
    assert not bad.passed
