from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from approxscheme.spaces import (
    INF,
    Space,
    lorentz_norm,
    modulus_of_convexity,
    norm,
    pnorm_profile,
    rearrange_nonincreasing,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
vectors = st.lists(finite, min_size=1, max_size=8)
exponents = st.sampled_from([0.3, 0.5, 0.9, 1.0, 1.5, 2.0, 3.0, INF])


def test_norm_examples():
    assert norm(Space.lp(2, 3), [3, 4, 0]) == pytest.approx(5.0, abs=1e-15)
    assert norm(Space.lp(1, 2), [1, -2]) == 3.0
    assert norm(Space.lp(0.5, 2), [1, 1]) == pytest.approx(4.0, rel=1e-15)
    assert norm(Space.lp(INF, 3), [1, -7, 2]) == 7.0


def test_norm_rejects_bad_vectors():
    s = Space.lp(2, 3)
    with pytest.raises(ValueError, match="dimension mismatch"):
        norm(s, [1, 2])
    with pytest.raises(ValueError, match="non-finite"):
        norm(s, [1, np.nan, 0])
    with pytest.raises(ValueError, match="non-finite"):
        norm(s, [1, np.inf, 0])


def test_space_descriptors():
    assert Space.hilbert(4).p == 2.0
    assert Space.hilbert(4).is_euclidean
    g = Space.chebyshev_grid(0, 1, 17)
    assert g.dim == 17 and g.p == INF and g.interval == (0.0, 1.0)
    with pytest.raises(ValueError):
        Space.sup_grid([0.0, 0.5, 0.5])
    with pytest.raises(ValueError):
        Space.lp(-1, 3)
    with pytest.raises(ValueError):
        Space("banach", 3)
    for s in (Space.lp(1.5, 3), Space.lp(INF, 2), Space.hilbert(5), g):
        assert Space.from_dict(s.to_dict()) == s


def test_pnorm_profile():
    assert pnorm_profile(Space.lp(3, 2)) == (1.0, 1.0)
    assert pnorm_profile(Space.lp(INF, 2)) == (1.0, 1.0)
    prof = pnorm_profile(Space.lp(0.5, 2))
    assert prof.p_convexity == 0.5
    assert prof.quasi_constant == pytest.approx(2.0)


def test_large_and_tiny_entries_do_not_overflow():
    s = Space.lp(3, 2)
    assert norm(s, [1e200, 1e200]) == pytest.approx(1e200 * 2 ** (1 / 3))
    assert norm(s, [1e-200, 0]) == pytest.approx(1e-200)


@given(vectors, finite, exponents)
def test_homogeneity(v, lam, p):
    s = Space.lp(p, len(v))
    lhs = norm(s, lam * np.asarray(v))
    rhs = abs(lam) * norm(s, v)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


def test_quasi_triangle_and_p_convexity(rng):
    for p in (0.25, 0.5, 0.8, 1.0, 1.7, INF):
        s = Space.lp(p, 5)
        pc, cq = pnorm_profile(s)
        for _ in range(1000):
            x, y = rng.standard_normal((2, 5)) * rng.exponential(size=(2, 5))
            nx, ny, nxy = norm(s, x), norm(s, y), norm(s, x + y)
            assert nxy <= cq * (nx + ny) * (1 + 1e-12)
            assert nxy**pc <= (nx**pc + ny**pc) * (1 + 1e-12)


def test_rearrangement_examples():
    np.testing.assert_array_equal(rearrange_nonincreasing([0.1, -0.5, 0.3]), [0.5, 0.3, 0.1])
    np.testing.assert_array_equal(rearrange_nonincreasing([1, 1]), [1, 1])
    np.testing.assert_array_equal(rearrange_nonincreasing([-1, 1]), [1, 1])


def test_lorentz_examples():
    assert lorentz_norm([1, 0.5, 0.25], 1, 1) == pytest.approx(1.75)
    assert lorentz_norm([0, 0, 0, 0], 2, 0.5) == 0.0
    assert lorentz_norm([-0.5, 1], 1.5, 2) == lorentz_norm([1, 0.5], 1.5, 2)
    with pytest.raises(ValueError):
        lorentz_norm([1.0], 0, 1)
    with pytest.raises(ValueError):
        lorentz_norm([1.0], 1, -1)


def test_lorentz_against_defining_sum():
    a = np.array([0.3, -2.0, 0.7, 1.1])
    star = np.array([2.0, 1.1, 0.7, 0.3])
    for p, r in [(1, 1), (2, 0.5), (0.5, 3), (3, 1 / 3)]:
        n = np.arange(1, 5)
        ref = np.sum(n ** (r * p - 1) * star**p) ** (1 / p)
        assert lorentz_norm(a, p, r) == pytest.approx(ref, rel=1e-13)


@given(vectors, st.sampled_from([0.5, 1.0, 2.0, 3.0]), st.sampled_from([0.5, 1.0, 2.0]), st.randoms())
def test_lorentz_permutation_and_sign_invariance(v, p, r, rnd):
    w = list(v)
    rnd.shuffle(w)
    w = [x if rnd.random() < 0.5 else -x for x in w]
    assert lorentz_norm(w, p, r) == lorentz_norm(v, p, r)


def test_lorentz_p_equals_r_is_plain_norm():
    a = np.array([0.2, -1.0, 0.5])
    for p in (0.5, 1.0, 2.0, 4.0):
        ref = np.sum(np.abs(a) ** p) ** (1 / p)
        assert lorentz_norm(a, p, 1.0 / p) == pytest.approx(ref, rel=1e-13)


def test_modulus_of_convexity_closed_forms():
    d = modulus_of_convexity(Space.hilbert(2), 2.0)
    assert d.value == pytest.approx(1.0) and d.status == "exact"
    d = modulus_of_convexity(Space.lp(2, 2), 1.0)
    assert d.value == pytest.approx(1 - math.sqrt(3) / 2, abs=1e-15)
    assert modulus_of_convexity(Space.lp(1, 2), 1.0).value == pytest.approx(0.0, abs=1e-6)
    assert modulus_of_convexity(Space.lp(INF, 2), 1.0).value == pytest.approx(0.0, abs=1e-6)


def test_modulus_of_convexity_matches_clarkson_for_lp_above_two():
    # for p >= 2 the modulus of l_p equals 1 - (1 - (eps/2)^p)^(1/p)
    s = Space.lp(3, 2)
    for eps in (0.5, 1.0, 1.5):
        ref = 1 - (1 - (eps / 2) ** 3) ** (1 / 3)
        est = modulus_of_convexity(s, eps, n_starts=16)
        assert est.status == "upper-bound-estimate"
        assert est.value == pytest.approx(ref, abs=1e-5)


def test_modulus_of_convexity_range_and_monotonicity():
    s = Space.lp(1.5, 2)
    vals = [modulus_of_convexity(s, e, n_starts=12).value for e in (0.25, 0.5, 1.0, 1.5, 2.0)]
    assert all(0 <= v <= 1 for v in vals)
    assert all(b >= a - 2e-6 for a, b in zip(vals, vals[1:]))


def test_modulus_of_convexity_errors():
    with pytest.raises(ValueError):
        modulus_of_convexity(Space.lp(2, 2), 0.0)
    with pytest.raises(ValueError):
        modulus_of_convexity(Space.lp(2, 2), 2.5)
    with pytest.raises(ValueError):
        modulus_of_convexity(Space.lp(0.5, 2), 1.0)
