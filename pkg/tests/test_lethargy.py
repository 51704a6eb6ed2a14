from __future__ import annotations

import numpy as np
import pytest

from approxscheme.bestapprox import dist_subspace
from approxscheme.errors import CallbackContractError, IndexSelectionExhausted, InsufficientSubspace
from approxscheme.fixtures import gen_cfar, gen_slow_scheme
from approxscheme.lethargy import EpsilonSequence, bernstein_construct, series_construct, verify_witness
from approxscheme.schemes import linear_chain
from approxscheme.spaces import INF, Space, lp_norm, norm


def coordinate_setup(dim, n_max, y_start, p=2.0):
    sp = Space.hilbert(dim) if p == 2 else Space.lp(p, dim)
    e = np.eye(dim)
    return sp, linear_chain(sp, [e[:, :n] for n in range(n_max + 1)]), e[:, y_start:]


def test_epsilon_sequence_validation():
    assert EpsilonSequence([1, 0.5, 0.5, 0]).horizon == 3
    with pytest.raises(ValueError, match="non-increasing"):
        EpsilonSequence([0.5, 0.7, 0.1])
    with pytest.raises(ValueError):
        EpsilonSequence([0.0, 0.0])
    with pytest.raises(ValueError):
        EpsilonSequence([])
    np.testing.assert_allclose(EpsilonSequence.geometric(0.5, 3).values, [1, 0.5, 0.25])


def test_bernstein_coordinate_example():
    sp, s, Y = coordinate_setup(16, 4, 4)
    eps = [1, 0.5, 0.25, 0.125, 0.0625]
    res = bernstein_construct(sp, s, Y, eps, 4, seed=0)
    assert abs(norm(sp, res.y) - 1.0) <= 1e-8
    assert res.all_certified
    np.testing.assert_allclose(res.construction_log["B_errors"], eps, atol=1e-7)
    assert np.all(res.profile.errors >= np.array(eps) - 1e-8)


def test_bernstein_with_zero_tail():
    sp, s, Y = coordinate_setup(12, 3, 3)
    res = bernstein_construct(sp, s, Y, [1, 0, 0, 0], 3, seed=2)
    assert abs(norm(sp, res.y) - 1.0) <= 1e-8
    assert res.all_certified


@pytest.mark.parametrize("p", [1.0, 1.5, 3.0, INF])
def test_bernstein_non_euclidean(p):
    rng = np.random.default_rng(7)
    dim = 14
    sp = Space.lp(p, dim)
    a = rng.standard_normal((dim, 4))
    s = linear_chain(sp, [a[:, :n] for n in range(5)])
    Y = rng.standard_normal((dim, 7))
    eps = [1, 0.6, 0.35, 0.2, 0.1]
    res = bernstein_construct(sp, s, Y, eps, 4, seed=1)
    assert abs(lp_norm(res.y, p) - 1.0) <= 1e-8
    assert res.all_certified
    np.testing.assert_allclose(res.construction_log["B_errors"], eps, atol=1e-7)
    # y lies in Y
    assert dist_subspace(Space.hilbert(dim), res.y, Y).error <= 1e-10


def test_bernstein_is_deterministic():
    sp, s, Y = coordinate_setup(20, 4, 6)
    eps = [1, 0.5, 0.3, 0.2, 0.1]
    a = bernstein_construct(sp, s, Y, eps, seed=11)
    b = bernstein_construct(sp, s, Y, eps, seed=11)
    np.testing.assert_array_equal(a.y, b.y)
    assert a.construction_log == b.construction_log
    assert a.construction_log["seed"] == 11


def test_bernstein_errors():
    sp, s, Y = coordinate_setup(8, 4, 5)
    with pytest.raises(InsufficientSubspace):
        bernstein_construct(sp, s, Y, [1, 0.5, 0.25, 0.1, 0.05], 4)
    with pytest.raises(ValueError, match="non-increasing"):
        bernstein_construct(sp, s, Y, [0.5, 0.7, 0.1], 2)
    q = Space.lp(0.5, 8)
    sq = linear_chain(q, s.bases)
    with pytest.raises(ValueError):
        bernstein_construct(q, sq, Y, [1, 0.5], 1)


def test_series_on_far_fixture():
    f = gen_cfar(0.6, 16)
    eps = [2.0**-n for n in range(17)]
    res = series_construct(f.space, f.scheme, f.far_witness, 0.59, eps, 3)
    log = res.construction_log
    assert log["indices"] == [0, 4, 8, 12]
    for cert in res.certificates:
        assert cert["passed"]
        err = dist_subspace(f.space, res.y, f.scheme.basis(cert["n"])).error
        assert err >= 2 ** (cert["j"] - 1) * eps[cert["n"]]
    assert norm(f.space, res.y) ** log["p"] <= log["alpha_p_sum"] + 1e-9


def test_series_single_term():
    f = gen_cfar(0.6, 8)
    eps = [2.0**-n for n in range(9)]
    res = series_construct(f.space, f.scheme, f.far_witness, 0.59, eps, 1)
    alpha = res.construction_log["alphas"][0]
    np.testing.assert_allclose(res.y, alpha * f.far_witness(0))
    assert res.certificates[0]["error"] >= eps[0]


def test_series_errors():
    f = gen_cfar(0.6, 8)
    with pytest.raises(IndexSelectionExhausted):
        series_construct(f.space, f.scheme, f.far_witness, 0.59, [1.0] * 9, 2)
    with pytest.raises(CallbackContractError):
        series_construct(f.space, f.scheme, lambda n: 0.5 * f.far_witness(n), 0.59, [2.0**-n for n in range(9)], 1)
    with pytest.raises(CallbackContractError):
        series_construct(f.space, f.scheme, lambda n: 2 * f.far_witness(n), 0.59, [2.0**-n for n in range(9)], 1)


def test_verify_witness():
    f = gen_slow_scheme(2, [1, 0.5, 0.25])
    rep = verify_witness(f.space, f.scheme, np.zeros(f.space.dim), [1, 0.5, 0.25])
    assert rep.failures() == [0, 1, 2]
    y = f.Y_basis[:, 0]
    rep = verify_witness(f.space, f.scheme, y, [1, 0.5, 0.25], tol=1e-12)
    assert rep.all_passed and rep.max_ratio == pytest.approx(1.0)
    # borderline certificate flips with the tolerance only
    rep0 = verify_witness(f.space, f.scheme, y, [0.5, 0.5, 0.25 + 1e-10], tol=0.0)
    rep1 = verify_witness(f.space, f.scheme, y, [0.5, 0.5, 0.25 + 1e-10], tol=1e-8)
    assert rep0.failures() == [2] and rep1.all_passed
