"""Acceptance criteria, one test per criterion at the stated tolerances."""

from __future__ import annotations

import itertools
import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from approxscheme.analysis import (
    dsp_hilbert,
    dsp_identity_residual,
    farness,
    int0_norm,
    int0_witness,
    jackson_sequence,
    operator_norm,
    perturbation_bound,
)
from approxscheme.bestapprox import dist_nterm, dist_subspace, level_error
from approxscheme.errors import LambdaInfeasible
from approxscheme.fixtures import gen_cfar, gen_chebyshev, gen_projected_counterexample, gen_slow_scheme
from approxscheme.lethargy import bernstein_construct, series_construct
from approxscheme.schemes import Dictionary, k_map, linear_chain, nterm_scheme, span_basis
from approxscheme.spaces import INF, Space, lp_norm


def test_criterion_01_slow_scheme_profiles(acceptance):
    eps = np.array([1, 1 / 2, 1 / 4, 1 / 8, 1 / 16])
    worst = {}
    for p, tol in ((2.0, 1e-9), (1.5, 1e-6)):
        f = gen_slow_scheme(p, eps, J=4)
        rng = np.random.default_rng(1)
        dev = 0.0
        for _ in range(20):
            y = f.Y_basis @ rng.standard_normal(4)
            y /= lp_norm(y, p)
            errs = np.array([level_error(f.space, y, f.scheme, k)[0] for k in range(5)])
            dev = max(dev, float(np.max(np.abs(errs - eps))))
        worst[p] = (dev, tol)
    ok = all(d <= t for d, t in worst.values())
    acceptance(1, ok, "max |E(y,A_k) - eps_k|: " + ", ".join(f"p={p:g} {d:.1e} (tol {t:.0e})" for p, (d, t) in worst.items()))
    assert ok


def test_criterion_02_far_fixture(acceptance):
    f = gen_cfar(0.6, 8)
    diag = max(abs(dist_subspace(f.space, f.Y_basis[:, n - 1], f.scheme.basis(n)).error - 0.6) for n in range(1, 9))
    far = max(abs(farness(f.space, f.Y_basis, f.scheme.basis(n), "principal-angles").value - 0.6) for n in range(9))
    ok = diag <= 1e-9 and far <= 1e-9
    acceptance(2, ok, f"max |E(f_n,A_n) - 0.6| = {diag:.1e}, max |farness - 0.6| = {far:.1e}")
    assert ok


def test_criterion_03_projected_counterexample(acceptance):
    devs = {}
    for variant, value in (("normalized", lambda m: math.sqrt(1 - m**-2.0)),
                           ("printed", lambda m: math.sqrt((m * m + 1) / (m * m + 2)))):
        f = gen_projected_counterexample(10, variant)
        dev = 0.0
        for m in range(2, 11):
            for n in range(m):
                err = dist_subspace(f.space, f.Y_basis[:, m - 1], f.scheme.basis(n)).error
                dev = max(dev, abs(err - value(m)))
        devs[variant] = dev
    ok = all(d <= 1e-9 for d in devs.values())
    acceptance(3, ok, f"normalized vs sqrt(1-m^-2): {devs['normalized']:.1e}; "
                      f"printed vs sqrt((m^2+1)/(m^2+2)): {devs['printed']:.1e}")
    assert ok


def test_criterion_04_chebyshev(acceptance):
    f = gen_chebyshev(3, 0.0, 2 * math.pi, 4096)
    err = dist_subspace(f.space, f.extras["x"], f.scheme.basis(3)).error
    ok = abs(err - 1.0) <= 1e-3
    acceptance(4, ok, f"E(cos 3t, deg<3) on 4096-point grid = {err:.7f}")
    assert ok


def test_criterion_05_bernstein_repetitions(acceptance):
    dim = 32
    sp = Space.hilbert(dim)
    e = np.eye(dim)
    scheme = linear_chain(sp, [e[:, :n] for n in range(9)])
    Y = e[:, 16:]
    eps = [1, 0.7, 0.5, 0.3, 0.2, 0.1, 0.05, 0.02, 0.01]
    infeasible, failures, norm_dev, cert_gap = 0, 0, 0.0, math.inf
    for seed in range(50):
        try:
            res = bernstein_construct(sp, scheme, Y, eps, 8, seed=seed)
        except LambdaInfeasible:
            infeasible += 1
            continue
        norm_dev = max(norm_dev, abs(np.linalg.norm(res.y) - 1.0))
        for n in range(9):
            gap = dist_subspace(sp, res.y, scheme.basis(n)).error - eps[n]
            cert_gap = min(cert_gap, gap)
            if gap < -1e-8:
                failures += 1
    ok = infeasible == 0 and failures == 0 and norm_dev <= 1e-8
    acceptance(5, ok, f"50 seeds: LambdaInfeasible={infeasible}, certificate failures={failures}, "
                      f"max | ||y|| - 1 | = {norm_dev:.1e}, min E - eps = {cert_gap:.2e}")
    assert ok


def test_criterion_06_series(acceptance):
    f = gen_cfar(0.6, 16)
    eps = [2.0**-n for n in range(17)]
    res = series_construct(f.space, f.scheme, f.far_witness, 0.59, eps, 3)
    idx = res.construction_log["indices"]
    margins = []
    for j in range(1, 4):
        n = idx[j - 1]
        err = dist_subspace(f.space, res.y, f.scheme.basis(n)).error
        margins.append(err / (2 ** (j - 1) * eps[n]))
    ok = all(m >= 1.0 for m in margins)
    acceptance(6, ok, f"indices {idx}; E(y,A_(i_(j-1))) / (2^(j-1) eps) = " + ", ".join(f"{m:.3f}" for m in margins))
    assert ok


def test_criterion_07_dsp_identity(acceptance):
    rng = np.random.default_rng(7)
    sp = Space.hilbert(16)
    worst = 0.0
    for _ in range(200):
        Y = rng.standard_normal((16, int(rng.integers(1, 16))))
        x = rng.standard_normal(16) * rng.uniform(0.1, 3.0)
        F = dsp_hilbert(sp, Y, 0.5).F_basis
        worst = max(worst, dsp_identity_residual(sp, x, Y, F))
    ok = worst <= 1e-9
    acceptance(7, ok, f"max |E(x,Y)^2 + E(x,Y^perp)^2 - ||x||^2| over 200 pairs = {worst:.1e}")
    assert ok


def test_criterion_08_int0_witness(acceptance):
    worst_res, worst_norm, worst_grid, below = 0.0, 0.0, 0.0, 0
    for p in (1.0, 1.5, 4.0, INF):
        for alpha in (0.1, 0.25, 0.3):
            w = int0_witness(p, alpha)
            worst_res = max(worst_res, *w.residuals)
            worst_norm = max(worst_norm, w.min_norm)
            # 10^5 intervals; the odd point count keeps the midpoint, where the sup-norm kink sits
            grid = np.linspace(-w.a, w.b, 100_001)
            if p == INF:
                vals = np.maximum(np.abs(w.a + grid), np.abs(grid - w.b))
            else:
                vals = (alpha * np.abs(w.a + grid) ** p + (1 - alpha) * np.abs(grid - w.b) ** p) ** (1 / p)
            worst_grid = max(worst_grid, abs(float(vals.min()) - w.min_norm))
            below += float(vals.min()) < w.min_norm - 1e-12
            assert int0_norm(w.a, w.b, w.c, alpha, p) == w.min_norm
    rejected = False
    try:
        int0_witness(2, 0.25)
    except ValueError:
        rejected = True
    ok = worst_res <= 1e-10 and worst_norm <= 1 - 1e-3 and worst_grid <= 1e-6 and below == 0 and rejected
    acceptance(8, ok, f"residuals <= {worst_res:.1e}, max min_norm = {worst_norm:.4f}, "
                      f"dense-grid gap = {worst_grid:.1e}, p=2 rejected = {rejected}")
    assert ok


def test_criterion_09_nterm_tail(acceptance):
    rng = np.random.default_rng(9)
    q, _ = np.linalg.qr(rng.standard_normal((64, 64)))
    d = Dictionary(q, orthonormal=True)
    sp = Space.hilbert(64)
    tail_dev = 0.0
    for _ in range(100):
        y = rng.standard_normal(64)
        n = int(rng.integers(0, 64))
        c = np.sort(np.abs(q.T @ y))[::-1]
        ref = math.sqrt(float(np.sum(c[n:] ** 2)))
        tail_dev = max(tail_dev, abs(dist_nterm(sp, y, d, n).error - ref))
    ex_dev = 0.0
    for _ in range(100):
        dim = int(rng.integers(2, 13))
        qs, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
        ds = Dictionary(qs, orthonormal=True)
        s = Space.hilbert(dim)
        y = rng.standard_normal(dim)
        for n in range(min(3, dim) + 1):
            a = dist_nterm(s, y, ds, n, "exact-orthonormal").error
            b = dist_nterm(s, y, ds, n, "exhaustive").error
            ex_dev = max(ex_dev, abs(a - b))
    ok = tail_dev <= 1e-12 and ex_dev <= 1e-9
    acceptance(9, ok, f"tail formula gap = {tail_dev:.1e}, exhaustive gap = {ex_dev:.1e}")
    assert ok


def test_criterion_10_jackson(acceptance):
    sp = Space.hilbert(64)
    e = np.eye(64)
    s = linear_chain(sp, [e[:, :n] for n in range(11)])
    js = jackson_sequence(sp, s, Y_weights=np.arange(1, 65, dtype=float))
    dev = float(np.max(np.abs(js.values - 1 / np.arange(1, 12))))
    ok = dev <= 1e-8
    acceptance(10, ok, f"max |c_n - 1/(n+1)|, n <= 10 = {dev:.1e}")
    assert ok


# -- criterion 11: randomized property suites ------------------------------

CASES = 1000


def random_chain(rng, space, n_max):
    cols = rng.standard_normal((space.dim, n_max))
    return linear_chain(space, [cols[:, :n] for n in range(n_max + 1)])


def suite_homogeneity(rng):
    bad = 0
    for _ in range(CASES):
        p = rng.choice([1.0, 1.5, 2.0, 3.0, INF])
        dim = int(rng.integers(2, 7))
        sp = Space.lp(p, dim)
        x = rng.standard_normal(dim)
        b = rng.standard_normal((dim, int(rng.integers(1, dim))))
        lam = rng.uniform(-20, 20)
        e1 = dist_subspace(sp, x, b).error
        e2 = dist_subspace(sp, lam * x, b).error
        bad += abs(e2 - abs(lam) * e1) > 1e-9 * max(abs(lam) * e1, 1e-300)
        bad += abs(lp_norm(lam * x, p) - abs(lam) * lp_norm(x, p)) > 1e-12 * abs(lam) * lp_norm(x, p)
    return bad


def suite_p_triangle(rng):
    bad = 0
    for i in range(CASES):
        kind = i % 3
        if kind == 0:
            # coordinate chains in quasi-normed l_p: distances are exact tails
            p = float(rng.choice([0.3, 0.5, 0.8]))
            dim = int(rng.integers(3, 8))
            sp = Space.lp(p, dim)
            e = np.eye(dim)
            s = linear_chain(sp, [e[:, :n] for n in range(dim)])
        elif kind == 1:
            p = float(rng.choice([1.0, 1.5, 2.0, 3.0, INF]))
            dim = int(rng.integers(3, 7))
            sp = Space.lp(p, dim)
            s = random_chain(rng, sp, dim - 1)
        else:
            dim = int(rng.integers(3, 7))
            sp = Space.hilbert(dim)
            s = nterm_scheme(sp, Dictionary(rng.standard_normal((dim, dim + 2))), dim // 2)
        pc = min(sp.p, 1.0)
        x, y = rng.standard_normal((2, dim))
        n = int(rng.integers(0, s.n_max + 1))
        kn = k_map(s, n)
        if kn > s.n_max:
            continue
        lhs = level_error(sp, x + y, s, kn)[0] ** pc
        rhs = level_error(sp, x, s, n)[0] ** pc + level_error(sp, y, s, n)[0] ** pc
        bad += lhs > rhs + 1e-9
    return bad


def suite_small_perturbation(rng):
    bad = 0
    for i in range(CASES):
        if i % 2 == 0:
            dim = int(rng.integers(3, 8))
            sp = Space.hilbert(dim)
            F = rng.standard_normal((dim, int(rng.integers(1, dim))))
            Fp = np.hstack([F + rng.uniform(0.01, 0.4) * rng.standard_normal(F.shape), rng.standard_normal((dim, 1))])
            delta = farness(sp, F, Fp).value
        else:
            p = float(rng.choice([1.0, 1.5, 3.0, INF]))
            dim = int(rng.integers(3, 7))
            sp = Space.lp(p, dim)
            f = rng.standard_normal(dim)
            F = f[:, None]
            Fp = np.column_stack([f + rng.uniform(0.01, 0.4) * rng.standard_normal(dim), rng.standard_normal(dim)])
            # the unit sphere of a line is {+-f/||f||}: the sup is a single distance
            delta = dist_subspace(sp, f / lp_norm(f, sp.p), Fp).error
        delta += 1e-12
        if not delta < 1:
            continue
        x = rng.standard_normal(dim)
        x *= rng.uniform(0, 1) / lp_norm(x, sp.p)
        bad += dist_subspace(sp, x, Fp).error > dist_subspace(sp, x, F).error + 2 * delta + 1e-9
    return bad


def suite_perturbation_bound(rng):
    bad = 0
    for _ in range(CASES):
        c = rng.uniform(0.2, 0.9)
        f = gen_cfar(c, int(rng.integers(2, 6)))
        Y = f.Y_basis
        Z = Y + rng.uniform(0.0, 0.5) * c * rng.standard_normal(Y.shape)
        e = farness(f.space, Y, Z).value
        if e >= c:
            continue
        bound = perturbation_bound(c, e, 1.0)
        zf = min(farness(f.space, Z, f.scheme.basis(n)).value for n in range(f.scheme.n_max + 1))
        bad += zf < bound - 1e-6
    return bad


def suite_finite_codimension(rng):
    bad = 0
    for _ in range(CASES):
        dim = int(rng.integers(4, 11))
        sp = Space.hilbert(dim)
        s = random_chain(rng, sp, dim - 1)
        Y = rng.standard_normal((dim, dim - int(rng.integers(1, 4))))
        for n in range(s.n_max + 1):
            if s.dims()[n] >= Y.shape[1]:
                break
            # hypothesis: the scheme is 1-far from the whole space at this level
            if farness(sp, np.eye(dim), s.basis(n)).value < 1 - 1e-12:
                continue
            # a Banach space is 1-convex, so the bound is 2^(-1/1)
            bad += farness(sp, Y, s.basis(n)).value < 2.0**-1.0 - 1e-6
    return bad


def suite_projection_norm(rng):
    bad = 0
    for i in range(CASES):
        dim = int(rng.integers(4, 11))
        sp = Space.hilbert(dim)
        s = random_chain(rng, sp, dim - 1)
        k = dim - int(rng.integers(1, 4))
        Yq = span_basis(rng.standard_normal((dim, k)))
        if i % 2 == 0:
            P = Yq @ Yq.T
        else:
            # oblique projection onto Y along a random complement
            W = rng.standard_normal((dim, dim - k))
            M = np.hstack([Yq, W])
            P = M @ np.diag([1.0] * k + [0.0] * (dim - k)) @ np.linalg.inv(M)
        pn = operator_norm(sp, P).value
        for n in range(s.n_max + 1):
            if s.dims()[n] >= k:
                break
            bad += farness(sp, Yq, s.basis(n)).value < 1 / pn - 1e-6
    return bad


SUITES = {
    "homogeneity": suite_homogeneity,
    "p-triangle under schemes": suite_p_triangle,
    "small-perturbation inequality": suite_small_perturbation,
    "perturbation farness bound": suite_perturbation_bound,
    "finite-codimension 2^(-1/p)-far": suite_finite_codimension,
    "farness >= 1/||P||": suite_projection_norm,
}


def test_criterion_11_property_suites(acceptance):
    violations = {}
    for i, (name, suite) in enumerate(SUITES.items()):
        violations[name] = suite(np.random.default_rng(1100 + i))
    ok = all(v == 0 for v in violations.values())
    acceptance(11, ok, f"{CASES} cases each, violations: " + ", ".join(f"{k}={v}" for k, v in violations.items()))
    assert ok


# -- criterion 12: CLI determinism -----------------------------------------

def _run_cli(args, cwd):
    env = dict(os.environ)
    env.pop("APPROXSCHEME_SEED", None)
    proc = subprocess.run([sys.executable, "-m", "approxscheme", *args], cwd=cwd, env=env,
                          capture_output=True, text=True, check=False)
    return proc


def _payload(proc, out_path=None):
    if out_path is not None:
        with open(out_path) as fh:
            return json.dumps(json.load(fh)["payload"], sort_keys=True)
    return proc.stdout


def test_criterion_12_cli_determinism(acceptance, tmp_path):
    invocations = {
        "construct slow-lp": (["construct", "--fixture", "slow-lp", "--p", "2", "--eps", "1,0.5,0.25",
                               "--horizon", "2", "--out", "w.json"], "w.json", 0),
        "farness cfar csv": (["farness", "--fixture", "cfar", "--c", "0.6", "--n", "0..7", "--format", "csv"], None, 0),
        "errors missing": (["errors", "--scheme", "missing.json"], None, 2),
    }
    summary = []
    ok = True
    for name, (args, out, code) in invocations.items():
        outputs = set()
        codes = set()
        for _ in range(5):
            proc = _run_cli(args, tmp_path)
            codes.add(proc.returncode)
            text = _payload(proc, tmp_path / out) if out else proc.stdout + proc.stderr
            outputs.add(text)
        same = len(outputs) == 1 and codes == {code}
        ok &= same
        summary.append(f"{name}: {'identical' if same else 'DIFFERENT'} (exit {sorted(codes)})")
    acceptance(12, ok, "; ".join(summary))
    assert ok
