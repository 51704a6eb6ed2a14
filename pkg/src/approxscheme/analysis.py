"""Farness, Shapiro-condition, Jackson and DSP diagnostics as finite computations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog, minimize_scalar

from . import bestapprox
from .bestapprox import EXACT, LOWER, ErrorProfile, dist_subspace, level_error
from .schemes import Scheme, as_matrix, k_map, rank, span_basis
from .spaces import INF, Space, as_vector, lorentz_norm, lp_norm


class FarnessValue(NamedTuple):
    value: float
    status: str


@dataclass
class FarnessReport:
    levels: list[int]
    values: list[float]
    statuses: list[str]
    horizon: int

    @property
    def infimum(self) -> float:
        return min(self.values) if self.values else math.nan

    def to_rows(self) -> list[dict]:
        return [{"n": n, "value": v, "status": s} for n, v, s in zip(self.levels, self.values, self.statuses)]


# -- farness ----------------------------------------------------------------

def _dual_direction(r: np.ndarray, p: float) -> np.ndarray:
    """A (sub)gradient of ``||.||_p`` at ``r``."""
    nr = lp_norm(r, p)
    if nr == 0.0:
        return np.zeros_like(r)
    if p == INF:
        g = np.zeros_like(r)
        i = int(np.argmax(np.abs(r)))
        g[i] = np.sign(r[i])
        return g
    if p == 1.0:
        return np.sign(r)
    return np.sign(r) * (np.abs(r) / nr) ** (p - 1.0)


def _sphere_search(space: Space, Y: np.ndarray, A: np.ndarray, *, restarts: int, seed: int,
                   max_iter: int, coef_norm: bool = False, ftol: float = 1e-10) -> float:
    """Multi-start projected ascent of ``E(Y c, A) / ||Y c||`` on the unit sphere of coefficients.

    With ``coef_norm`` the denominator is ``||c||_2`` (used for weighted Y-norms).
    Every evaluated ratio is a valid lower bound, so the best one is returned.
    A restart stops after five consecutive steps gaining less than ``ftol`` relative.
    """
    p = space.p
    k = Y.shape[1]
    rng = np.random.default_rng(seed)

    def evaluate(c):
        y = Y @ c
        ny = float(np.linalg.norm(c)) if coef_norm else lp_norm(y, p)
        if ny == 0.0:
            return 0.0, np.zeros(k)
        res = dist_subspace(space, y, A)
        e = res.error
        g_e = Y.T @ _dual_direction(y - res.minimizer, p)
        g_n = c / ny if coef_norm else Y.T @ _dual_direction(y, p)
        return e / ny, g_e / ny - (e / ny**2) * g_n

    starts = [np.eye(k)[i] for i in range(k)]
    while len(starts) < restarts + k:
        starts.append(rng.standard_normal(k))
    best = 0.0
    for c in starts[: restarts + k]:
        c = c / np.linalg.norm(c)
        val, g = evaluate(c)
        best = max(best, val)
        step = 1.0
        slow = 0
        for _ in range(max_iter):
            g = g - (g @ c) * c
            if np.linalg.norm(g) < 1e-12:
                break
            improved = False
            gg = float(g @ g)
            while step > 1e-12:
                cn = c + step * g
                cn /= np.linalg.norm(cn)
                vn, gn = evaluate(cn)
                # sufficient increase; plain increase lets the iterate zig-zag across the optimum
                if vn > val + max(1e-15, 1e-4 * step * gg):
                    slow = slow + 1 if vn - val < ftol * val else 0
                    c, val, g = cn, vn, gn
                    improved = True
                    step *= 2.0
                    break
                step *= 0.5
            best = max(best, val)
            if not improved or slow >= 5:
                break
        if best >= 1.0 - 1e-12 and not coef_norm:
            break
    return best


def farness(space: Space, Y_basis, A_basis, method: str = "principal-angles", *, restarts: int = 32,
            seed: int = 0, max_iter: int = 10_000) -> FarnessValue:
    """``E(S(Y), A) = sup_{||y|| = 1, y in Y} E(y, A)``.

    ``principal-angles`` (Hilbert only) is exact: the largest singular value of
    ``(I - P_A) Q_Y``. ``sphere-search`` returns a lower bound.
    """
    Y = as_matrix(Y_basis, space.dim)
    A = as_matrix(A_basis, space.dim)
    qy = span_basis(Y)
    if qy.shape[1] == 0:
        return FarnessValue(0.0, EXACT)
    if method == "principal-angles":
        if not space.is_euclidean:
            raise ValueError("principal-angles farness requires a Hilbert space")
        qa = span_basis(A)
        resid = qy - qa @ (qa.T @ qy)
        s = np.linalg.svd(resid, compute_uv=False)
        return FarnessValue(float(min(max(s[0], 0.0), 1.0)), EXACT)
    if method == "sphere-search":
        if not space.is_normed:
            raise ValueError("sphere-search farness requires p >= 1")
        if space.is_euclidean:
            basis = qy
        else:
            basis = qy
        val = _sphere_search(space, basis, A, restarts=restarts, seed=seed, max_iter=max_iter)
        return FarnessValue(float(min(val, 1.0)), LOWER)
    raise ValueError(f"unknown farness method {method!r}")


def default_method(space: Space) -> str:
    return "principal-angles" if space.is_euclidean else "sphere-search"


def farness_report(space: Space, Y_basis, scheme: Scheme, n_range: Sequence[int] | None = None,
                   method: str | None = None, **kw) -> FarnessReport:
    """``E(S(Y), A_n)`` for each level of a linear scheme."""
    if not scheme.is_linear:
        raise ValueError("farness_report needs a linear scheme")
    method = method or default_method(space)
    levels = list(range(scheme.n_max + 1)) if n_range is None else sorted(n_range)
    vals, stats = [], []
    for n in levels:
        fv = farness(space, Y_basis, scheme.basis(n), method, **kw)
        vals.append(fv.value)
        stats.append(fv.status)
    return FarnessReport(levels, vals, stats, scheme.n_max)


def operator_norm(space: Space, P, *, samples: int = 2000, seed: int = 0) -> FarnessValue:
    """``||P||`` on the space: spectral norm in l2, sampled lower estimate otherwise."""
    P = np.asarray(P, dtype=float)
    if space.is_euclidean:
        return FarnessValue(float(np.linalg.norm(P, 2)), EXACT)
    rng = np.random.default_rng(seed)
    best = 0.0
    cands = list(np.eye(space.dim)) + list(rng.standard_normal((samples, space.dim)))
    for x in cands:
        nx = lp_norm(x, space.p)
        if nx > 0:
            best = max(best, lp_norm(P @ x, space.p) / nx)
    return FarnessValue(best, LOWER)


# -- Shapiro conditions -----------------------------------------------------

@dataclass
class ShapiroDiagnostics:
    levels: list[int]
    sphere_values: list[float]
    sphere_statuses: list[str]
    condition_d: bool
    condition_e: bool
    c_threshold: float
    witness_ratios: dict[int, float | None]
    witness_found: dict[int, bool]
    successor_ratios: dict[int, float | None]
    horizon: int
    notes: list[str] = field(default_factory=list)

    @property
    def condition_b(self) -> bool:
        return bool(self.witness_found) and all(self.witness_found.values())

    def failing_levels_d(self, tol: float = 1e-9) -> list[int]:
        return [n for n, v in zip(self.levels, self.sphere_values) if v < 1.0 - tol]

    def to_dict(self) -> dict:
        return {
            "levels": self.levels,
            "sphere_values": self.sphere_values,
            "sphere_statuses": self.sphere_statuses,
            "condition_b": self.condition_b,
            "condition_d": self.condition_d,
            "condition_e": self.condition_e,
            "c_threshold": self.c_threshold,
            "witness_ratios": {str(k): v for k, v in self.witness_ratios.items()},
            "witness_found": {str(k): v for k, v in self.witness_found.items()},
            "successor_ratios": {str(k): v for k, v in self.successor_ratios.items()},
            "horizon": self.horizon,
            "notes": self.notes,
        }


def _sphere_value(space: Space, scheme: Scheme, n: int, rng, samples: int, seed: int) -> FarnessValue:
    if scheme.is_linear:
        return farness(space, np.eye(space.dim), scheme.basis(n), default_method(space), seed=seed, restarts=8)
    # union of subspaces: sampled lower bound
    best = 0.0
    for x in list(np.eye(space.dim)) + list(rng.standard_normal((samples, space.dim))):
        nx = lp_norm(x, space.p)
        best = max(best, level_error(space, x / nx, scheme, n)[0])
    return FarnessValue(min(best, 1.0), LOWER)


def shapiro_check(space: Space, scheme: Scheme, n_list: Sequence[int] | None = None,
                  c_threshold: float = 1.0, *, n_directions: int = 512, seed: int = 0,
                  candidates=None, tol: float = 1e-9) -> ShapiroDiagnostics:
    """Finite-horizon surrogates of the Shapiro characterisations (b), (d), (e).

    (d) ``E(S(X), A_n) = 1`` and (e) ``E(S(X), A_n) >= c_threshold`` are
    evaluated per level. For (b) the search looks for ``x`` outside ``A_n``
    with ``E(x, A_n) <= c_threshold * E(x, A_{K(n)})`` among ``candidates``
    and ``n_directions`` seeded random directions; not finding one is reported
    as such, never as a disproof.
    """
    levels = list(range(scheme.n_max + 1)) if n_list is None else sorted(n_list)
    rng = np.random.default_rng(seed)
    sphere_vals, sphere_stats = [], []
    for n in levels:
        fv = _sphere_value(space, scheme, n, rng, n_directions, seed)
        sphere_vals.append(fv.value)
        sphere_stats.append(fv.status)
    directions = []
    if candidates is not None:
        directions.extend(as_matrix(candidates, space.dim).T)
    directions.extend(rng.standard_normal((n_directions, space.dim)))

    ratios: dict[int, float | None] = {}
    found: dict[int, bool] = {}
    succ: dict[int, float | None] = {}
    notes = []
    for n in levels:
        kn = k_map(scheme, n)
        if kn > scheme.n_max:
            notes.append(f"level {n}: K(n)={kn} beyond horizon, condition (b) not searched")
            continue
        best, best_succ = None, None
        for x in directions:
            e_n = level_error(space, x, scheme, n)[0]
            if e_n <= tol * max(lp_norm(x, space.p), 1.0):
                continue
            e_k = e_n if kn == n else level_error(space, x, scheme, kn)[0]
            if e_k > 0:
                r = e_n / e_k
                best = r if best is None else min(best, r)
            if n + 1 <= scheme.n_max:
                e_s = level_error(space, x, scheme, n + 1)[0]
                if e_s > 0:
                    rs = e_n / e_s
                    best_succ = rs if best_succ is None else min(best_succ, rs)
            if best is not None and best <= c_threshold and (best_succ is not None or n == scheme.n_max):
                if candidates is None:
                    break
        ratios[n] = best
        found[n] = best is not None and best <= c_threshold + tol
        succ[n] = best_succ
        if not found[n]:
            notes.append(f"level {n}: no condition-(b) witness found at budget {len(directions)}")
    cond_d = all(v >= 1.0 - tol for v in sphere_vals)
    cond_e = all(v >= c_threshold - tol for v in sphere_vals)
    return ShapiroDiagnostics(levels, sphere_vals, sphere_stats, cond_d, cond_e, c_threshold,
                              ratios, found, succ, scheme.n_max, notes)


# -- Jackson sequence -------------------------------------------------------

class JacksonSequence(NamedTuple):
    values: np.ndarray
    status: str


def jackson_sequence(space: Space, scheme: Scheme, n_max: int | None = None, *, Y_basis=None,
                     Y_weights=None, seed: int = 0, restarts: int = 16) -> JacksonSequence:
    """``c_n = E(S(Y), A_n)`` for ``n = 0..n_max``.

    ``Y`` is given either as a basis (ambient norm on Y) or as positive
    diagonal weights ``w`` defining ``||x||_Y = (sum w_k^2 x_k^2)^(1/2)``. In a
    Hilbert space the weighted case is the spectral norm of ``(I - P_{A_n}) W^{-1}``.
    """
    if (Y_basis is None) == (Y_weights is None):
        raise ValueError("give exactly one of Y_basis or Y_weights")
    if not scheme.is_linear:
        raise ValueError("jackson_sequence needs a linear scheme")
    top = scheme.n_max if n_max is None else int(n_max)
    out = []
    if Y_basis is not None:
        method = default_method(space)
        status = EXACT if method == "principal-angles" else LOWER
        for n in range(top + 1):
            out.append(farness(space, Y_basis, scheme.basis(n), method, seed=seed, restarts=restarts).value)
        return JacksonSequence(np.array(out), status)
    w = np.asarray(Y_weights, dtype=float)
    if w.shape != (space.dim,) or np.any(w <= 0) or not np.all(np.isfinite(w)):
        raise ValueError("Y_weights must be positive finite weights, one per coordinate")
    winv = np.diag(1.0 / w)
    if space.is_euclidean:
        for n in range(top + 1):
            qa = span_basis(scheme.basis(n))
            m = winv - qa @ (qa.T @ winv)
            out.append(float(np.linalg.norm(m, 2)))
        return JacksonSequence(np.array(out), EXACT)
    for n in range(top + 1):
        out.append(_sphere_search(space, winv, scheme.basis(n), restarts=restarts, seed=seed,
                                  max_iter=10_000, coef_norm=True))
    return JacksonSequence(np.array(out), LOWER)


# -- perturbation and approximation-space norms -----------------------------

def perturbation_bound(c: float, e: float, p: float = 1.0) -> float:
    """Farness constant ``((c^p - e^p) / (1 + c^p))^(1/p)`` of a perturbed subspace."""
    if not (0 < p <= 1):
        raise ValueError("p must lie in (0, 1]")
    if not (0 <= e < c):
        raise ValueError("need 0 <= e < c")
    return ((c**p - e**p) / (1.0 + c**p)) ** (1.0 / p)


def _profile_values(profile) -> np.ndarray:
    if isinstance(profile, ErrorProfile):
        return profile.errors
    return np.asarray(profile, dtype=float)


def approx_space_norm(profile, p: float, r: float) -> float:
    """Lorentz ``l_{p,r}`` norm of an error profile."""
    v = _profile_values(profile)
    if np.any(np.diff(v) > 1e-9):
        raise ValueError("profile must be non-increasing")
    return lorentz_norm(v, p, r)


def a_eps_norm(profile, eps) -> float:
    """``max_n E(x, A_n) / eps_n`` over the profile's range."""
    v = _profile_values(profile)
    e = np.asarray(list(eps), dtype=float)[: v.size]
    if e.size < v.size:
        raise ValueError("epsilon sequence shorter than the profile")
    if np.any(e <= 0):
        raise ValueError("epsilon must be positive on the profile range")
    return float(np.max(v / e))


# -- defining subspaces -----------------------------------------------------

class DefiningSubspace(NamedTuple):
    F_basis: np.ndarray
    delta: float
    threshold: float


def dsp_hilbert(space: Space, Y_basis, eps: float) -> DefiningSubspace:
    """Orthogonal complement ``F`` of ``Y``: ``||x|| <= 1`` and ``E(x, F) > threshold`` imply ``E(x, Y) <= eps``.

    ``threshold = sqrt(1 - eps^2)`` and ``delta = 1 - threshold``.
    """
    if not space.is_euclidean:
        raise ValueError("dsp_hilbert requires a Hilbert space")
    if not (0 < eps < 1):
        raise ValueError("eps must lie in (0, 1)")
    Y = as_matrix(Y_basis, space.dim)
    qy = span_basis(Y)
    F = null_space(qy.T) if qy.shape[1] else np.eye(space.dim)
    threshold = math.sqrt(1.0 - eps * eps)
    return DefiningSubspace(F, 1.0 - threshold, threshold)


def dsp_identity_residual(space: Space, x, Y_basis, F_basis) -> float:
    """``|E(x, Y)^2 + E(x, F)^2 - ||x||^2|` for complementary orthogonal subspaces."""
    x = as_vector(x, space.dim)
    ey = dist_subspace(space, x, Y_basis).error
    ef = dist_subspace(space, x, F_basis).error
    return abs(ey * ey + ef * ef - float(x @ x))


class C0Witness(NamedTuple):
    x: np.ndarray
    m: int
    delta: float
    dist_Y: float
    norm: float
    dist_F: float


def _tail_operator_norm(F: np.ndarray, m: int) -> float:
    """``||(P_m - I)|_F||`` in the sup norm: max of ``|f_i|``, ``i > m``, over the unit ball of F."""
    N, k = F.shape
    if k == 0 or m >= N:
        return 0.0
    best = 0.0
    a_ub = np.vstack([F, -F])
    b_ub = np.ones(2 * N)
    for i in range(m, N):
        if not np.any(F[i]):
            continue
        res = linprog(-F[i], A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * k, method="highs")
        if res.status == 0:
            best = max(best, -res.fun)
        else:
            return math.inf
    return best


def dsp_refute_c0(N: int, F_basis, c: float) -> C0Witness:
    """Witness ``x = (1, ..., 1, 0, ...)`` in sup-norm ``R^N`` with ``E(x, Y) = 1 = ||x||`` and ``E(x, F) >= c``.

    ``Y`` is the hyperplane of vectors with first coordinate 0. ``delta`` is the
    midpoint of ``(0, (1 - c)/2)`` and ``m >= dim F`` is the least index with
    ``||(P_m - I)|_F|| < delta``; ``x`` has ``m + 1`` ones.
    """
    if not (0 < c < 1):
        raise ValueError("c must lie in (0, 1)")
    space = Space.lp(INF, N)
    F = as_matrix(F_basis, N)
    if F.shape[1] and np.any(F[N - 1] != 0):
        raise ValueError("F must be supported within the first N-1 coordinates")
    F = span_basis(F) if F.shape[1] else F
    F = F * (np.abs(F) > 1e-15)
    delta = (1.0 - c) / 4.0
    m = None
    for cand in range(F.shape[1], N):
        if _tail_operator_norm(F, cand) < delta:
            m = cand
            break
    if m is None:
        raise ValueError(f"no m < N={N} with ||(P_m - I)|_F|| < {delta:g}")
    x = np.zeros(N)
    x[: m + 1] = 1.0
    y_basis = np.eye(N)[:, 1:]
    dist_y = dist_subspace(space, x, y_basis).error
    dist_f = dist_subspace(space, x, F).error
    return C0Witness(x, m, delta, dist_y, lp_norm(x, INF), dist_f)


class Int0Witness(NamedTuple):
    a: float
    b: float
    c: float
    min_norm: float
    residuals: tuple[float, float]


def int0_norm(a: float, b: float, c: float, alpha: float, p: float) -> float:
    """``||a 1_(0,alpha) - b 1_(alpha,1) + c||_p`` on ``(0, 1)`` with Lebesgue measure."""
    if p == INF:
        return max(abs(a + c), abs(c - b))
    return (alpha * abs(a + c) ** p + (1.0 - alpha) * abs(c - b) ** p) ** (1.0 / p)


def int0_witness(p: float, alpha: float) -> Int0Witness:
    """Step function of mean zero and norm 1 whose distance to the constants is below 1 (``p != 2``)."""
    if p == 2:
        raise ValueError("p = 2 is excluded: the constants are orthogonal to mean-zero functions")
    if not (p >= 1):
        raise ValueError("p must lie in [1, inf]")
    if not (0 < alpha < 0.5):
        raise ValueError("alpha must lie in (0, 1/2)")
    if p == INF:
        a = 1.0
        b = alpha / (1.0 - alpha)
        norm_res = abs(max(a, b) - 1.0)
    else:
        a = (alpha + (1.0 - alpha) ** (1.0 - p) * alpha**p) ** (-1.0 / p)
        b = alpha * a / (1.0 - alpha)
        norm_res = abs(alpha * a**p + (1.0 - alpha) * b**p - 1.0)
    balance = abs(alpha * a - (1.0 - alpha) * b)
    if p == 1.0:
        # piecewise linear with slope 2 alpha - 1 < 0 on (-a, b)
        c = b
    elif p == INF:
        c = 0.5 * (b - a)
    else:
        res = minimize_scalar(lambda t: int0_norm(a, b, t, alpha, p), bounds=(-a, b), method="bounded",
                              options={"xatol": 1e-12, "maxiter": 2000})
        c = float(res.x)
    return Int0Witness(a, b, c, int0_norm(a, b, c, alpha, p), (balance, norm_res))
