"""Constructions of slowly approximable elements inside a prescribed subspace."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import brentq, minimize_scalar

from .bestapprox import ErrorProfile, dist_subspace, error_profile, level_error
from .errors import (CallbackContractError, IndexSelectionExhausted, InsufficientSubspace,
                     LambdaInfeasible)
from .schemes import Scheme, as_matrix, k_map, k_power, rank, span_basis
from .spaces import Space, as_vector, lp_norm, pnorm_profile


@dataclass(frozen=True)
class EpsilonSequence:
    """Finite non-increasing target sequence ``eps_0 >= eps_1 >= ... >= 0`` with ``eps_0 > 0``."""

    values: tuple[float, ...]

    def __init__(self, values: Sequence[float]):
        vals = tuple(float(v) for v in values)
        if not vals:
            raise ValueError("epsilon sequence is empty")
        if any(not math.isfinite(v) or v < 0 for v in vals):
            raise ValueError("epsilon values must be finite and non-negative")
        if vals[0] <= 0:
            raise ValueError("eps_0 must be positive")
        for n in range(1, len(vals)):
            if vals[n] > vals[n - 1]:
                raise ValueError(f"epsilon sequence is not non-increasing at n={n}")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]

    def __iter__(self):
        return iter(self.values)

    @property
    def horizon(self) -> int:
        return len(self.values) - 1

    @classmethod
    def geometric(cls, ratio: float, length: int, start: float = 1.0) -> "EpsilonSequence":
        return cls([start * ratio**n for n in range(length)])


def _as_eps(eps) -> EpsilonSequence:
    return eps if isinstance(eps, EpsilonSequence) else EpsilonSequence(eps)


@dataclass
class CertificateReport:
    levels: list[int]
    errors: list[float]
    targets: list[float]
    passed: list[bool]
    max_ratio: float
    tol: float

    @property
    def all_passed(self) -> bool:
        return all(self.passed)

    def failures(self) -> list[int]:
        return [n for n, ok in zip(self.levels, self.passed) if not ok]

    def to_dict(self) -> dict:
        return {
            "levels": self.levels,
            "errors": self.errors,
            "targets": self.targets,
            "passed": self.passed,
            "all_passed": self.all_passed,
            "max_ratio": self.max_ratio,
            "tol": self.tol,
        }


@dataclass
class WitnessResult:
    y: np.ndarray
    profile: ErrorProfile
    certificates: list[dict]
    construction_log: dict = field(default_factory=dict)

    @property
    def all_certified(self) -> bool:
        return all(c["passed"] for c in self.certificates)


def verify_witness(space: Space, scheme: Scheme, y, eps, tol: float = 0.0,
                   n_range: Sequence[int] | None = None) -> CertificateReport:
    """Recompute ``E(y, A_n)`` and check ``E(y, A_n) >= eps_n - tol`` level by level.

    ``max_ratio`` is ``max_n E(y, A_n) / eps_n`` over levels with ``eps_n > 0``.
    """
    eps = _as_eps(eps)
    y = as_vector(y, space.dim)
    if n_range is None:
        n_range = range(min(scheme.n_max, eps.horizon) + 1)
    prof = error_profile(space, y, scheme, list(n_range))
    levels, errors, targets, passed = [], [], [], []
    ratio = 0.0
    for entry in prof.entries:
        target = eps[entry.n]
        levels.append(entry.n)
        errors.append(entry.error)
        targets.append(target)
        passed.append(bool(entry.error >= target - tol))
        if target > 0:
            ratio = max(ratio, entry.error / target)
    return CertificateReport(levels, errors, targets, passed, ratio, tol)


# -- Bernstein-type construction --------------------------------------------

def _dist(space: Space, v: np.ndarray, basis: np.ndarray) -> float:
    return dist_subspace(space, v, basis).error


def _unit_sample(space: Space, ybasis: np.ndarray, rng, count: int) -> list[np.ndarray]:
    out = []
    for _ in range(count):
        v = ybasis @ rng.standard_normal(ybasis.shape[1])
        nv = lp_norm(v, space.p)
        if nv > 0:
            out.append(v / nv)
    return out


def _solve_lambda(space: Space, z: np.ndarray, w: np.ndarray, basis: np.ndarray,
                  target: float, xtol: float) -> float | None:
    """A root of ``E(z + lam w, basis) = target``, or ``None`` if the minimum exceeds it."""

    def phi(lam):
        return _dist(space, z + lam * w, basis) - target

    f0 = phi(0.0)
    if f0 == 0.0:
        return 0.0
    scale = (lp_norm(z, space.p) + target) / max(lp_norm(w, space.p), 1e-300) + 1.0
    lo = 0.0
    if f0 > 0.0:
        res = minimize_scalar(phi, bracket=(0.0, scale), method="brent",
                              options={"xtol": 1e-12})
        if res.fun > 0.0:
            if res.fun > 1e-12 * max(target, 1.0):
                return None
            return float(res.x)
        lo = float(res.x)
    hi = lo + scale
    while phi(hi) < 0.0:
        hi = lo + 2.0 * (hi - lo)
    return float(brentq(phi, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps))


def bernstein_construct(space: Space, scheme: Scheme, Y_basis, eps, horizon: int | None = None,
                        *, seed: int = 0, retries: int = 64, samples: int = 128,
                        tol: float = 1e-10) -> WitnessResult:
    """Build ``y`` in ``Y`` with ``||y|| = eps_0`` and ``E(y, A_n) >= eps_n`` for ``n <= horizon``.

    An auxiliary chain ``B_k = B_{k-1} + A_k + span(v_k)`` with ``v_k`` in ``Y``
    is grown first. Starting from ``z`` in ``B_{h+1} n Y`` scaled so that
    ``E(z, B_h) = eps_h``, the levels are fixed top-down: at level ``k`` a
    ``w`` in ``(B_k n Y) minus B_{k-1}`` and a coefficient ``lam`` with
    ``E(z + lam w, B_{k-1}) = eps_{k-1}`` are found. Adding ``lam w`` does not
    change the distances to ``B_k, B_{k+1}, ...``, so at the end
    ``E(y, B_k) = eps_k`` for every ``k``, which dominates ``E(y, A_k)``
    from below because ``A_k c B_k``.
    """
    eps = _as_eps(eps)
    if not space.is_normed:
        raise ValueError("bernstein_construct needs a Banach space (p >= 1)")
    if not scheme.is_linear:
        raise ValueError("bernstein_construct needs a linear scheme")
    h = eps.horizon if horizon is None else int(horizon)
    if h < 0 or h > eps.horizon:
        raise ValueError(f"horizon {h} outside the epsilon sequence (length {len(eps)})")
    Y = as_matrix(Y_basis, space.dim)
    ry = rank(Y)
    if ry <= h:
        raise InsufficientSubspace(f"rank(Y)={ry} must exceed the horizon {h}")
    if rank(scheme.basis(0)) != 0:
        raise ValueError("bernstein_construct needs A_0 = {0}")
    rng = np.random.default_rng(seed)
    Yq = span_basis(Y)

    # chain B_0 c B_1 c ... c B_{h+1}
    chain = [np.zeros((space.dim, 0))]
    picks = []
    for k in range(1, h + 2):
        a_k = scheme.basis(min(k, scheme.n_max))
        base = span_basis(np.hstack([chain[-1], a_k]))
        cands = _unit_sample(space, Yq, rng, samples) + [Yq[:, i] / lp_norm(Yq[:, i], space.p)
                                                         for i in range(Yq.shape[1])]
        dists = [_dist(space, v, base) for v in cands]
        i = int(np.argmax(dists))
        if dists[i] <= tol:
            raise InsufficientSubspace(f"Y is contained in B_{k - 1} + A_{k}", level=k)
        picks.append(cands[i])
        chain.append(span_basis(np.hstack([base, cands[i][:, None]])))

    # start: z in (B_{h+1} n Y) minus B_h with E(z, B_h) = eps_h
    v = picks[h]
    d = _dist(space, v, chain[h])
    z = (eps[h] / d) * v
    log = {"seed": seed, "horizon": h, "chain_dims": [c.shape[1] for c in chain],
           "initial_scale": eps[h] / d, "lambdas": {}, "retries": {}}

    for k in range(h, 0, -1):
        target = eps[k - 1]
        inter = _intersection(chain[k], Yq)
        lam, tries = None, 0
        w = picks[k - 1]
        while True:
            if _dist(space, w, chain[k - 1]) > tol * max(lp_norm(w, space.p), 1.0):
                lam = _solve_lambda(space, z, w, chain[k - 1], target, xtol=1e-14 * (1 + lp_norm(z, space.p)))
                if lam is not None:
                    break
            tries += 1
            if tries > retries or inter.shape[1] == 0:
                raise LambdaInfeasible(f"no coefficient attains eps_{k - 1}={target:g} after {tries} draws of w",
                                       level=k)
            w = inter @ rng.standard_normal(inter.shape[1])
        z = z + lam * w
        log["lambdas"][k] = lam
        log["retries"][k] = tries

    y = z
    b_errors = [_dist(space, y, chain[k]) for k in range(h + 1)]
    log["B_errors"] = b_errors
    report = verify_witness(space, scheme, y, eps, tol=tol, n_range=range(min(h, scheme.n_max) + 1))
    profile = error_profile(space, y, scheme, report.levels)
    certs = [{"n": n, "error": e, "target": t, "passed": ok}
             for n, e, t, ok in zip(report.levels, report.errors, report.targets, report.passed)]
    return WitnessResult(y, profile, certs, log)


def _intersection(b: np.ndarray, yq: np.ndarray) -> np.ndarray:
    """Basis of ``span(b) n span(yq)`` (columns in ambient coordinates)."""
    if b.shape[1] == 0 or yq.shape[1] == 0:
        return np.zeros((b.shape[0], 0))
    ns = null_space(np.hstack([b, -yq]), rcond=1e-10)
    if ns.shape[1] == 0:
        return np.zeros((b.shape[0], 0))
    return span_basis(yq @ ns[b.shape[1]:, :])


# -- series construction ----------------------------------------------------

FarWitness = Callable[[int], np.ndarray]


def series_construct(space: Space, scheme: Scheme, far_witness: FarWitness, c: float, eps, J: int,
                     *, member_tol: float = 1e-10) -> WitnessResult:
    """Sum ``y = sum_j alpha_j y_j`` of far elements with ``E(y, A_{i_{j-1}}) >= 2^{j-1} eps_{i_{j-1}}``.

    ``far_witness(level)`` must return ``y`` with ``||y|| < 1`` and
    ``E(y, A_level) > c``. Indices follow ``s_j = K^j(i_{j-1})``, ``i_j > s_j``
    with ``y_j`` in ``A_{i_j}`` and ``eps_{i_j} < c eps_{i_{j-1}} / 8^{1/p}``;
    weights are ``alpha_j = 2^{j/p} eps_{i_{j-1}} / c``.
    """
    eps = _as_eps(eps)
    if not (0 < c < 1):
        raise ValueError("c must lie in (0, 1)")
    if J < 1:
        raise ValueError("J must be at least 1")
    p = pnorm_profile(space).p_convexity
    limit = min(scheme.n_max, eps.horizon)
    indices = [0]
    s_list, alphas, ys = [], [], []
    for j in range(1, J + 1):
        prev = indices[-1]
        try:
            s_j = k_power(scheme, prev, j)
            level = k_map(scheme, s_j)
        except ValueError as exc:
            raise IndexSelectionExhausted(f"K-iterates leave the horizon: {exc}", level=prev) from exc
        y_j = as_vector(far_witness(level), space.dim)
        ny = lp_norm(y_j, space.p)
        far, _ = level_error(space, y_j, scheme, level)
        if not (ny < 1.0 and far > c):
            raise CallbackContractError(f"witness has norm {ny:.6g} and E(y, A_{level})={far:.6g}; need < 1 and > {c}",
                                        level=level)
        bound = c * eps[prev] / 8.0 ** (1.0 / p)
        chosen = None
        for i in range(s_j + 1, limit + 1):
            if eps[i] < bound and level_error(space, y_j, scheme, i)[0] <= member_tol * max(ny, 1e-300):
                chosen = i
                break
        if chosen is None:
            raise IndexSelectionExhausted(f"no index i in ({s_j}, {limit}] with eps_i < {bound:.3g} and y_{j} in A_i",
                                          level=j)
        indices.append(chosen)
        s_list.append(s_j)
        alphas.append(2.0 ** (j / p) * eps[prev] / c)
        ys.append(y_j)

    y = sum(a * v for a, v in zip(alphas, ys))
    certs = []
    for j in range(1, J + 1):
        n = indices[j - 1]
        err, _ = level_error(space, y, scheme, n)
        target = 2.0 ** (j - 1) * eps[n]
        certs.append({"j": j, "n": n, "error": err, "target": target, "passed": bool(err >= target)})
    profile = error_profile(space, y, scheme, range(limit + 1))
    log = {"indices": indices, "s": s_list, "alphas": alphas, "p": p, "c": c,
           "alpha_p_sum": float(sum(a**p for a in alphas))}
    return WitnessResult(y, profile, certs, log)
