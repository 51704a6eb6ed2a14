"""Best-approximation errors ``E(x, A) = inf_{a in A} ||x - a||``.

Solver per norm:

* Euclidean: orthogonal projection (exact);
* ``p = 1``, ``p = inf`` and sup-grid: linear programs solved with HiGHS (exact);
* ``1 < p < inf``: damped Newton on ``sum |r_i|^p`` (converged to a KKT tolerance);
* ``p < 1``: multi-start vertex enumeration plus coordinate descent (upper bound).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import BudgetExceeded, SolverError
from .schemes import Dictionary, Scheme, as_matrix, span_basis
from .spaces import INF, Space, as_vector, lp_norm

EXACT = "exact"
CONVERGED = "converged"
UPPER = "upper-bound"
LOWER = "lower-bound"
STATUSES = (EXACT, CONVERGED, UPPER, LOWER)


class BestApproximation(NamedTuple):
    error: float
    minimizer: np.ndarray
    status: str


class NTermApproximation(NamedTuple):
    error: float
    support: tuple[int, ...]
    status: str


@dataclass(frozen=True)
class ProfileEntry:
    n: int
    error: float
    status: str


@dataclass(frozen=True)
class ErrorProfile:
    """The sequence ``E(x, A_n)`` over a range of levels."""

    entries: tuple[ProfileEntry, ...]

    @property
    def levels(self) -> list[int]:
        return [e.n for e in self.entries]

    @property
    def errors(self) -> np.ndarray:
        return np.array([e.error for e in self.entries])

    @property
    def statuses(self) -> list[str]:
        return [e.status for e in self.entries]

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def is_nonincreasing(self, slack: float = 1e-9) -> bool:
        e = self.errors
        return bool(np.all(np.diff(e) <= slack))

    def to_rows(self) -> list[dict]:
        return [{"n": e.n, "error": e.error, "status": e.status} for e in self.entries]


# -- per-norm solvers -------------------------------------------------------

def _lp_inf(x: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Coefficients minimising ``max |x - q c|`` (discrete Chebyshev problem)."""
    m, k = q.shape
    # variables (c, t); minimise t subject to |x - q c| <= t
    cost = np.zeros(k + 1)
    cost[-1] = 1.0
    ones = np.ones((m, 1))
    a_ub = np.vstack([np.hstack([-q, -ones]), np.hstack([q, -ones])])
    b_ub = np.concatenate([-x, x])
    bounds = [(None, None)] * k + [(0, None)]
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        raise SolverError(f"sup-norm LP failed: {res.message}")
    return res.x[:k]


def _lp_one(x: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Coefficients minimising ``sum |x - q c|``."""
    m, k = q.shape
    cost = np.concatenate([np.zeros(k), np.ones(m)])
    eye = np.eye(m)
    a_ub = np.vstack([np.hstack([-q, -eye]), np.hstack([q, -eye])])
    b_ub = np.concatenate([-x, x])
    bounds = [(None, None)] * k + [(0, None)] * m
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        raise SolverError(f"l1 LP failed: {res.message}")
    return res.x[:k]


def _kkt_residual(r: np.ndarray, q: np.ndarray, p: float) -> float:
    psi = np.sign(r) * np.abs(r) ** (p - 1.0)
    scale = np.linalg.norm(psi)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(q.T @ psi) / scale)


def _newton_lp(x: np.ndarray, q: np.ndarray, p: float, tol: float, max_iter: int) -> np.ndarray:
    """Damped Newton for ``min_c sum |x - q c|^p`` with ``1 < p < inf`` (``q`` orthonormal)."""
    scale = np.max(np.abs(x))
    xs = x / scale
    c = q.T @ xs

    def f(cc):
        return float(np.sum(np.abs(xs - q @ cc) ** p))

    fc = f(c)
    eta = 1e-14
    stall = 0
    for _ in range(max_iter):
        r = xs - q @ c
        if _kkt_residual(r, q, p) <= tol:
            return c * scale
        a = np.maximum(np.abs(r), eta)
        grad = -p * (q.T @ (np.sign(r) * a ** (p - 1.0)))
        w = p * (p - 1.0) * a ** (p - 2.0)
        h = (q.T * w) @ q
        h += 1e-14 * np.trace(h) / max(h.shape[0], 1) * np.eye(h.shape[0])
        try:
            step = -np.linalg.solve(h, grad)
        except np.linalg.LinAlgError:
            step = -grad
        t = 1.0
        gs = float(grad @ step)
        while t > 1e-20:
            cn = c + t * step
            fn = f(cn)
            if fn <= fc + 1e-4 * t * gs:
                break
            t *= 0.5
        else:
            cn, fn = c, fc
        if fn >= fc:
            stall += 1
            if stall >= 5:
                break
        else:
            stall = 0
        c, fc = cn, fn
    r = xs - q @ c
    if _kkt_residual(r, q, p) <= max(tol, 1e-5):
        # stalled at the floating-point floor; value is accurate to well below tol
        return c * scale
    raise SolverError(f"l{p} Newton solver did not reach KKT residual {tol:g} in {max_iter} iterations")


def _quasi_lp(x: np.ndarray, q: np.ndarray, p: float, restarts: int, seed: int) -> np.ndarray:
    """Heuristic minimiser of ``sum |x - q c|^p`` for ``0 < p < 1``.

    The objective is concave on each sign cell, so minima sit at points where
    at least ``rank`` residuals vanish. Starts: the l1 and l2 solutions and
    seeded interpolants on random row subsets; each is polished by exact 1-d
    minimisation along coordinates (breakpoint enumeration).
    """
    m, k = q.shape
    rng = np.random.default_rng(seed)

    def f(cc):
        return float(np.sum(np.abs(x - q @ cc) ** p))

    starts = [q.T @ x, _lp_one(x, q)]
    for _ in range(restarts):
        rows = rng.choice(m, size=k, replace=False)
        try:
            starts.append(np.linalg.solve(q[rows], x[rows]))
        except np.linalg.LinAlgError:
            continue
    best_c, best_f = None, math.inf
    for c in starts:
        c = np.array(c, dtype=float)
        fc = f(c)
        improved = True
        sweeps = 0
        while improved and sweeps < 50:
            improved = False
            sweeps += 1
            for j in range(k):
                col = q[:, j]
                others = np.delete(np.arange(k), j)
                r = x - q[:, others] @ c[others]
                nz = np.abs(col) > 1e-15
                cand = r[nz] / col[nz]
                vals = np.sum(np.abs(r[:, None] - np.outer(col, cand)) ** p, axis=0)
                i = int(np.argmin(vals))
                if vals[i] < fc - 1e-15 * max(fc, 1.0):
                    trial = c.copy()
                    trial[j] = cand[i]
                    ft = f(trial)
                    if ft < fc:
                        c, fc = trial, ft
                        improved = True
        if fc < best_f:
            best_c, best_f = c, fc
    return best_c


def dist_subspace(space: Space, x, basis, *, tol: float = 1e-7, max_iter: int = 100_000,
                  restarts: int = 32, seed: int = 0) -> BestApproximation:
    """Distance from ``x`` to the span of the columns of ``basis``.

    Returns ``(error, minimizer, status)`` where ``minimizer`` is the best
    approximant in the span and ``error`` is recomputed as ``||x - minimizer||``.
    """
    x = as_vector(x, space.dim)
    b = as_matrix(basis, space.dim)
    q = span_basis(b)
    if q.shape[1] == 0 or not np.any(x):
        a = np.zeros_like(x)
        return BestApproximation(lp_norm(x, space.p), a, EXACT)
    p = space.p
    if space.is_euclidean:
        a = q @ (q.T @ x)
        status = EXACT
    elif p == INF:
        a = q @ _lp_inf(x, q)
        status = EXACT
    elif p == 1.0:
        a = q @ _lp_one(x, q)
        status = EXACT
    elif p > 1.0:
        a = q @ _newton_lp(x, q, p, tol, max_iter)
        status = CONVERGED
    else:
        c = _quasi_lp(x, q, p, restarts, seed)
        a = q @ c
        # minimisers zero whole residual entries; entries below their own rounding
        # bound are those zeros, and |r_i|^p would inflate the noise otherwise
        bound = 8 * np.finfo(float).eps * (np.abs(x) + np.abs(q) @ np.abs(c))
        snap = np.abs(x - a) <= bound
        a[snap] = x[snap]
        status = UPPER
    return BestApproximation(lp_norm(x - a, p), a, status)


def projection_residual_norms(x: np.ndarray, basis) -> tuple[float, float]:
    """Euclidean ``(||x - Px||, ||Px||)`` for the orthogonal projection onto span(basis)."""
    q = span_basis(basis)
    px = q @ (q.T @ x)
    return float(np.linalg.norm(x - px)), float(np.linalg.norm(px))


# -- n-term approximation ---------------------------------------------------

def _require_hilbert(space: Space, op: str):
    if not space.is_euclidean:
        raise ValueError(f"{op} requires a Hilbert (l2) space")


def dist_nterm(space: Space, x, dictionary: Dictionary, n: int, mode: str = "exact-orthonormal",
               *, budget: int = 10**6) -> NTermApproximation:
    """Error of best ``n``-term approximation from a dictionary in a Hilbert space."""
    _require_hilbert(space, "dist_nterm")
    if n < 0:
        raise ValueError("n must be non-negative")
    x = as_vector(x, space.dim)
    atoms = dictionary.atoms
    if atoms.shape[0] != space.dim:
        raise ValueError("dimension mismatch between dictionary and space")
    m = atoms.shape[1]
    n_eff = min(n, m)
    if mode == "exact-orthonormal":
        if not dictionary.orthonormal:
            raise ValueError("exact-orthonormal mode requires an orthonormal dictionary")
        coef = atoms.T @ x
        outside = x - atoms @ coef
        order = np.argsort(-np.abs(coef), kind="stable")
        keep = order[:n_eff]
        tail = coef[order[n_eff:]]
        err = math.sqrt(float(outside @ outside) + float(tail @ tail))
        return NTermApproximation(err, tuple(sorted(int(i) for i in keep)), EXACT)
    if mode == "exhaustive":
        count = math.comb(m, n_eff)
        if count > budget:
            raise BudgetExceeded(f"C({m},{n_eff})={count} exceeds budget {budget}", level=n)
        best_err, best_sub = math.inf, ()
        for sub in itertools.combinations(range(m), n_eff):
            err, _ = projection_residual_norms(x, atoms[:, list(sub)]) if sub else (float(np.linalg.norm(x)), 0.0)
            if err < best_err:
                best_err, best_sub = err, sub
        return NTermApproximation(best_err, tuple(best_sub), EXACT)
    if mode == "greedy":
        support: list[int] = []
        r = x.copy()
        norms = np.linalg.norm(atoms, axis=0)
        norms[norms == 0] = 1.0
        for _ in range(n_eff):
            corr = np.abs(atoms.T @ r) / norms
            corr[support] = -1.0
            j = int(np.argmax(corr))
            if corr[j] <= 0:
                break
            support.append(j)
            q = span_basis(atoms[:, support])
            r = x - q @ (q.T @ x)
        return NTermApproximation(float(np.linalg.norm(r)), tuple(sorted(support)), UPPER)
    raise ValueError(f"unknown n-term mode {mode!r}")


# -- profiles ---------------------------------------------------------------

def level_error(space: Space, x, scheme: Scheme, n: int, *, nterm_mode: str | None = None,
                **solver_kw) -> tuple[float, str]:
    """``E(x, A_n)`` for a single level of a scheme."""
    try:
        if scheme.is_linear:
            res = dist_subspace(space, x, scheme.basis(n), **solver_kw)
            return res.error, res.status
        d = scheme.dictionary
        mode = nterm_mode
        if mode is None:
            if d.orthonormal:
                mode = "exact-orthonormal"
            elif math.comb(d.size, min(n, d.size)) <= 10**6:
                mode = "exhaustive"
            else:
                mode = "greedy"
        res = dist_nterm(space, x, d, n, mode)
        return res.error, res.status
    except (SolverError, BudgetExceeded) as exc:
        raise type(exc)(str(exc), level=n) from exc


def error_profile(space: Space, x, scheme: Scheme, n_range: Sequence[int] | None = None,
                  **kw) -> ErrorProfile:
    """``E(x, A_n)`` for every ``n`` in ``n_range`` (default: all levels).

    Upper-bound entries are replaced by the running minimum, which is still a
    valid upper bound because the levels are nested.
    """
    x = as_vector(x, space.dim)
    levels = list(range(scheme.n_max + 1)) if n_range is None else sorted(n_range)
    entries = []
    best_upper = math.inf
    for n in levels:
        err, status = level_error(space, x, scheme, n, **kw)
        if status == UPPER:
            best_upper = min(best_upper, err)
            err = best_upper
        entries.append(ProfileEntry(n, float(err), status))
    return ErrorProfile(tuple(entries))
