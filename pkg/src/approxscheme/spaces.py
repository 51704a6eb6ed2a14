"""Finite-dimensional normed and quasi-normed ambient spaces.

Three kinds of space are supported:

``lp``
    coordinate space with ``(sum |x_i|^p)^(1/p)`` for ``0 < p < inf`` and
    ``max |x_i|`` for ``p = inf``;
``hilbert``
    the Euclidean case, identical to ``lp`` with ``p = 2``;
``sup-grid``
    samples of a function on a fixed grid in ``[a, b]`` with the max norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

INF = math.inf

KINDS = ("lp", "sup-grid", "hilbert")


@dataclass(frozen=True)
class Space:
    """Norm structure of a finite-dimensional ambient space."""

    kind: str
    dim: int
    p: float = 2.0
    grid: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown space kind {self.kind!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        if self.kind == "hilbert":
            object.__setattr__(self, "p", 2.0)
        elif self.kind == "sup-grid":
            object.__setattr__(self, "p", INF)
            if self.grid is None or len(self.grid) != self.dim:
                raise ValueError("sup-grid space needs a grid with dim points")
            g = np.asarray(self.grid, dtype=float)
            if np.any(np.diff(g) <= 0):
                raise ValueError("grid must be strictly increasing")
        elif not self.p > 0:
            raise ValueError(f"exponent p must be positive, got {self.p}")

    @classmethod
    def lp(cls, p: float, dim: int) -> "Space":
        return cls("lp", dim, float(p))

    @classmethod
    def hilbert(cls, dim: int) -> "Space":
        return cls("hilbert", dim)

    @classmethod
    def sup_grid(cls, grid: Sequence[float]) -> "Space":
        grid = tuple(float(t) for t in grid)
        return cls("sup-grid", len(grid), INF, grid)

    @classmethod
    def chebyshev_grid(cls, a: float, b: float, size: int = 2048) -> "Space":
        """Sup-norm space sampled at ``size`` Chebyshev-Lobatto points of ``[a, b]``."""
        if not a < b:
            raise ValueError("need a < b")
        if size < 2:
            raise ValueError("grid needs at least two points")
        k = np.arange(size)
        t = -np.cos(np.pi * k / (size - 1))
        pts = 0.5 * (a + b) + 0.5 * (b - a) * t
        pts[0], pts[-1] = a, b
        return cls.sup_grid(pts)

    @property
    def is_euclidean(self) -> bool:
        return self.kind == "hilbert" or (self.kind == "lp" and self.p == 2.0)

    @property
    def is_normed(self) -> bool:
        return self.p >= 1

    @property
    def is_sup(self) -> bool:
        return self.p == INF

    @property
    def interval(self) -> tuple[float, float] | None:
        if self.grid is None:
            return None
        return self.grid[0], self.grid[-1]

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind, "dim": self.dim}
        if self.kind == "lp":
            d["p"] = "inf" if self.p == INF else self.p
        if self.grid is not None:
            d["grid"] = list(self.grid)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Space":
        kind = d["kind"]
        if kind == "hilbert":
            return cls.hilbert(int(d["dim"]))
        if kind == "sup-grid":
            if "grid" in d:
                return cls.sup_grid(d["grid"])
            a, b = d.get("interval", (0.0, 1.0))
            return cls.chebyshev_grid(a, b, int(d["dim"]))
        p = d.get("p", 2.0)
        p = INF if p in ("inf", "Infinity", None) else float(p)
        return cls.lp(p, int(d["dim"]))


class PNormProfile(NamedTuple):
    p_convexity: float
    quasi_constant: float


def pnorm_profile(space: Space) -> PNormProfile:
    """p-convexity exponent and quasi-triangle constant of the space's (quasi-)norm."""
    if space.p >= 1:
        return PNormProfile(1.0, 1.0)
    return PNormProfile(space.p, 2.0 ** (1.0 / space.p - 1.0))


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Validate ``x`` as a finite real coordinate vector (optionally of length ``dim``)."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError("a vector must be a non-empty 1-d array")
    if dim is not None and v.size != dim:
        raise ValueError(f"dimension mismatch: vector has {v.size} entries, space has dim {dim}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def lp_norm(v: np.ndarray, p: float) -> float:
    """(Quasi-)norm of a raw array; no validation."""
    a = np.abs(v)
    if a.size == 0:
        return 0.0
    m = a.max()
    if m == 0.0:
        return 0.0
    if p == INF:
        return float(m)
    if p == 1.0:
        return float(a.sum())
    # scale by the max entry to avoid overflow/underflow in |x|^p
    if p == 2.0:
        return float(m * np.linalg.norm(a / m))
    return float(m * np.sum((a / m) ** p) ** (1.0 / p))


def norm(space: Space, x) -> float:
    """Norm of ``x`` in ``space``."""
    return lp_norm(as_vector(x, space.dim), space.p)


def rearrange_nonincreasing(a) -> np.ndarray:
    """Moduli of ``a`` sorted in non-increasing order (stable in the original index)."""
    v = np.abs(as_vector(a))
    order = np.argsort(-v, kind="stable")
    return v[order]


def lorentz_norm(a, p: float, r: float) -> float:
    """Lorentz ``l_{p,r}`` norm ``[sum_n n^(rp-1) (a*_n)^p]^(1/p)`` of a finite sequence."""
    if not (p > 0 and r > 0):
        raise ValueError("Lorentz exponents p and r must be positive")
    star = rearrange_nonincreasing(a)
    n = np.arange(1, star.size + 1, dtype=float)
    if p == INF:
        return float(np.max(n**r * star))
    weighted = n ** ((r * p - 1.0) / p) * star
    return lp_norm(weighted, p)


class ConvexityEstimate(NamedTuple):
    value: float
    status: str  # "exact" or "upper-bound-estimate"


def _hull_scale(d: np.ndarray, v: np.ndarray, p: float, tol: float = 1e-13) -> float:
    """Largest ``t >= 0`` with ``||t d + v|| <= 1`` and ``||t d - v|| <= 1``."""
    from scipy.optimize import brentq

    def g(t):
        return max(lp_norm(t * d + v, p), lp_norm(t * d - v, p)) - 1.0

    if g(0.0) > 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    while g(hi) <= 0.0:
        lo, hi = hi, 2.0 * hi
    # g is convex with g(lo) <= 0 < g(hi), so the crossing is unique
    return brentq(g, lo, hi, xtol=tol)


def modulus_of_convexity(space: Space, eps: float, *, n_starts: int = 64, seed: int = 0,
                         tol: float = 1e-6) -> ConvexityEstimate:
    """Modulus of convexity ``delta(eps)``.

    Euclidean spaces use the closed form ``1 - sqrt(1 - eps^2/4)``. Other norms
    are searched over pairs ``x = u + v``, ``y = u - v`` with ``||v|| = eps/2``:
    for fixed directions the largest admissible ``u`` is found by bisection and
    the directions are refined with Nelder-Mead from ``n_starts`` seeded starts.
    The search value is an upper bound on the infimum.
    """
    from scipy.optimize import minimize

    if not (0 < eps <= 2):
        raise ValueError("eps must lie in (0, 2]")
    if not space.is_normed:
        raise ValueError("modulus of convexity is defined for normed spaces (p >= 1)")
    p, dim = space.p, space.dim
    if dim == 1:
        return ConvexityEstimate(eps / 2.0, "exact")
    if space.is_euclidean:
        return ConvexityEstimate(1.0 - math.sqrt(max(0.0, 1.0 - eps * eps / 4.0)), "exact")

    def objective(z):
        d, v = z[:dim], z[dim:]
        nd, nv = lp_norm(d, p), lp_norm(v, p)
        if nd == 0 or nv == 0:
            return 1.0
        d = d / nd
        v = v * (eps / 2.0 / nv)
        return 1.0 - _hull_scale(d, v, p)

    starts = []
    e = np.eye(dim)
    starts.append(np.concatenate([e[0], e[1]]))
    starts.append(np.concatenate([e[0] + e[1], e[0] - e[1]]))
    starts.append(np.concatenate([e[0] - e[1], e[0] + e[1]]))
    rng = np.random.default_rng(seed)
    while len(starts) < n_starts:
        starts.append(rng.standard_normal(2 * dim))
    best = 1.0
    for z0 in starts:
        val = objective(z0)
        res = minimize(objective, z0, method="Nelder-Mead",
                       options={"xatol": 1e-9, "fatol": tol * 1e-3, "maxiter": 200 * dim})
        best = min(best, val, float(res.fun))
        if best <= 0.0:
            break
    return ConvexityEstimate(float(min(max(best, 0.0), 1.0)), "upper-bound-estimate")
