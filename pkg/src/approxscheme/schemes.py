"""Nested approximant families ``A_0 c A_1 c ... c A_N`` truncated at a finite horizon."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .spaces import Space

RANK_RTOL = 1e-10
LINEAR_KINDS = ("linear-chain", "poly-grid", "projected", "sum-with-F")
SCHEME_KINDS = LINEAR_KINDS + ("nterm-dictionary",)


def as_matrix(m, dim: int | None = None) -> np.ndarray:
    """Coerce to a 2-d float array whose columns are vectors of the space."""
    a = np.asarray(m, dtype=float)
    if a.size == 0:
        return np.zeros((dim if dim is not None else 0, 0))
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ValueError("basis must be a 2-d array")
    if dim is not None and a.shape[0] != dim:
        raise ValueError(f"dimension mismatch: basis columns have {a.shape[0]} entries, space has dim {dim}")
    if not np.all(np.isfinite(a)):
        raise ValueError("basis has non-finite entries")
    return a


def span_basis(m, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal (Euclidean) basis of the column span; singular values below ``rtol * s_max`` are dropped."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[1] == 0:
        return np.zeros((a.shape[0] if a.ndim == 2 else 0, 0))
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[0], 0))
    r = int(np.sum(s > rtol * s[0]))
    return u[:, :r]


def rank(m, rtol: float = RANK_RTOL) -> int:
    return span_basis(m, rtol).shape[1]


def span_residual(vectors, basis) -> np.ndarray:
    """Euclidean distance of each column of ``vectors`` to span(``basis``), relative to its length."""
    v = np.asarray(vectors, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    q = span_basis(basis)
    r = v - q @ (q.T @ v)
    lengths = np.linalg.norm(v, axis=0)
    out = np.linalg.norm(r, axis=0)
    nz = lengths > 0
    out[nz] /= lengths[nz]
    return out


@dataclass(frozen=True, eq=False)
class Dictionary:
    """Finite dictionary of atoms (columns of ``atoms``)."""

    atoms: np.ndarray
    orthonormal: bool = False

    def __post_init__(self):
        a = as_matrix(self.atoms)
        object.__setattr__(self, "atoms", a)
        if self.orthonormal:
            g = a.T @ a
            if np.max(np.abs(g - np.eye(a.shape[1])), initial=0.0) > 1e-10:
                raise ValueError("atoms flagged orthonormal are not orthonormal to 1e-10")

    @property
    def size(self) -> int:
        return self.atoms.shape[1]


def chebyshev_vandermonde(grid: np.ndarray, degree_below: int) -> np.ndarray:
    """Samples of Chebyshev polynomials ``T_0..T_{n-1}`` mapped to the grid's interval."""
    grid = np.asarray(grid, dtype=float)
    a, b = grid[0], grid[-1]
    t = (2.0 * grid - (a + b)) / (b - a)
    return np.polynomial.chebyshev.chebvander(t, max(degree_below - 1, 0))[:, :degree_below]


@dataclass(frozen=True, eq=False)
class Scheme:
    """Extensional description of ``A_0, ..., A_{n_max}`` plus its ``K`` map.

    Linear kinds store one basis matrix per level. ``nterm-dictionary`` stores
    the dictionary; level ``n`` is the union of spans of ``n``-subsets.
    """

    kind: str
    space: Space
    n_max: int
    bases: tuple[np.ndarray, ...] = ()
    dictionary: Dictionary | None = None
    k_map_kind: str = "identity"
    k_table: tuple[int, ...] | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.k_map_kind not in ("identity", "double", "custom"):
            raise ValueError(f"unknown k_map kind {self.k_map_kind!r}")
        if self.k_map_kind == "custom":
            if self.k_table is None or len(self.k_table) < self.n_max + 1:
                raise ValueError("custom k_map needs a table covering levels 0..n_max")
        if self.kind == "nterm-dictionary":
            if self.dictionary is None:
                raise ValueError("nterm-dictionary scheme needs a dictionary")
            if self.dictionary.atoms.shape[0] != self.space.dim:
                raise ValueError("dimension mismatch between dictionary and space")
        else:
            if len(self.bases) != self.n_max + 1:
                raise ValueError(f"expected {self.n_max + 1} level bases, got {len(self.bases)}")
            bases = tuple(as_matrix(b, self.space.dim) for b in self.bases)
            object.__setattr__(self, "bases", bases)

    @property
    def is_linear(self) -> bool:
        return self.kind in LINEAR_KINDS

    def basis(self, n: int) -> np.ndarray:
        self._check_level(n)
        if not self.is_linear:
            raise TypeError("nterm-dictionary levels are unions of subspaces, not a single basis")
        return self.bases[n]

    def dims(self) -> list[int]:
        if not self.is_linear:
            return [min(n, self.dictionary.size) for n in range(self.n_max + 1)]
        return [rank(b) for b in self.bases]

    def _check_level(self, n: int):
        if not (0 <= n <= self.n_max):
            raise ValueError(f"level n={n} out of range 0..{self.n_max}")


# -- constructors -----------------------------------------------------------

def linear_chain(space: Space, bases: Sequence, *, k_map: str | Sequence[int] = "identity",
                 kind: str = "linear-chain", meta: dict | None = None) -> Scheme:
    k_kind, table = _k_spec(k_map)
    return Scheme(kind, space, len(bases) - 1, tuple(bases), None, k_kind, table, meta or {})


def nterm_scheme(space: Space, dictionary: Dictionary, n_max: int, *,
                 k_map: str | Sequence[int] = "double") -> Scheme:
    k_kind, table = _k_spec(k_map)
    return Scheme("nterm-dictionary", space, n_max, (), dictionary, k_kind, table)


def poly_grid_scheme(space: Space, n_max: int) -> Scheme:
    """Level ``n`` = algebraic polynomials of degree ``< n`` sampled on the space's grid."""
    if space.grid is None:
        raise ValueError("poly-grid scheme needs a sup-grid space")
    grid = np.asarray(space.grid)
    bases = tuple(chebyshev_vandermonde(grid, n) for n in range(n_max + 1))
    return Scheme("poly-grid", space, n_max, bases)


def _k_spec(k_map) -> tuple[str, tuple[int, ...] | None]:
    if isinstance(k_map, str):
        return k_map, None
    if isinstance(k_map, dict):
        items = sorted((int(k), int(v)) for k, v in k_map.items())
        return "custom", tuple(v for _, v in items)
    return "custom", tuple(int(v) for v in k_map)


# -- operations -------------------------------------------------------------

def k_map(s: Scheme, n: int) -> int:
    """The index map ``K`` with ``A_n + A_n c A_{K(n)}``."""
    s._check_level(n)
    if s.k_map_kind == "custom":
        return int(s.k_table[n])
    if s.k_map_kind == "double":
        return 2 * n
    return n


def k_power(s: Scheme, n: int, j: int) -> int:
    """``K`` composed ``j`` times, applied to ``n``; raises past the horizon."""
    for _ in range(j):
        n = k_map(s, n)
    return n


@dataclass
class AxiomViolation:
    axiom: str
    level: int
    detail: str = ""

    def __str__(self):
        return f"{self.axiom}(level={self.level}){': ' + self.detail if self.detail else ''}"


@dataclass
class ValidationReport:
    ok: bool
    violations: list[AxiomViolation]
    dims: list[int]
    top_rank: int
    ambient_dim: int
    dense: bool
    trivial_levels: list[int]
    unchecked: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [vars(v) for v in self.violations],
            "dims": self.dims,
            "top_rank": self.top_rank,
            "ambient_dim": self.ambient_dim,
            "dense": self.dense,
            "trivial_levels": self.trivial_levels,
            "unchecked": self.unchecked,
        }


def validate_scheme(s: Scheme, *, n_pairs: int = 16, seed: int = 0, tol: float = 1e-10) -> ValidationReport:
    """Check axioms (i)-(iii) at the finite horizon.

    Nesting is checked column by column, ``K(n) >= n`` by evaluation, and
    ``A_n + A_n c A_{K(n)}`` on ``n_pairs`` random pairs per level. Density is
    replaced by the rank of the top level against the ambient dimension.
    """
    rng = np.random.default_rng(seed)
    violations: list[AxiomViolation] = []
    unchecked: list[str] = []
    dim = s.space.dim

    for n in range(s.n_max + 1):
        kn = k_map(s, n)
        if kn < n:
            violations.append(AxiomViolation("KBelowN", n, f"K({n})={kn}"))

    if s.is_linear:
        for n in range(s.n_max):
            res = span_residual(s.bases[n], s.bases[n + 1]) if s.bases[n].shape[1] else np.zeros(0)
            if res.size and res.max() > tol:
                violations.append(AxiomViolation("NotNested", n, f"max residual {res.max():.3e}"))
        for n in range(s.n_max + 1):
            kn = k_map(s, n)
            b = s.bases[n]
            if b.shape[1] == 0:
                continue
            if kn > s.n_max:
                unchecked.append(f"sum-closure at level {n}: K(n)={kn} beyond horizon")
                continue
            x = b @ rng.standard_normal((b.shape[1], n_pairs))
            y = b @ rng.standard_normal((b.shape[1], n_pairs))
            res = span_residual(x + y, s.bases[kn])
            if res.max() > tol:
                violations.append(AxiomViolation("NotSumClosed", n, f"max residual {res.max():.3e}"))
        dims = [rank(b) for b in s.bases]
        top = dims[-1]
    else:
        atoms = s.dictionary.atoms
        m = atoms.shape[1]
        for n in range(1, s.n_max + 1):
            kn = k_map(s, n)
            for _ in range(n_pairs):
                sx = rng.choice(m, size=min(n, m), replace=False)
                sy = rng.choice(m, size=min(n, m), replace=False)
                z = atoms[:, sx] @ rng.standard_normal(sx.size) + atoms[:, sy] @ rng.standard_normal(sy.size)
                union = np.union1d(sx, sy)
                if union.size <= kn:
                    if span_residual(z, atoms[:, union])[0] > tol:
                        violations.append(AxiomViolation("NotSumClosed", n, "support union"))
                        break
                    continue
                if math.comb(m, kn) > 10**5:
                    unchecked.append(f"sum-closure at level {n}: exhaustive check over budget")
                    break
                best = min(span_residual(z, atoms[:, list(sub)])[0]
                           for sub in itertools.combinations(range(m), kn))
                if best > tol:
                    violations.append(AxiomViolation("NotSumClosed", n, f"residual {best:.3e}"))
                    break
        dims = s.dims()
        top = rank(atoms)

    trivial = [n for n, d in enumerate(dims) if d >= dim] if s.is_linear else []
    return ValidationReport(
        ok=not violations,
        violations=violations,
        dims=dims,
        top_rank=top,
        ambient_dim=dim,
        dense=top >= dim,
        trivial_levels=trivial,
        unchecked=unchecked,
    )


def project_scheme(s: Scheme, P) -> Scheme:
    """The projected scheme ``P(A_n)`` of a linear scheme (``P`` idempotent)."""
    if not s.is_linear:
        raise TypeError("project_scheme needs a linear scheme")
    P = np.asarray(P, dtype=float)
    dim = s.space.dim
    if P.shape != (dim, dim):
        raise ValueError(f"dimension mismatch: projection has shape {P.shape}, space has dim {dim}")
    if np.max(np.abs(P @ P - P)) > 1e-10:
        raise ValueError("P is not idempotent to 1e-10")
    bases = tuple(span_basis(P @ b) for b in s.bases)
    return Scheme("projected", s.space, s.n_max, bases, None, s.k_map_kind, s.k_table, dict(s.meta))


def sum_scheme(s: Scheme, F) -> Scheme:
    """The scheme ``A_n + F`` for a finite-dimensional ``F`` (keeps the base ``K`` map)."""
    if not s.is_linear:
        raise TypeError("sum_scheme needs a linear-chain or poly-grid scheme")
    F = as_matrix(F, s.space.dim)
    bases = tuple(span_basis(np.hstack([b, F])) for b in s.bases)
    return Scheme("sum-with-F", s.space, s.n_max, bases, None, s.k_map_kind, s.k_table, dict(s.meta))
