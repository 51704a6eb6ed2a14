"""Explicit schemes with closed-form errors, used as ground truth.

Every generator returns a :class:`Fixture` whose ``expected`` mapping can be
recomputed with :mod:`approxscheme.bestapprox`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .lethargy import EpsilonSequence
from .schemes import Scheme, linear_chain, poly_grid_scheme
from .spaces import Space


@dataclass
class Fixture:
    name: str
    space: Space
    scheme: Scheme
    Y_basis: np.ndarray
    expected: dict
    provenance: str
    far_witness: Callable[[int], np.ndarray] | None = None
    extras: dict = field(default_factory=dict)


def _coordinate_space(p: float, dim: int) -> Space:
    return Space.hilbert(dim) if p == 2 else Space.lp(p, dim)


def gen_slow_scheme(p: float, eps, J: int = 1) -> Fixture:
    """Coordinate scheme in ``l_p`` where every ``y`` in ``Y`` has ``E(y, A_k) = eps_k ||y||``.

    Coordinates are ``e_{ij}`` (row ``i = 1..N+1``, copy ``j = 1..J``) stored at
    index ``(i-1) J + (j-1)``. Row weights ``gamma_k = (eps_{k-1}^p - eps_k^p)^{1/p}``
    for ``k <= N`` and ``gamma_{N+1} = eps_N`` make the tail sums exact.
    ``A_k`` spans rows ``i <= k`` and ``Y`` spans ``f_j = sum_i gamma_i e_{ij}``.
    """
    if not (0 < p < math.inf):
        raise ValueError("p must lie in (0, inf)")
    if J < 1:
        raise ValueError("J must be at least 1")
    eps = eps if isinstance(eps, EpsilonSequence) else EpsilonSequence(eps)
    e = np.asarray(eps.values, dtype=float)
    if e[0] != 1.0:
        raise ValueError("eps must be normalised with eps_0 = 1")
    N = e.size - 1
    gamma = np.empty(N + 1)
    gamma[:N] = np.maximum(e[:-1] ** p - e[1:] ** p, 0.0) ** (1.0 / p)
    gamma[N] = e[N]
    dim = (N + 1) * J
    space = _coordinate_space(p, dim)
    eye = np.eye(dim)
    bases = [eye[:, : k * J] for k in range(N + 1)]
    scheme = linear_chain(space, bases, meta={"fixture": "slow-lp"})
    Y = np.zeros((dim, J))
    for j in range(J):
        Y[j::J, j] = gamma
    return Fixture(
        name="slow-lp",
        space=space,
        scheme=scheme,
        Y_basis=Y,
        expected={"profile": e.tolist(), "farness": e.tolist()},
        provenance="coordinate scheme with telescoping row weights; unit vectors of Y decay exactly like eps",
        extras={"gamma": gamma, "p": p, "J": J},
    )


def gen_cfar(c: float, n_max: int = 8, *, theta: float = 1.0 - 1e-3) -> Fixture:
    """Hilbert scheme from which ``Y = span[f_i]`` is exactly ``c``-far.

    With 1-based coordinates ``e_1..e_{2 n_max}``, ``f_i = sqrt(1-c^2) e_{2i} + c e_{2i-1}``
    and ``A_n`` spans every even coordinate plus ``e_j`` for ``j <= 2n-2``.
    The far-witness callback returns ``theta f_m`` with ``m = max(level, 1)``,
    which has norm ``theta < 1`` and error ``theta c`` at ``A_level``.
    """
    if not (0 < c < 1):
        raise ValueError("c must lie in (0, 1)")
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    dim = 2 * n_max
    space = Space.hilbert(dim)
    eye = np.eye(dim)
    evens = [2 * k - 1 for k in range(1, n_max + 1)]  # 0-based index of e_{2k}
    bases = []
    for n in range(n_max + 1):
        cols = sorted(set(evens) | set(range(max(2 * n - 2, 0))))
        bases.append(eye[:, cols])
    scheme = linear_chain(space, bases, meta={"fixture": "cfar", "c": c})
    s = math.sqrt(1.0 - c * c)
    Y = np.zeros((dim, n_max))
    for i in range(1, n_max + 1):
        Y[2 * i - 1, i - 1] = s
        Y[2 * i - 2, i - 1] = c
    def far_witness(level: int) -> np.ndarray:
        m = max(int(level), 1)
        if m > n_max:
            raise ValueError(f"no witness beyond level {n_max}")
        return theta * Y[:, m - 1]

    return Fixture(
        name="cfar",
        space=space,
        scheme=scheme,
        Y_basis=Y,
        expected={"diagonal_error": [c] * n_max, "farness": [c] * (n_max + 1)},
        provenance="even coordinates plus a growing initial block; f_n keeps weight c off A_n",
        far_witness=far_witness,
        extras={"c": c, "theta": theta},
    )


def gen_projected_counterexample(M: int = 10, variant: str = "normalized") -> Fixture:
    """Hilbert scheme whose projection onto ``Y = span[e_k]`` is full at every level.

    Coordinates are ``e_k`` at index ``2(k-1)`` and ``f_k`` at ``2k-1``.
    ``g_k = k^{-1} e_k + beta_k f_k`` with ``beta_k = sqrt(1 - k^{-2})``
    (``normalized``, unit vectors) or ``sqrt(1 + k^{-2})`` (``printed``).
    ``A_n = span[e_1, f_1, ..., e_n, f_n, g_{n+1}, ..., g_M]`` for ``n = 0..M``.
    """
    if M < 2:
        raise ValueError("M must be at least 2")
    if variant not in ("normalized", "printed"):
        raise ValueError(f"unknown variant {variant!r}")
    dim = 2 * M
    space = Space.hilbert(dim)
    eye = np.eye(dim)
    sign = -1.0 if variant == "normalized" else 1.0
    g = np.zeros((dim, M))
    for k in range(1, M + 1):
        g[2 * (k - 1), k - 1] = 1.0 / k
        g[2 * k - 1, k - 1] = math.sqrt(1.0 + sign / k**2)
    bases = [np.hstack([eye[:, : 2 * n], g[:, n:]]) for n in range(M + 1)]
    scheme = linear_chain(space, bases, meta={"fixture": "projected", "variant": variant})
    Y = eye[:, 0::2]
    P = np.diag([1.0 if i % 2 == 0 else 0.0 for i in range(dim)])
    if variant == "normalized":
        value = lambda m: math.sqrt(1.0 - m ** -2.0)
    else:
        value = lambda m: math.sqrt((m * m + 1.0) / (m * m + 2.0))
    rows = [{"n": n, "m": m, "error": value(m)} for n in range(M) for m in range(n + 1, M + 1)]
    return Fixture(
        name="projected",
        space=space,
        scheme=scheme,
        Y_basis=Y,
        expected={"unit_errors": rows, "projected_rank": M},
        provenance=f"tilted pairs e_k, f_k with {variant} tilt coefficient",
        extras={"P": P, "g": g, "M": M, "variant": variant},
    )


def gen_muntz_grid(n_terms: int = 4, a: float = 0.25, b: float = 1.0, grid_size: int = 1024,
                   n_max: int | None = None) -> Fixture:
    """Sampled Muntz section ``Y = span[t^{k^2} : k = 1..n_terms]`` against polynomials on ``[a, b]``."""
    if not (0 < a < b):
        raise ValueError("need 0 < a < b")
    if n_terms < 1:
        raise ValueError("n_terms must be at least 1")
    space = Space.chebyshev_grid(a, b, grid_size)
    t = np.asarray(space.grid)
    Y = np.column_stack([t ** (k * k) for k in range(1, n_terms + 1)])
    scheme = poly_grid_scheme(space, n_terms if n_max is None else n_max)
    return Fixture(
        name="muntz",
        space=space,
        scheme=scheme,
        Y_basis=Y,
        expected={"rank": n_terms},
        provenance="square-exponent monomials sampled on a Chebyshev grid",
        extras={"exponents": [k * k for k in range(1, n_terms + 1)]},
    )


def gen_chebyshev(n: int = 3, a: float = 0.0, b: float = 2.0 * math.pi, grid_size: int = 4096) -> Fixture:
    """``x = cos(n t)`` on a sup-norm grid against polynomials of degree ``< n``; the error is 1."""
    if n < 1:
        raise ValueError("n must be at least 1")
    space = Space.chebyshev_grid(a, b, grid_size)
    t = np.asarray(space.grid)
    x = np.cos(n * t)
    scheme = poly_grid_scheme(space, n)
    return Fixture(
        name="chebyshev",
        space=space,
        scheme=scheme,
        Y_basis=x[:, None],
        expected={"error_at_n": 1.0},
        provenance="equioscillating trigonometric sample against low-degree polynomials",
        extras={"x": x, "n": n},
    )


REGISTRY = {
    "slow-lp": gen_slow_scheme,
    "cfar": gen_cfar,
    "projected": gen_projected_counterexample,
    "muntz": gen_muntz_grid,
    "chebyshev": gen_chebyshev,
}
