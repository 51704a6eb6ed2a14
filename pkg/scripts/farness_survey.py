"""Farness of subspaces from approximation schemes across norms, plus Jackson-type decay."""

from __future__ import annotations

import argparse

import numpy as np

from approxscheme.analysis import default_method, farness, jackson_sequence, shapiro_check
from approxscheme.fixtures import gen_muntz_grid, gen_slow_scheme
from approxscheme.schemes import linear_chain
from approxscheme.spaces import Space


def slow_farness(seed):
    eps = [1, 0.5, 0.25, 0.125]
    print("farness of Y from the slow coordinate scheme (expected eps_n)")
    for p in (1.0, 1.5, 2.0, 3.0):
        f = gen_slow_scheme(p, eps, J=2)
        vals = [farness(f.space, f.Y_basis, f.scheme.basis(n), default_method(f.space), seed=seed)
                for n in range(len(eps))]
        print(f"  p={p:<4g} " + "  ".join(f"{v.value:.6f}({v.status})" for v in vals))


def muntz_farness(seed):
    f = gen_muntz_grid(4, 0.25, 1.0, 512, n_max=6)
    print("\nsquare-exponent monomials against polynomials of degree < n on [0.25, 1] (sup-grid lower bounds)")
    for n in range(f.scheme.n_max + 1):
        v = farness(f.space, f.Y_basis, f.scheme.basis(n), "sphere-search", restarts=8, seed=seed)
        print(f"  n={n}: {v.value:.6f} ({v.status})")


def jackson_demo():
    sp = Space.hilbert(64)
    e = np.eye(64)
    s = linear_chain(sp, [e[:, :n] for n in range(11)])
    js = jackson_sequence(sp, s, Y_weights=np.arange(1, 65, dtype=float))
    print("\nJackson constants for the weighted norm (sum k^2 x_k^2)^(1/2); expected 1/(n+1)")
    print("  " + "  ".join(f"{v:.6f}" for v in js.values))


def shapiro_demo(seed):
    sp = Space.hilbert(24)
    e = np.eye(24)
    s = linear_chain(sp, [e[:, :n] for n in range(9)])
    diag = shapiro_check(sp, s, seed=seed)
    print("\nShapiro-type diagnostics for the coordinate chain in l_2^24")
    for k, v in diag.to_dict().items():
        if k != "notes":
            print(f"  {k}: {v}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    slow_farness(args.seed)
    muntz_farness(args.seed)
    jackson_demo()
    shapiro_demo(args.seed)


if __name__ == "__main__":
    main()
