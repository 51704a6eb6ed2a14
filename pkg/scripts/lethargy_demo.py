"""Construct slowly approximable elements and show their error profiles against the target sequence."""

from __future__ import annotations

import argparse

import numpy as np

from approxscheme.bestapprox import dist_subspace
from approxscheme.fixtures import gen_cfar
from approxscheme.lethargy import bernstein_construct, series_construct
from approxscheme.schemes import linear_chain
from approxscheme.spaces import Space


def bernstein_demo(seed):
    dim = 32
    sp = Space.hilbert(dim)
    e = np.eye(dim)
    scheme = linear_chain(sp, [e[:, :n] for n in range(9)])
    eps = [1, 0.7, 0.5, 0.3, 0.2, 0.1, 0.05, 0.02, 0.01]
    res = bernstein_construct(sp, scheme, e[:, 16:], eps, 8, seed=seed)
    print(f"Bernstein-type construction in l_2^{dim}, Y = last 16 coordinates, seed {seed}")
    lambdas = {k: round(float(v), 6) for k, v in sorted(res.construction_log["lambdas"].items())}
    print(f"  ||y|| = {np.linalg.norm(res.y):.12f}, lambdas = {lambdas}")
    print(f"{'n':>3} {'eps_n':>8} {'E(y,A_n)':>12} {'margin':>10}")
    for n, target in enumerate(eps):
        err = dist_subspace(sp, res.y, scheme.basis(n)).error
        print(f"{n:>3} {target:>8g} {err:>12.8f} {err - target:>10.2e}")


def series_demo(c, J):
    f = gen_cfar(c, 16)
    eps = [2.0**-n for n in range(17)]
    res = series_construct(f.space, f.scheme, f.far_witness, 0.59, eps, J)
    log = res.construction_log
    print(f"\nseries construction on the c-far fixture (c={c:g}, eps_n = 2^-n, J={J})")
    print(f"  indices {log['indices']}, alphas {np.round(log['alphas'], 6).tolist()}")
    print(f"{'j':>3} {'n':>4} {'E(y,A_n)':>12} {'2^(j-1) eps_n':>14}")
    for j in range(1, J + 1):
        n = log["indices"][j - 1]
        err = dist_subspace(f.space, res.y, f.scheme.basis(n)).error
        print(f"{j:>3} {n:>4} {err:>12.8f} {2 ** (j - 1) * eps[n]:>14.8f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--c", type=float, default=0.6)
    ap.add_argument("--J", type=int, default=3)
    args = ap.parse_args()
    bernstein_demo(args.seed)
    series_demo(args.c, args.J)


if __name__ == "__main__":
    main()
