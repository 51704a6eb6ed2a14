"""Print closed-form fixture values next to recomputed best-approximation errors."""

from __future__ import annotations

import argparse
import math

import numpy as np

from approxscheme.analysis import farness, int0_witness
from approxscheme.bestapprox import dist_subspace, level_error
from approxscheme.fixtures import gen_cfar, gen_chebyshev, gen_projected_counterexample, gen_slow_scheme
from approxscheme.spaces import INF, lp_norm


def slow_table(p, eps, J, seed):
    f = gen_slow_scheme(p, eps, J=J)
    rng = np.random.default_rng(seed)
    y = f.Y_basis @ rng.standard_normal(J)
    y /= lp_norm(y, p)
    print(f"\nslow scheme, p={p:g}, J={J}: random unit y in Y")
    print(f"{'k':>3} {'eps_k':>12} {'E(y,A_k)':>12} {'status':>10}")
    for k, e in enumerate(eps):
        err, status = level_error(f.space, y, f.scheme, k)
        print(f"{k:>3} {e:>12.6g} {err:>12.6g} {status:>10}")


def cfar_table(c, n_max):
    f = gen_cfar(c, n_max)
    print(f"\nc-far fixture, c={c:g}")
    print(f"{'n':>3} {'E(f_n,A_n)':>12} {'farness':>12}")
    for n in range(1, n_max + 1):
        err = dist_subspace(f.space, f.Y_basis[:, n - 1], f.scheme.basis(n)).error
        fv = farness(f.space, f.Y_basis, f.scheme.basis(n)).value
        print(f"{n:>3} {err:>12.9f} {fv:>12.9f}")


def projected_table(M):
    print(f"\nprojected fixture, M={M}: E(e_m, A_0) against the two closed forms")
    print(f"{'m':>3} {'normalized':>12} {'sqrt(1-m^-2)':>13} {'printed':>12} {'(m2+1)/(m2+2)':>14}")
    fn = gen_projected_counterexample(M, "normalized")
    fp = gen_projected_counterexample(M, "printed")
    for m in range(1, M + 1):
        a = dist_subspace(fn.space, fn.Y_basis[:, m - 1], fn.scheme.basis(0)).error
        b = dist_subspace(fp.space, fp.Y_basis[:, m - 1], fp.scheme.basis(0)).error
        print(f"{m:>3} {a:>12.9f} {math.sqrt(1 - m**-2.0):>13.9f} {b:>12.9f} "
              f"{math.sqrt((m * m + 1) / (m * m + 2)):>14.9f}")


def chebyshev_table(grid_size):
    print(f"\nsup-norm grid of {grid_size} points on [0, 2 pi]: E(cos nt, degree < n)")
    for n in (1, 2, 3, 4, 5):
        f = gen_chebyshev(n, grid_size=grid_size)
        print(f"  n={n}: {dist_subspace(f.space, f.extras['x'], f.scheme.basis(n)).error:.7f}")


def int0_table():
    print("\ntwo-point witnesses that 0 is interior (constraint and minimal norm)")
    print(f"{'p':>5} {'alpha':>6} {'a':>10} {'b':>10} {'c':>10} {'min norm':>10}")
    for p in (1.0, 1.5, 4.0, INF):
        for alpha in (0.1, 0.25, 0.3):
            w = int0_witness(p, alpha)
            print(f"{p:>5g} {alpha:>6g} {w.a:>10.6f} {w.b:>10.6f} {w.c:>10.6f} {w.min_norm:>10.6f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--grid", type=int, default=4096)
    args = ap.parse_args()
    eps = [1, 1 / 2, 1 / 4, 1 / 8, 1 / 16]
    slow_table(2.0, eps, 4, args.seed)
    slow_table(1.5, eps, 4, args.seed)
    cfar_table(0.6, 8)
    projected_table(10)
    chebyshev_table(args.grid)
    int0_table()


if __name__ == "__main__":
    main()
