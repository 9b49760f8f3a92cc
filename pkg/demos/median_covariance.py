"""Monte Carlo covariance of the median fluctuation field against its Gaussian limit.

For Brownian motion and the Cauchy process we replicate W_n(t, 1/2) at t = 1, 2
and compare the sample covariance matrix with the closed-form limit.

    python demos/median_covariance.py [--n 400] [--reps 400] [--seed 7]
"""
import argparse

import numpy as np

from selfsim_quantile import LimitCovariance, ProcessSpec
from selfsim_quantile.empirical import finite_n_centering
from selfsim_quantile.harness import covariance_with_se, replicate_fields
from selfsim_quantile.simulate import GridSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--reps", type=int, default=400)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    points = [(1.0, 0.5), (2.0, 0.5)]
    grid = GridSpec.from_points([1.0, 2.0], [0.5])
    for name, spec in (("Brownian motion", ProcessSpec.bm()), ("Cauchy process", ProcessSpec.stable(1.0))):
        theory = LimitCovariance.on_points(spec, points).matrix(points)
        fields = replicate_fields(spec, grid, args.n, args.reps, args.seed)
        w = fields[:, 1:, 0]
        print(f"\n{name}: n={args.n}, {args.reps} replications")
        print(f"{'pair':>12} {'MC':>9} {'se':>7} {'limit':>9} {'z':>6}")
        for i in range(2):
            for j in range(i, 2):
                cov, se = covariance_with_se(w[:, i], w[:, j])
                lim = theory[i, j]
                print(f"  t={points[i][0]:g},{points[j][0]:g} {cov:9.4f} {se:7.4f} {lim:9.4f} {(cov - lim) / se:6.2f}")
        exact = finite_n_centering(grid, spec, args.n)[1:, 0]
        se = w.std(axis=0, ddof=1) / np.sqrt(args.reps)
        print(f"  mean of W_n {np.round(w.mean(axis=0), 3)} +- {np.round(se, 3)}; "
              f"exact finite-n mean {np.round(exact, 3)} (tends to 0 like n**-0.5)")


if __name__ == "__main__":
    main()
