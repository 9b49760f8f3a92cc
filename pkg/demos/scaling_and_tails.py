"""Self-similarity of the quantile field and the tail of its supremum.

First part: W_n(4 t0, a) and 4**H W_n(t0, a) should have the same law.
Second part: the exceedance curve P(sup_J |X| > u) on J = [1, 2] is
polynomial with slope -r for an r-stable input and bends down for a
Gaussian one.

    python demos/scaling_and_tails.py [--seed 7]
"""
import argparse

import numpy as np

from selfsim_quantile import ProcessSpec
from selfsim_quantile.harness import scalability_check, tail_exponent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--paths", type=int, default=5000)
    args = ap.parse_args()

    print("scaling W_n(4 t0, 1/2) vs 4**H W_n(t0, 1/2), n=200, 400 replications")
    for name, spec in (("BM", ProcessSpec.bm()), ("Cauchy", ProcessSpec.stable(1.0)), ("fBm r=1.4", ProcessSpec.fbm(1.4))):
        t = scalability_check(spec, 0.5, 0.5, [4.0], 200, 400, args.seed).tests[0]
        print(f"  {name:10s} H={spec.H:.2f}  KS D={t['statistic']:.3f}  p={t['p']:.3f}")

    print(f"\ntail of sup over [1, 2] from {args.paths} paths")
    for name, spec in (("Cauchy", ProcessSpec.stable(1.0)), ("stable r=1.5", ProcessSpec.stable(1.5)),
                       ("BM", ProcessSpec.bm())):
        est = tail_exponent(spec, n_paths=args.paths, seed=args.seed, n_boot=50)
        lo, hi = est.fit_range
        kind = "super-polynomial" if est.super_polynomial else "polynomial"
        print(f"  {name:13s} theta={est.theta:.3f} +- {est.se:.3f} on u in [{lo:.2f}, {hi:.2f}]  ({kind})")
        sel = np.searchsorted(est.u_grid, [1.0, 3.0, 10.0])
        print("      " + "  ".join(f"P(>{est.u_grid[i]:.1f})={est.exceedance[i]:.4f}" for i in sel))


if __name__ == "__main__":
    main()
