"""How the quantile field behaves as t approaches 0.

W_n(0, .) is identically 0, and the expected supremum over (0, delta] x A
shrinks like delta**H. We estimate it for decreasing delta and compare with
the dyadic bound that ties it to the supremum over [1, 2].

    python demos/behaviour_near_zero.py [--seed 7]
"""
import argparse

from selfsim_quantile import ProcessSpec
from selfsim_quantile.harness import lemma1_bound_check, near_zero_check


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--reps", type=int, default=300)
    args = ap.parse_args()
    alphas = [0.25, 0.375, 0.5, 0.625, 0.75]

    for name, spec in (("BM", ProcessSpec.bm()), ("Cauchy", ProcessSpec.stable(1.0))):
        r = near_zero_check(spec, [0.5, 0.1, 0.02], [0.5, 1.0, 2.0], args.n, args.reps, args.seed, alphas=alphas)
        print(f"\n{name} (H={spec.H:g}): P(sup_(0,delta] |W_n| > eps)")
        for e in r.estimates:
            d, eps = e["coords"]
            print(f"  delta={d:<5g} eps={eps:<4g} {e['value']:.3f}")

    rep = lemma1_bound_check(ProcessSpec.bm(), 0.25, 1.0, args.n, args.reps, args.seed, alphas=alphas)
    lhs, rhs = rep.estimate("lhs"), rep.estimate("rhs")
    print(f"\nBM, delta=1/4: E sup near zero {lhs['value']:.3f} +- {lhs['se']:.3f} "
          f"<= {rep.estimate('constant')['value']:.5f} x E sup on [1, 2] = {rhs['value']:.3f}")


if __name__ == "__main__":
    main()
