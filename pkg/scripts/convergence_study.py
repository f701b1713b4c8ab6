#!/usr/bin/env python3
"""Self-convergence orders and residual shrink factors over a resolution triple."""

import argparse

from dnullsim import experiments


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, default=40.0)
    ap.add_argument("--coupling", type=float, default=0.01)
    ap.add_argument("--resolutions", type=int, nargs=3,
                    default=list(experiments.CONVERGENCE_RESOLUTIONS))
    args = ap.parse_args()

    out = experiments.convergence_orders(args.a, args.coupling,
                                         resolutions=tuple(args.resolutions))
    print("self-convergence orders (target 2):")
    for name, order in out["orders"].items():
        print(f"  {name:<8} {order:.3f}")
    print("constraint residual shrink factors per refinement (target 4):")
    for name, factors in out["residual_factors"].items():
        print(f"  {name:<10} {factors[0]:.2f}, {factors[1]:.2f}")
    print("Richardson truncation estimates at the middle resolution:")
    for name, tau in out["truncation"].items():
        print(f"  {name:<8} {tau:.3e}")


if __name__ == "__main__":
    main()
