#!/usr/bin/env python3
"""Covariance of the evolution under the scaling map, per field."""

import argparse
import json

from dnullsim import experiments, rescale


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, default=40.0)
    ap.add_argument("--coupling", type=float, default=0.01)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--delta", type=float, default=0.5)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    params = experiments.calibrated_params(args.a, coupling=args.coupling,
                                           n=args.n)
    report = rescale.covariance_report(params, args.delta)
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
        return
    print(f"delta = {args.delta}, rescaled coupling = {report['coupling_prime']}")
    print(f"{'field':<10} {'max discrepancy':>16} {'3x truncation(B)':>18}")
    for name, entry in report["fields"].items():
        print(f"{name:<10} {entry['max']:16.3e} "
              f"{3 * report['truncation_b'][name]:18.3e}")


if __name__ == "__main__":
    main()
