#!/usr/bin/env python3
"""Sweep the pulse size and report trapping, mass and charge of each run."""

import argparse

from dnullsim import diagnostics, experiments


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, nargs="+",
                    default=list(experiments.SWEEP_A_VALUES))
    ap.add_argument("--coupling", type=float, default=0.01)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--serial", action="store_true")
    args = ap.parse_args()

    rows = experiments.run_sweep(args.a, coupling=args.coupling, n=args.n,
                                 parallel=not args.serial)
    print(f"{'a':>7} {'trapped':>8} {'exp_out':>10} {'exp_in':>10} "
          f"{'Q(data cone)':>13} {'m(data cone)':>13}")
    for r in rows:
        print(f"{r['a']:7.1f} {str(r['trapped']):>8} {r['exp_out_final']:10.4f} "
              f"{r['exp_in_final']:10.4f} {r['Q_initial_cone']:13.5f} "
              f"{r['m_initial_cone']:13.3f}")
    masses = {r["a"]: r["m_initial_cone"] for r in rows}
    charges = {r["a"]: r["Q_initial_cone"] for r in rows}
    print(f"mass exponent vs a:   {diagnostics.fit_a_scaling(masses):.3f}")
    print(f"charge exponent vs a: {diagnostics.fit_a_scaling(charges):.3f}")


if __name__ == "__main__":
    main()
