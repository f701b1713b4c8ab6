#!/usr/bin/env python3
"""Evolve one calibrated run and print the charging and trapping diagnostics."""

import argparse
import math

import numpy as np

from dnullsim import diagnostics, evolve, experiments


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, default=40.0)
    ap.add_argument("--coupling", type=float, default=0.01)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--u-inf-factor", type=float, default=4.0)
    ap.add_argument("--checkpoint", help="write the solution here (npz)")
    args = ap.parse_args()

    params = experiments.calibrated_params(args.a, coupling=args.coupling,
                                           n=args.n,
                                           u_inf_factor=args.u_inf_factor)
    print(f"calibrated pulse: amp={params.pulse.amp:.5f} "
          f"phase_rate={params.pulse.phase_rate:.5f}")
    sol = evolve.run(params)
    print(f"evolved {len(sol.cones)} cones in {sol.meta['wall_clock_s']:.2f}s; "
          f"bounds: {sol.meta['bounds']}")

    cone0, final = sol.cones[0], sol.cones[-1]
    q_end = cone0.r[-1] ** 2 * cone0.rhoF[-1]
    print(f"Q at end of data cone: {q_end:.5f} "
          f"(geometric lower bound {params.coupling * params.a / (2 * math.pi):.5f})")
    d = diagnostics.sphere_diag(final.point(final.n_v))
    print(f"final sphere (u={final.u:g}, v=1): exp_out={d.exp_out:.4f} "
          f"exp_in={d.exp_in:.4f} trapped={d.trapped} m={d.m:.3f} Q={d.Q:.5f}")
    print(f"worst residuals: "
          f"{ {k: f'{v:.2e}' for k, v in sol.residual_history[-1].as_dict().items()} }")
    first_trapped = next((u for u, x in zip(sol.u_levels,
                                            sol.diagnostics["min_exp_out"])
                          if x < 0), None)
    print(f"first cone carrying a trapped sphere: u = {first_trapped}")

    if args.checkpoint:
        evolve.checkpoint(sol, args.checkpoint)
        print(f"checkpoint written to {args.checkpoint}")


if __name__ == "__main__":
    main()
