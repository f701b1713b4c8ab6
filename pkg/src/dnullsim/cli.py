"""Command-line entry point.

Subcommands: run, sweep, convergence, rescale-check, siglint, plot.  Flags
mirror the config-file keys exactly; a config file supplies defaults and
flags override.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import experiments, siglint

__all__ = ["main", "build_parser"]


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--a", type=float)
    p.add_argument("--coupling", type=float)
    p.add_argument("--u-inf-factor", dest="u_inf_factor", type=float)
    p.add_argument("--n-u", dest="n_u", type=int)
    p.add_argument("--n-v", dest="n_v", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--pulse-amp", dest="pulse_amp", type=float)
    p.add_argument("--pulse-phase-rate", dest="pulse_phase_rate", type=float)
    p.add_argument("--pulse-v0", dest="pulse_v0", type=float)
    p.add_argument("--pulse-v1", dest="pulse_v1", type=float)
    p.add_argument("--pulse-profile", dest="pulse_profile",
                   choices=("sine_squared", "smooth_bump"))
    p.add_argument("--out-dir", dest="out_dir",
                   default=os.environ.get("DNULLSIM_OUT_DIR"))
    p.add_argument("--plot", action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dnullsim",
        description="double-null evolution of charged scalar collapse, "
                    "plus the signature linter for the null-frame equations")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment preset")
    run_p.add_argument("kind", choices=experiments.EXPERIMENT_KINDS)
    _add_param_flags(run_p)

    sweep_p = sub.add_parser("sweep", help="pulse-size sweep (mass/charge scaling)")
    _add_param_flags(sweep_p)

    conv_p = sub.add_parser("convergence", help="three-resolution convergence study")
    _add_param_flags(conv_p)

    resc_p = sub.add_parser("rescale-check", help="scaling covariance comparison")
    _add_param_flags(resc_p)

    lint_p = sub.add_parser("siglint", help="signature-homogeneity linter")
    lint_p.add_argument("fixtures", nargs="?", help="equation fixture file "
                        "(packaged corpus by default)")
    lint_p.add_argument("--json", action="store_true", help="emit JSON")
    lint_p.add_argument("--no-mutations", action="store_true",
                        help="skip the mutation rigidity sweep")

    plot_p = sub.add_parser("plot", help="re-plot a stored checkpoint")
    plot_p.add_argument("checkpoint")
    plot_p.add_argument("--out-dir", dest="out_dir", default=".")
    return parser


def _mapping_from_args(args: argparse.Namespace, kind: str) -> dict:
    mapping = {}
    if getattr(args, "config", None):
        mapping.update(experiments.load_config_file(args.config))
    for key in ("a", "coupling", "u_inf_factor", "n_u", "n_v", "delta",
                "pulse_amp", "pulse_phase_rate", "pulse_v0", "pulse_v1",
                "pulse_profile", "out_dir", "plot"):
        val = getattr(args, key, None)
        if val is not None:
            mapping[key] = val
    mapping["kind"] = kind
    return mapping


def _siglint_command(args: argparse.Namespace) -> int:
    report = siglint.lint_report(corpus_path=args.fixtures,
                                 with_mutations=not args.no_mutations)
    ok = report["all_pass"] and report.get("mutations", {}).get("all_detected", True)
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
        return 0 if ok else 1
    width = max(len(r["label"]) for r in report["equations"])
    for r in report["equations"]:
        status = "pass" if r["pass"] else "FAIL"
        print(f"{r['label']:<{width}}  s2={r['s2']:>4}  {status}")
        for m in r["mismatches"]:
            got = "inconsistent pair" if m["got"] is None else m["got"]
            print(f"  {m['side']}: {m['term']}  expected {m['expected']}, got {got}")
    for pid, p in report["pairs"].items():
        status = "pass" if p["pass"] else "FAIL"
        print(f"pair {pid:<24} s2 {p['s2_psi1']} -> {p['s2_psi2']}  "
              f"coeff {p['coeff']}  {status}")
    if "mutations" in report:
        det = "all detected" if report["mutations"]["all_detected"] \
            else "SOME UNDETECTED"
        print(f"mutation sweep over {len(report['mutations']['entries'])} "
              f"table entries: {det}")
    for note in report["notes"]:
        print(f"note: {note}")
    print(f"{report['n_equations'] - report['n_failed']}/{report['n_equations']} "
          f"equations homogeneous")
    return 0 if ok else 1


def _plot_command(args: argparse.Namespace) -> int:
    from . import evolve, plots
    sol = evolve.restore(args.checkpoint)
    written = plots.emit_plots(sol, out_dir=args.out_dir)
    for path in written:
        print(path)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "siglint":
        return _siglint_command(args)
    if args.command == "plot":
        return _plot_command(args)
    kind = {"run": getattr(args, "kind", None), "sweep": "sweep",
            "convergence": "convergence", "rescale-check": "scaling"}[args.command]
    mapping = _mapping_from_args(args, kind)
    if mapping.get("out_dir") is None:
        mapping["out_dir"] = "out"
    cfg = experiments.config_from_mapping(mapping)
    return experiments.run_experiment(cfg)


if __name__ == "__main__":
    sys.exit(main())
