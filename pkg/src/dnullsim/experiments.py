"""Experiment presets, persistent outputs (CSV/JSON) and the sweep driver.

Each preset evolves what it needs, writes `solution.csv` and `summary.json`
into the output directory, and returns the summary dict; run_experiment exits
nonzero when a preset assertion fails.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import chardata, diagnostics, evolve, rescale, siglint
from .core import PulseShape, RunParams

__all__ = [
    "ExperimentConfig",
    "run_experiment",
    "write_solution_csv",
    "write_summary",
    "load_config_file",
    "config_from_mapping",
    "SWEEP_A_VALUES",
    "CONVERGENCE_RESOLUTIONS",
    "FROZEN_CHARGE_UPPER_C",
    "FROZEN_MASS_IDENT_C",
]

EXPERIMENT_KINDS = ("minkowski", "trapped", "charging", "scaling",
                    "convergence", "decay", "siglint", "sweep")

SWEEP_A_VALUES = (40.0, 80.0, 160.0)
CONVERGENCE_RESOLUTIONS = (100, 200, 400)

# Frozen regression constants, measured once on the reference configuration
# (a = 40, coupling = 0.01, u_inf_factor = 4, calibrated sine-squared pulse):
# upper constant C in Q(end of initial cone) <= C * coupling * a (measured
# 0.176, frozen with 2x headroom), and the remainder bound for the mass-growth
# identity on the initial cone (measured 0.0044, frozen with ~10x headroom).
FROZEN_CHARGE_UPPER_C = 0.35
FROZEN_MASS_IDENT_C = 0.05

CSV_COLUMNS = [
    "u", "v", "r", "lnOmega", "trchi", "trchib", "omega", "omegab", "rhoF",
    "Ub", "psi_re", "psi_im", "Psi4_re", "Psi4_im", "Psi3_re", "Psi3_im",
    "rho", "Q", "m", "res_ray4", "res_cross4", "res_maxwell4",
]


@dataclass
class ExperimentConfig:
    kind: str = "minkowski"
    params: RunParams = field(default_factory=RunParams)
    out_dir: str = "out"
    plot: bool = False

    def validate(self) -> None:
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; "
                             f"expected one of {EXPERIMENT_KINDS}")
        self.params.validate()
        if self.kind == "scaling" and not self.params.delta_scale > 0:
            raise ValueError("scaling experiment requires delta_scale > 0")


# ---------------------------------------------------------------------------
# configuration files: flat key=value with CLI-flag parity
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {
    "kind": str, "a": float, "coupling": float, "u_inf_factor": float,
    "n_u": int, "n_v": int, "delta": float, "pulse_amp": float,
    "pulse_phase_rate": float, "pulse_v0": float, "pulse_v1": float,
    "pulse_profile": str, "out_dir": str, "plot": lambda s: s in ("1", "true", "yes"),
}


def load_config_file(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = _CONFIG_KEYS[key](value)
    return out


def config_from_mapping(mapping: dict) -> ExperimentConfig:
    """Build an ExperimentConfig from flat key=value pairs (file or flags)."""
    base = RunParams()
    pulse = PulseShape(
        amp=mapping.get("pulse_amp", base.pulse.amp),
        phase_rate=mapping.get("pulse_phase_rate", base.pulse.phase_rate),
        support=(mapping.get("pulse_v0", base.pulse.support[0]),
                 mapping.get("pulse_v1", base.pulse.support[1])),
        profile=mapping.get("pulse_profile", base.pulse.profile))
    params = RunParams(
        a=mapping.get("a", base.a),
        coupling=mapping.get("coupling", base.coupling),
        u_inf_factor=mapping.get("u_inf_factor", base.u_inf_factor),
        n_u=mapping.get("n_u", base.n_u),
        n_v=mapping.get("n_v", base.n_v),
        pulse=pulse,
        delta_scale=mapping.get("delta", base.delta_scale))
    cfg = ExperimentConfig(kind=mapping.get("kind", "minkowski"), params=params,
                           out_dir=mapping.get("out_dir", "out"),
                           plot=mapping.get("plot", False))
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# persistent outputs
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def write_solution_csv(sol: evolve.Solution, path: str) -> None:
    """Flat per-point table, u-major; residual columns hold the defect of the
    v interval starting at the point (last point repeats the previous one)."""
    from . import fieldeqs

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for cone in sol.cones:
            m = fieldeqs.matter_components(cone, sol.params.coupling)
            rho = fieldeqs.gauss_rho(cone, m)
            res = fieldeqs.cone_residuals(cone, sol.params.coupling)

            def pad(arr):
                return np.append(arr, arr[-1])

            ray4, cross4, maxw4 = pad(res.ray4), pad(res.cross4), pad(res.maxwell4)
            q = cone.r ** 2 * cone.rhoF
            mass = 0.5 * cone.r * (1.0 + 0.25 * cone.r ** 2
                                   * cone.trchi * cone.trchib)
            for i in range(len(cone.v)):
                writer.writerow([
                    _fmt(cone.u), _fmt(cone.v[i]), _fmt(cone.r[i]),
                    _fmt(cone.lnOmega[i]), _fmt(cone.trchi[i]),
                    _fmt(cone.trchib[i]), _fmt(cone.omega[i]),
                    _fmt(cone.omegab[i]), _fmt(cone.rhoF[i]), _fmt(cone.Ub[i]),
                    _fmt(cone.psi[i].real), _fmt(cone.psi[i].imag),
                    _fmt(cone.Psi4[i].real), _fmt(cone.Psi4[i].imag),
                    _fmt(cone.Psi3[i].real), _fmt(cone.Psi3[i].imag),
                    _fmt(rho[i]), _fmt(q[i]), _fmt(mass[i]),
                    _fmt(ray4[i]), _fmt(cross4[i]), _fmt(maxw4[i]),
                ])


def write_summary(summary: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")


# ---------------------------------------------------------------------------
# measurement helpers shared by presets and the acceptance suite
# ---------------------------------------------------------------------------


def minkowski_errors(sol: evolve.Solution) -> dict:
    """Max deviation from the exact flat-space solution over the rectangle."""
    errs = {"trchi": 0.0, "trchib": 0.0, "m": 0.0, "Q": 0.0, "psi": 0.0}
    for cone in sol.cones:
        r = cone.v - cone.u
        errs["trchi"] = max(errs["trchi"], float(np.max(np.abs(cone.trchi - 2.0 / r))))
        errs["trchib"] = max(errs["trchib"], float(np.max(np.abs(cone.trchib + 2.0 / r))))
        mass = 0.5 * cone.r * (1.0 + 0.25 * cone.r ** 2 * cone.trchi * cone.trchib)
        errs["m"] = max(errs["m"], float(np.max(np.abs(mass))))
        errs["Q"] = max(errs["Q"], float(np.max(np.abs(cone.r ** 2 * cone.rhoF))))
        errs["psi"] = max(errs["psi"], float(np.max(np.abs(cone.psi))))
    return errs


def calibrated_params(a: float, *, coupling: float = 0.01, n: int = 200,
                      u_inf_factor: float = 4.0) -> RunParams:
    params = RunParams(a=a, coupling=coupling, u_inf_factor=u_inf_factor,
                       n_u=n, n_v=n)
    return params.with_pulse(chardata.calibrate_pulse(params.pulse, params))


def _restrict(arr: np.ndarray, step: int) -> np.ndarray:
    return arr[::step, ::step]


def convergence_orders(a: float = 40.0, coupling: float = 0.01,
                       resolutions=CONVERGENCE_RESOLUTIONS) -> dict:
    """Self-convergence orders and residual shrink factors across a triple."""
    n0, n1, n2 = resolutions
    sols = [evolve.run(calibrated_params(a, coupling=coupling, n=n))
            for n in resolutions]
    fields = ("r", "trchi", "trchib", "psi", "rhoF")
    orders = {}
    for name in fields:
        f0 = sols[0].field_array(name)
        f1 = sols[1].field_array(name)
        f2 = sols[2].field_array(name)
        e01 = float(np.max(np.abs(f0 - _restrict(f1, n1 // n0))))
        e12 = float(np.max(np.abs(_restrict(f1, n1 // n0)
                                  - _restrict(f2, n2 // n0))))
        orders[name] = math.log2(e01 / e12)
    factors = {}
    for key in ("ray4", "cross4", "maxwell4"):
        maxima = [max(getattr(r, key) for r in sol.residual_history)
                  for sol in sols]
        factors[key] = [maxima[0] / maxima[1], maxima[1] / maxima[2]]
    truncation = {name: float(np.max(np.abs(
        _restrict(sols[1].field_array(name), n1 // n0)
        - _restrict(sols[2].field_array(name), n2 // n0)))) / 3.0
        for name in fields}
    return {"orders": orders, "residual_factors": factors,
            "truncation": truncation, "resolutions": list(resolutions)}


def charging_identity_defect(sol: evolve.Solution) -> float:
    """Worst per-cone defect of Q(u,1) - Q(u,0) = integral of the charge flux."""
    worst = 0.0
    coupling = sol.params.coupling
    for cone in sol.cones:
        q = cone.r ** 2 * cone.rhoF
        flux = 2.0 * coupling * cone.r ** 2 * cone.Omega \
            * (cone.psi * np.conj(cone.Psi4)).imag
        integral = float(np.trapezoid(flux, cone.v))
        worst = max(worst, abs(float(q[-1] - q[0]) - integral))
    return worst


def mass_identity_defect(cone) -> float:
    """|m at the cone end - integral of (r^2/4) Omega S44 dv| on one cone."""
    from . import fieldeqs
    m_end = 0.5 * cone.r[-1] * (1.0 + 0.25 * cone.r[-1] ** 2
                                * cone.trchi[-1] * cone.trchib[-1])
    s44 = fieldeqs.matter_components(cone, 0.0).S44
    integral = float(np.trapezoid(0.25 * cone.r ** 2 * cone.Omega * s44, cone.v))
    return abs(float(m_end) - integral)


def _sweep_one(args) -> dict:
    a, coupling, n = args
    params = calibrated_params(a, coupling=coupling, n=n)
    sol = evolve.run(params)
    final = sol.cones[-1]
    initial = sol.cones[0]
    om_f = math.exp(final.lnOmega[-1])
    exp_out = final.trchi[-1] / om_f
    exp_in = final.trchib[-1] * om_f
    return {
        "a": a,
        "trapped": bool(exp_out < 0 and exp_in < 0),
        "exp_out_final": float(exp_out),
        "exp_in_final": float(exp_in),
        "Q_initial_cone": float(initial.r[-1] ** 2 * initial.rhoF[-1]),
        "m_initial_cone": float(0.5 * initial.r[-1]
                                * (1.0 + 0.25 * initial.r[-1] ** 2
                                   * initial.trchi[-1] * initial.trchib[-1])),
        "min_exp_out_initial": float(np.min(initial.trchi / initial.Omega)),
        "bounds": sol.meta["bounds"],
    }


def run_sweep(a_values=SWEEP_A_VALUES, coupling: float = 0.01, n: int = 200,
              parallel: bool = True) -> list[dict]:
    """Calibrated runs over a list of a values; parallel across processes."""
    jobs = [(a, coupling, n) for a in a_values]
    if parallel and len(jobs) > 1 and (os.cpu_count() or 1) > 1:
        try:
            with ProcessPoolExecutor(max_workers=min(len(jobs), os.cpu_count())) as ex:
                return list(ex.map(_sweep_one, jobs))
        except (OSError, RuntimeError):
            pass
    return [_sweep_one(j) for j in jobs]


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------


def _preset_minkowski(cfg: ExperimentConfig) -> tuple[dict, evolve.Solution]:
    params = replace(cfg.params, pulse=replace(cfg.params.pulse, amp=0.0))
    sol = evolve.run(params)
    errs = minkowski_errors(sol)
    ok = all(v <= 1.0e-6 for v in errs.values())
    return {"kind": "minkowski", "max_errors": errs, "threshold": 1.0e-6,
            "pass": ok}, sol


def _preset_trapped(cfg: ExperimentConfig) -> tuple[dict, evolve.Solution]:
    rows = run_sweep(coupling=cfg.params.coupling, n=cfg.params.n_u)
    threshold = next((row["a"] for row in rows if row["trapped"]), None)
    ok = threshold is not None
    details = []
    for row in rows:
        if row["trapped"]:
            bound = -4.0 / row["a"] * 0.5
            details.append({**row, "bound": bound,
                            "bound_met": row["exp_out_final"] <= bound})
        else:
            details.append(dict(row))
    ok = ok and any(d.get("bound_met") for d in details)
    params = calibrated_params(threshold if threshold else SWEEP_A_VALUES[0],
                               coupling=cfg.params.coupling, n=cfg.params.n_u)
    sol = evolve.run(params)
    return {"kind": "trapped", "sweep": details, "threshold_a": threshold,
            "pass": ok}, sol


def _preset_charging(cfg: ExperimentConfig) -> tuple[dict, evolve.Solution]:
    params = calibrated_params(cfg.params.a, coupling=cfg.params.coupling,
                               n=cfg.params.n_u)
    sol = evolve.run(params)
    coarse = evolve.run(calibrated_params(cfg.params.a,
                                          coupling=cfg.params.coupling,
                                          n=cfg.params.n_u // 2))
    q_end = float(sol.cones[0].r[-1] ** 2 * sol.cones[0].rhoF[-1])
    lower = params.coupling * params.a / (2.0 * math.pi)
    upper = FROZEN_CHARGE_UPPER_C * params.coupling * params.a
    defect = charging_identity_defect(sol)
    # Richardson estimate of the solution's own truncation error on Q
    truncation = float(np.max(np.abs(sol.diagnostics["Q_end"][::2]
                                     - coarse.diagnostics["Q_end"]))) / 3.0
    ok = (q_end >= lower) and (q_end <= upper) and (defect <= 10.0 * truncation)
    return {"kind": "charging", "Q_end_initial_cone": q_end,
            "lower_bound": lower, "upper_bound": upper,
            "identity_defect": defect, "identity_allowance": 10.0 * truncation,
            "pass": ok}, sol


def _preset_scaling(cfg: ExperimentConfig) -> tuple[dict, evolve.Solution]:
    params = calibrated_params(cfg.params.a, coupling=cfg.params.coupling,
                               n=cfg.params.n_u)
    sol = evolve.run(params)
    report = rescale.covariance_report(params, cfg.params.delta_scale,
                                       sol_a=sol)
    allowance = {name: 3.0 * report["truncation_b"][name]
                 for name in report["truncation_b"]}
    checks = {name: report["fields"][name]["max"] <= allowance[name]
              for name in allowance}
    report["allowance"] = allowance
    report["checks"] = checks
    report["pass"] = all(checks.values())
    report["kind"] = "scaling"
    return report, sol


def _preset_convergence(cfg: ExperimentConfig) -> tuple[dict, evolve.Solution]:
    out = convergence_orders(cfg.params.a, cfg.params.coupling)
    ok = all(1.7 <= v <= 2.3 for v in out["orders"].values()) and all(
        3.3 <= f <= 4.8 for fs in out["residual_factors"].values() for f in fs)
    out["kind"] = "convergence"
    out["pass"] = ok
    sol = evolve.run(calibrated_params(cfg.params.a, coupling=cfg.params.coupling,
                                       n=CONVERGENCE_RESOLUTIONS[0]))
    return out, sol


def _preset_decay(cfg: ExperimentConfig) -> tuple[dict, evolve.Solution]:
    # decay rates want a long approach region, so this preset starts the
    # initial cone twice as far out as the other presets
    params = calibrated_params(cfg.params.a, coupling=cfg.params.coupling,
                               n=cfg.params.n_u,
                               u_inf_factor=max(8.0, cfg.params.u_inf_factor))
    sol = evolve.run(params)
    # sample where the decay-table rates are saturated: the sup-norm carrier
    # of each field rides with the pulse, so fit at its midpoint
    v0, v1 = params.pulse.support
    v_star = 0.5 * (v0 + v1)
    targets = {"psi": (-1.0, 0.3), "rhoF": (-2.0, 0.3), "Psit3": (-3.0, 0.5)}
    fits = {}
    ok = True
    for symbol, (want, tol) in targets.items():
        fit = diagnostics.fit_decay(sol, symbol, v_star=v_star)
        fits[symbol] = {"u_exponent": fit.u_exponent, "target": want,
                        "tolerance": tol, "r_squared": fit.r_squared}
        ok = ok and abs(fit.u_exponent - want) <= tol
    return {"kind": "decay", "fits": fits, "v_star": v_star, "pass": ok}, sol


def _preset_siglint(cfg: ExperimentConfig) -> tuple[dict, None]:
    report = siglint.lint_report()
    report["kind"] = "siglint"
    report["pass"] = report["all_pass"] and report["mutations"]["all_detected"]
    return report, None


def _preset_sweep(cfg: ExperimentConfig) -> tuple[dict, None]:
    rows = run_sweep(coupling=cfg.params.coupling, n=cfg.params.n_u)
    masses = {row["a"]: row["m_initial_cone"] for row in rows}
    charges = {row["a"]: row["Q_initial_cone"] for row in rows}
    mass_exp = diagnostics.fit_a_scaling(masses)
    charge_exp = diagnostics.fit_a_scaling(charges)
    ok = abs(mass_exp - 1.0) <= 0.15
    return {"kind": "sweep", "rows": rows, "mass_exponent": mass_exp,
            "charge_exponent": charge_exp, "pass": ok}, None


_PRESETS = {
    "minkowski": _preset_minkowski,
    "trapped": _preset_trapped,
    "charging": _preset_charging,
    "scaling": _preset_scaling,
    "convergence": _preset_convergence,
    "decay": _preset_decay,
    "siglint": _preset_siglint,
    "sweep": _preset_sweep,
}


def run_experiment(cfg: ExperimentConfig) -> int:
    """Run a preset, write artifacts, return a process exit status."""
    cfg.validate()
    os.makedirs(cfg.out_dir, exist_ok=True)
    summary, sol = _PRESETS[cfg.kind](cfg)
    summary["schema_version"] = 1
    if sol is not None:
        write_solution_csv(sol, os.path.join(cfg.out_dir, "solution.csv"))
        if cfg.plot:
            from . import plots
            plots.emit_plots(sol, out_dir=cfg.out_dir)
    write_summary(summary, os.path.join(cfg.out_dir, "summary.json"))
    if not summary.get("pass", False):
        failed = cfg.kind
        print(f"experiment {failed}: FAILED (see summary.json)")
        return 1
    print(f"experiment {cfg.kind}: ok")
    return 0
