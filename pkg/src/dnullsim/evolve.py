"""March the coupled system across the characteristic rectangle.

One step: advance the incoming-transported subset (expansions in area-scaled
form r*trchi, r*trchib, plus omega, rhoF, psi, Psi4, r, lnOmega) by a Heun
predictor-corrector in u, pin the v = 0 point to its exact flat-space
boundary value, then re-integrate (omegab, Ub, Psi3) along the new cone from
that seed.  The leftover outgoing-direction equations are evaluated as
constraint residuals on every cone.
"""

from __future__ import annotations

import json
import time
import zipfile
from dataclasses import dataclass, field

import numpy as np

from . import chardata, fieldeqs
from .core import (ALL_FIELDS, ConeData, PointState, RunParams, make_grid,
                   minkowski_state)

__all__ = [
    "Solution",
    "EvolutionError",
    "HorizonBreachError",
    "BlowupError",
    "CheckpointError",
    "step_cone",
    "run",
    "checkpoint",
    "restore",
    "solutions_equal",
]

DEFAULT_CEILING = 1.0e6
CHECKPOINT_VERSION = 1


class EvolutionError(RuntimeError):
    def __init__(self, message: str, u: float, v: float):
        super().__init__(f"{message} at (u={u:.6g}, v={v:.6g})")
        self.u = u
        self.v = v


class HorizonBreachError(EvolutionError):
    pass


class BlowupError(EvolutionError):
    pass


class CheckpointError(RuntimeError):
    pass


@dataclass
class Solution:
    """Evolved rectangle: cone sequence plus per-cone diagnostics series."""

    params: RunParams
    cones: list
    residual_history: list
    diagnostics: dict
    meta: dict = field(default_factory=dict)

    @property
    def u_levels(self) -> np.ndarray:
        return np.array([c.u for c in self.cones])

    def field_array(self, name: str) -> np.ndarray:
        """2D array of one field, u-major: shape (n_cones, n_v + 1)."""
        return np.stack([getattr(c, name) for c in self.cones])

    def cone_at(self, u: float) -> ConeData:
        i = int(np.argmin(np.abs(self.u_levels - u)))
        return self.cones[i]


def _first_offender(cone: ConeData, mask: np.ndarray) -> float:
    return float(cone.v[int(np.argmax(mask))])


def _check_cone(cone: ConeData, ceiling: float) -> None:
    bad_r = cone.r <= 0
    if np.any(bad_r):
        raise HorizonBreachError("horizon-breach: r <= 0", cone.u,
                                 _first_offender(cone, bad_r))
    for name in ALL_FIELDS:
        vals = getattr(cone, name)
        bad = ~np.isfinite(vals) if vals.dtype != complex else ~(
            np.isfinite(vals.real) & np.isfinite(vals.imag))
        if np.any(bad):
            raise BlowupError(f"blowup: non-finite {name}", cone.u,
                              _first_offender(cone, bad))
        over = np.abs(vals) > ceiling
        if np.any(over):
            raise BlowupError(f"blowup: |{name}| exceeded ceiling {ceiling:g}",
                              cone.u, _first_offender(cone, over))


def _u_rates(cone: ConeData, coupling: float, renorm_src: bool):
    """Per-point d/du rates, with the expansions combined into scaled form."""
    m = fieldeqs.matter_components(cone, coupling)
    rho = fieldeqs.gauss_rho(cone, m)
    du = fieldeqs.rhs_u(cone, m, rho, coupling,
                        renormalized_maxwell_source=renorm_src)
    d_x = cone.r * du.trchi + cone.trchi * du.r
    d_xb = cone.r * du.trchib + cone.trchib * du.r
    return {"x": d_x, "xb": d_xb, "r": du.r, "lnOmega": du.lnOmega,
            "omega": du.omega, "rhoF": du.rhoF, "psi": du.psi, "Psi4": du.Psi4}


def _apply_u_step(cone: ConeData, u_new: float, rates: dict, h: float) -> ConeData:
    x = cone.r * cone.trchi + h * rates["x"]
    xb = cone.r * cone.trchib + h * rates["xb"]
    r = cone.r + h * rates["r"]
    out = ConeData(
        u=u_new, v=cone.v.copy(), r=r,
        lnOmega=cone.lnOmega + h * rates["lnOmega"],
        trchi=x / r, trchib=xb / r,
        omega=cone.omega + h * rates["omega"],
        omegab=cone.omegab.copy(),
        rhoF=cone.rhoF + h * rates["rhoF"],
        Ub=cone.Ub.copy(),
        psi=cone.psi + h * rates["psi"],
        Psi4=cone.Psi4 + h * rates["Psi4"],
        Psi3=cone.Psi3.copy())
    return out


def _pin_incoming_boundary(cone: ConeData) -> None:
    """Reset the v = 0 point to its exact flat-space boundary value."""
    s = minkowski_state(cone.u, float(cone.v[0]))
    cone.r[0] = s.r
    cone.lnOmega[0] = 0.0
    cone.trchi[0] = s.trchi
    cone.trchib[0] = s.trchib
    cone.omega[0] = 0.0
    cone.rhoF[0] = 0.0
    cone.psi[0] = 0.0
    cone.Psi4[0] = 0.0


def _point_for_vsweep(cone, i, omegab, Ub, Psi3):
    return PointState(
        u=cone.u, v=float(cone.v[i]), r=float(cone.r[i]),
        lnOmega=float(cone.lnOmega[i]), trchi=float(cone.trchi[i]),
        trchib=float(cone.trchib[i]), omega=float(cone.omega[i]),
        omegab=omegab, rhoF=float(cone.rhoF[i]), Ub=Ub,
        psi=complex(cone.psi[i]), Psi4=complex(cone.Psi4[i]), Psi3=Psi3)


def _vsweep(cone: ConeData, coupling: float) -> None:
    """Re-integrate (omegab, Ub, Psi3) along the cone from the v = 0 seed."""
    n = len(cone.v)
    omegab = np.zeros(n)
    Ub = np.zeros(n)
    Psi3 = np.zeros(n, dtype=complex)

    def rates(i, ob, ub, p3):
        s = _point_for_vsweep(cone, i, ob, ub, p3)
        m = fieldeqs.matter_components(s, coupling)
        rho = fieldeqs.gauss_rho(s, m)
        d = fieldeqs.rhs_v(s, m, rho, coupling)
        return d.omegab, d.Ub, d.Psi3

    for i in range(n - 1):
        dv = float(cone.v[i + 1] - cone.v[i])
        k1 = rates(i, omegab[i], Ub[i], Psi3[i])
        pred = (omegab[i] + dv * k1[0], Ub[i] + dv * k1[1], Psi3[i] + dv * k1[2])
        k2 = rates(i + 1, *pred)
        omegab[i + 1] = omegab[i] + 0.5 * dv * (k1[0] + k2[0])
        Ub[i + 1] = Ub[i] + 0.5 * dv * (k1[1] + k2[1])
        Psi3[i + 1] = Psi3[i] + 0.5 * dv * (k1[2] + k2[2])

    cone.omegab = omegab
    cone.Ub = Ub
    cone.Psi3 = Psi3


def step_cone(current: ConeData, du: float, params: RunParams, *,
              ceiling: float = DEFAULT_CEILING,
              renormalized_maxwell_source: bool = False) -> ConeData:
    """Advance one cone to u + du (du > 0: u increases toward -a/4).

    Heun predictor-corrector for the incoming-transported subset; the
    re-integrated triple is rebuilt on the predictor cone before the corrector
    slope is taken, and again on the accepted cone.  Raises HorizonBreachError
    if r turns nonpositive, BlowupError past the field ceiling.
    """
    if not du > 0:
        raise ValueError("u-step must be positive (u increases toward -a/4)")
    coupling = params.coupling
    u_new = current.u + du

    k1 = _u_rates(current, coupling, renormalized_maxwell_source)
    pred = _apply_u_step(current, u_new, k1, du)
    bad_r = pred.r <= 0
    if np.any(bad_r):
        raise HorizonBreachError("horizon-breach: r <= 0 on predictor", u_new,
                                 _first_offender(pred, bad_r))
    _pin_incoming_boundary(pred)
    _vsweep(pred, coupling)

    k2 = _u_rates(pred, coupling, renormalized_maxwell_source)
    kmid = {name: 0.5 * (k1[name] + k2[name]) for name in k1}
    new = _apply_u_step(current, u_new, kmid, du)
    _pin_incoming_boundary(new)
    _check_cone(new, ceiling)
    _vsweep(new, coupling)

    res = fieldeqs.cone_residuals(new, coupling)
    new.max_residuals = fieldeqs.Residuals(
        **{k: float(np.max(v)) for k, v in res.as_dict().items()})
    return new


def _cone_diagnostics(cone: ConeData) -> tuple:
    om = cone.Omega
    q_end = float(cone.r[-1] ** 2 * cone.rhoF[-1])
    m_end = float(cone.r[-1] / 2.0 *
                  (1.0 + cone.r[-1] ** 2 / 4.0 * cone.trchi[-1] * cone.trchib[-1]))
    min_exp_out = float(np.min(cone.trchi / om))
    min_exp_in = float(np.min(cone.trchib * om))
    return q_end, m_end, min_exp_out, min_exp_in


def run(params: RunParams, *, ceiling: float = DEFAULT_CEILING,
        renormalized_maxwell_source: bool = False,
        initial_cone: ConeData | None = None) -> Solution:
    """Evolve the full rectangle [u_inf, -a/4] x [0, 1].

    The pulse attached to params is used as-is (calibrate it first when the
    data lower bounds matter).  A failed lower-bound check is recorded as a
    warning in the solution metadata, not an error.
    """
    params.validate()
    return run_on_grid(params, make_grid(params), ceiling=ceiling,
                       renormalized_maxwell_source=renormalized_maxwell_source,
                       initial_cone=initial_cone)


def run_on_grid(params: RunParams, grid, *, ceiling: float = DEFAULT_CEILING,
                renormalized_maxwell_source: bool = False,
                initial_cone: ConeData | None = None) -> Solution:
    """Evolve over an explicit grid (rescaled rectangles use v_max != 1)."""
    t0 = time.perf_counter()

    cone = initial_cone if initial_cone is not None else \
        chardata.complete_outgoing_cone(params)
    bounds = chardata.verify_lower_bounds(cone, params)
    warnings_list = [] if bounds.both_pass else ["bounds-unmet"]

    res0 = fieldeqs.cone_residuals(cone, params.coupling)
    cone.max_residuals = fieldeqs.Residuals(
        **{k: float(np.max(v)) for k, v in res0.as_dict().items()})

    cones = [cone]
    residual_history = [cone.max_residuals]
    diag_rows = [_cone_diagnostics(cone)]
    for i in range(grid.n_u):
        du = float(grid.u_levels[i + 1] - grid.u_levels[i])
        cone = step_cone(cone, du, params, ceiling=ceiling,
                         renormalized_maxwell_source=renormalized_maxwell_source)
        cone.u = float(grid.u_levels[i + 1])
        cones.append(cone)
        residual_history.append(cone.max_residuals)
        diag_rows.append(_cone_diagnostics(cone))

    diag = np.array(diag_rows)
    diagnostics = {
        "u": grid.u_levels.copy(),
        "Q_end": diag[:, 0],
        "m_end": diag[:, 1],
        "min_exp_out": diag[:, 2],
        "min_exp_in": diag[:, 3],
    }
    meta = {
        "integrator": "heun",
        "ceiling": ceiling,
        "renormalized_maxwell_source": renormalized_maxwell_source,
        "wall_clock_s": time.perf_counter() - t0,
        "bounds": {"trap_cond": bounds.trap_cond,
                   "charge_cond": bounds.charge_cond,
                   "target": bounds.target,
                   "trap_pass": bounds.trap_pass,
                   "charge_pass": bounds.charge_pass},
        "warnings": warnings_list,
    }
    return Solution(params=params, cones=cones,
                    residual_history=residual_history,
                    diagnostics=diagnostics, meta=meta)


# ---------------------------------------------------------------------------
# checkpointing: versioned npz container, bit-exact round trip
# ---------------------------------------------------------------------------

_RES_KEYS = ("ray4", "cross4", "maxwell4", "psi_link", "area4", "lapse4")


def _params_to_dict(p: RunParams) -> dict:
    return {"a": p.a, "coupling": p.coupling, "u_inf_factor": p.u_inf_factor,
            "n_u": p.n_u, "n_v": p.n_v, "delta_scale": p.delta_scale,
            "pulse": {"amp": p.pulse.amp, "phase_rate": p.pulse.phase_rate,
                      "support": list(p.pulse.support),
                      "profile": p.pulse.profile}}


def _params_from_dict(d: dict) -> RunParams:
    from .core import PulseShape
    pulse = PulseShape(amp=d["pulse"]["amp"], phase_rate=d["pulse"]["phase_rate"],
                       support=tuple(d["pulse"]["support"]),
                       profile=d["pulse"]["profile"])
    return RunParams(a=d["a"], coupling=d["coupling"],
                     u_inf_factor=d["u_inf_factor"], n_u=d["n_u"], n_v=d["n_v"],
                     pulse=pulse, delta_scale=d["delta_scale"])


def checkpoint(sol: Solution, path) -> None:
    """Write a Solution to a versioned npz container (u-major field arrays)."""
    payload = {
        "schema_version": np.array(CHECKPOINT_VERSION, dtype=np.int64),
        "params_json": np.frombuffer(
            json.dumps(_params_to_dict(sol.params)).encode(), dtype=np.uint8),
        "meta_json": np.frombuffer(
            json.dumps(sol.meta).encode(), dtype=np.uint8),
        "u_levels": sol.u_levels,
        "v_levels": sol.cones[0].v,
    }
    for name in ALL_FIELDS:
        payload["field_" + name] = sol.field_array(name)
    for key in _RES_KEYS:
        payload["res_" + key] = np.array(
            [getattr(r, key) for r in sol.residual_history])
    for key, arr in sol.diagnostics.items():
        payload["diag_" + key] = arr
    with open(path, "wb") as fh:
        np.savez(fh, **payload)


def restore(path) -> Solution:
    """Read a Solution back; rejects unknown schema versions and damaged files."""
    try:
        with np.load(path) as data:
            if "schema_version" not in data:
                raise CheckpointError("not a dnullsim checkpoint: missing version")
            version = int(data["schema_version"])
            if version != CHECKPOINT_VERSION:
                raise CheckpointError(f"unsupported checkpoint version {version}")
            params = _params_from_dict(
                json.loads(bytes(data["params_json"]).decode()))
            meta = json.loads(bytes(data["meta_json"]).decode())
            u_levels = data["u_levels"]
            v_levels = data["v_levels"]
            fields = {name: data["field_" + name] for name in ALL_FIELDS}
            res = {key: data["res_" + key] for key in _RES_KEYS}
            diag_keys = [k[5:] for k in data.files if k.startswith("diag_")]
            diagnostics = {k: data["diag_" + k] for k in diag_keys}
    except (zipfile.BadZipFile, OSError, ValueError, KeyError, EOFError) as exc:
        if isinstance(exc, CheckpointError):
            raise
        raise CheckpointError(f"damaged or truncated checkpoint: {exc}") from exc

    cones = []
    residual_history = []
    for i, u in enumerate(u_levels):
        cone = ConeData(u=float(u), v=v_levels.copy(),
                        **{name: fields[name][i].copy() for name in ALL_FIELDS})
        cone.max_residuals = fieldeqs.Residuals(
            **{key: float(res[key][i]) for key in _RES_KEYS})
        cones.append(cone)
        residual_history.append(cone.max_residuals)
    return Solution(params=params, cones=cones,
                    residual_history=residual_history,
                    diagnostics=diagnostics, meta=meta)


def solutions_equal(a: Solution, b: Solution) -> bool:
    """Bitwise equality of all field arrays, residuals and grids."""
    if len(a.cones) != len(b.cones):
        return False
    if not np.array_equal(a.u_levels, b.u_levels):
        return False
    for ca, cb in zip(a.cones, b.cones):
        if not np.array_equal(ca.v, cb.v):
            return False
        for name in ALL_FIELDS:
            if not np.array_equal(getattr(ca, name), getattr(cb, name)):
                return False
    for ra, rb in zip(a.residual_history, b.residual_history):
        if ra.as_dict() != rb.as_dict():
            return False
    return True
