"""Geometric and physical observables: expansions, mass, charge, decay fits.

Sphere integrals use the exact closed forms of spherical symmetry
(4 pi r^2 times the integrand); there is no angular grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PointState

__all__ = [
    "SphereDiag",
    "DecayFit",
    "sphere_diag",
    "psi3_tilde",
    "sc_norm",
    "fit_decay",
    "fit_a_scaling",
    "FIT_SYMBOLS",
]

# |u|-decay fits are defined for these field names
FIT_SYMBOLS = ("psi", "Psi4", "rhoF", "Ub", "Psit3", "trchib_tilde")


@dataclass
class SphereDiag:
    """Per-sphere observables: expansions, trapped flag, mass and charge."""

    u: float
    v: float
    exp_out: float
    exp_in: float
    trapped: bool
    m: float
    Q: float
    q_over_m: float | None


@dataclass
class DecayFit:
    """Log-log fit of a field's tail against |u| (and optionally against a)."""

    symbol: str
    u_exponent: float
    a_exponent: float | None
    r_squared: float
    intercept: float
    n_samples: int
    flag: str | None = None


def sphere_diag(s: PointState, a: float | None = None) -> SphereDiag:
    """Expansions, trapped flag, Hawking mass and charge of the sphere at s.

    2m/r = 1 + (r^2/4) trchi trchib and Q = r^2 rhoF in spherical symmetry.
    The charge-to-mass ratio is only quoted for mass decisively above the
    rounding floor, 1e-6 times the pulse size a (|u| stands in for a when the
    run scale is not supplied).
    """
    om = s.Omega
    exp_out = s.trchi / om
    exp_in = s.trchib * om
    m = 0.5 * s.r * (1.0 + 0.25 * s.r * s.r * s.trchi * s.trchib)
    q = s.r * s.r * s.rhoF
    scale = a if a is not None else abs(s.u)
    q_over_m = q / m if m > 1.0e-6 * scale else None
    return SphereDiag(u=s.u, v=s.v, exp_out=exp_out, exp_in=exp_in,
                      trapped=(exp_out < 0 and exp_in < 0), m=m, Q=q,
                      q_over_m=q_over_m)


def psi3_tilde(s) -> complex:
    """Radially renormalized incoming derivative: Psi3 - psi / (Omega |u|).

    Subtracting the 1/|u| mode leaves the part of Psi3 that decays like
    |u|^-3; requires u < 0.
    """
    u = np.asarray(s.u, dtype=float) if not np.isscalar(s.u) else s.u
    if np.any(np.asarray(u) >= 0):
        raise ValueError("psi3_tilde requires u < 0")
    return s.Psi3 - s.psi / (np.exp(s.lnOmega) * np.abs(u))


_SC_WEIGHT_EXP = {"Linf": lambda s2: 2 * s2 + 1,
                  "L2": lambda s2: 2 * s2,
                  "L1": lambda s2: 2 * s2 - 1}


def sc_norm(values, s2, kind: str, a: float, u: float, r=None) -> float:
    """Scale-invariant sphere norm: a^-s2 |u|^w(kind) times the plain norm.

    The |u| weight exponent is 2 s2 + 1 (Linf), 2 s2 (L2) or 2 s2 - 1 (L1).
    In spherical symmetry the plain sphere norms are |phi| (Linf),
    |phi| sqrt(4 pi r^2) (L2) and |phi| 4 pi r^2 (L1); r is required for the
    integral norms.  s2 may be given as a symbol name, resolved against the
    signature registry.
    """
    if isinstance(s2, str):
        from . import siglint
        s2 = float(siglint.default_registry().signature(s2))
    if kind not in _SC_WEIGHT_EXP:
        raise ValueError(f"unknown norm kind {kind!r}")
    vals = np.abs(np.asarray(values))
    if kind == "Linf":
        base = float(np.max(vals)) if vals.ndim else float(vals)
    else:
        if r is None:
            raise ValueError("sphere area needed: pass r for L2/L1 norms")
        area = 4.0 * math.pi * np.asarray(r, dtype=float) ** 2
        if kind == "L2":
            base = float(np.max(vals * np.sqrt(area))) if vals.ndim \
                else float(vals * math.sqrt(float(area)))
        else:
            base = float(np.max(vals * area)) if vals.ndim \
                else float(vals * float(area))
    w = _SC_WEIGHT_EXP[kind](s2)
    return a ** (-s2) * abs(u) ** w * base


def _tail_series(sol, symbol: str, v_star: float):
    """|field| at v = v_star on the power-law window of the u range.

    The first 10% of the range (data-surface transients) is always dropped;
    when enough cones remain, the window is further narrowed to
    a/2 <= |u| <= |u_inf|/4, clear of both the data surface and the strongly
    focused zone near the end of the evolution.
    """
    v = sol.cones[0].v
    j = int(np.argmin(np.abs(v - v_star)))
    u_levels = sol.u_levels
    u_span = u_levels[-1] - u_levels[0]
    keep = u_levels >= u_levels[0] + 0.1 * u_span
    a = sol.params.a
    windowed = keep & (np.abs(u_levels) <= np.abs(u_levels[0]) / 4.0) \
        & (np.abs(u_levels) >= a / 2.0)
    if np.sum(windowed) >= 4:
        keep = windowed

    vals = []
    for cone in sol.cones:
        if symbol == "psi":
            x = cone.psi[j]
        elif symbol == "Psi4":
            x = cone.Psi4[j]
        elif symbol == "rhoF":
            x = cone.rhoF[j]
        elif symbol == "Ub":
            x = cone.Ub[j]
        elif symbol == "Psit3":
            x = cone.Psi3[j] - cone.psi[j] / (math.exp(cone.lnOmega[j]) * abs(cone.u))
        elif symbol == "trchib_tilde":
            x = cone.trchib[j] + 2.0 / (math.exp(cone.lnOmega[j]) * abs(cone.u))
        else:
            raise ValueError(f"unknown fit symbol {symbol!r}; "
                             f"expected one of {FIT_SYMBOLS}")
        vals.append(abs(x))
    return np.abs(u_levels[keep]), np.array(vals)[keep]


def fit_decay(sol, symbol: str, v_star: float = 1.0) -> DecayFit:
    """Least-squares power-law fit of log|field(u, v_star)| against log|u|.

    Uses the tail cones only (first 10% of the u range excluded); v_star
    should sit outside the pulse support.  A field that is identically zero
    comes back flagged rather than fitted.  Pass a list of solutions from an
    a-sweep to also recover the a exponent from the fit intercepts.
    """
    if isinstance(sol, (list, tuple)):
        return _fit_sweep(sol, symbol, v_star)
    absu, vals = _tail_series(sol, symbol, v_star)
    if len(vals) < 4:
        raise ValueError("need at least 4 tail cones for a decay fit")
    if np.max(vals) == 0.0:
        return DecayFit(symbol=symbol, u_exponent=float("nan"), a_exponent=None,
                        r_squared=0.0, intercept=float("nan"),
                        n_samples=len(vals), flag="identically zero")
    good = vals > 0
    x = np.log(absu[good])
    y = np.log(vals[good])
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(symbol=symbol, u_exponent=float(slope), a_exponent=None,
                    r_squared=r2, intercept=float(intercept),
                    n_samples=int(np.sum(good)))


def _fit_sweep(sols, symbol: str, v_star: float) -> DecayFit:
    if len(sols) < 3:
        raise ValueError("a-exponent fit needs at least 3 runs")
    fits = [fit_decay(s, symbol, v_star) for s in sols]
    if any(f.flag for f in fits):
        return DecayFit(symbol=symbol, u_exponent=float("nan"), a_exponent=None,
                        r_squared=0.0, intercept=float("nan"),
                        n_samples=sum(f.n_samples for f in fits),
                        flag="identically zero")
    log_a = np.log([s.params.a for s in sols])
    intercepts = np.array([f.intercept for f in fits])
    a_slope = float(np.polyfit(log_a, intercepts, 1)[0])
    ref = fits[-1]
    return DecayFit(symbol=symbol, u_exponent=ref.u_exponent, a_exponent=a_slope,
                    r_squared=ref.r_squared, intercept=ref.intercept,
                    n_samples=ref.n_samples)


def fit_a_scaling(values_by_a: dict[float, float]) -> float:
    """Least-squares exponent p in value ~ a^p from an a-sweep."""
    if len(values_by_a) < 2:
        raise ValueError("need at least two a values")
    a = np.log(np.array(sorted(values_by_a)))
    y = np.log(np.array([values_by_a[k] for k in sorted(values_by_a)]))
    return float(np.polyfit(a, y, 1)[0])
