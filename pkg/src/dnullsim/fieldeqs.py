"""Right-hand sides of the spherically reduced field equations.

With spherical symmetry every sphere-tangent 1-form and traceless 2-tensor
vanishes, so the system closes on the scalars stored in PointState.  The
incoming-direction (d/du) equations drive the evolution, the three remaining
outgoing-direction fields (omegab, Ub, Psi3) are re-integrated along each cone,
and the leftover d/dv equations serve as constraint monitors.

Frame convention: e3 = (1/Omega) d/du along incoming rays, e4 = (1/Omega) d/dv
along outgoing rays.  All functions below accept either scalar PointState
fields or whole-cone numpy arrays (ConeData), and return the same shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MatterComponents",
    "Residuals",
    "UDerivs",
    "VDerivs",
    "E4Rates",
    "matter_components",
    "gauss_rho",
    "rhs_u",
    "rhs_v",
    "e4_rates",
    "constraint_residuals",
]


@dataclass
class MatterComponents:
    """Null components of the matter stress entering the reduced equations.

    S44/S33/S34 are the trace-adjusted (Schouten) null components, trSsl the
    sphere trace, TrS the full metric trace and Rscal the scalar curvature.
    In spherical symmetry S44 = 2|Psi4|^2 and S33 = 2|Psi3|^2, both >= 0.
    """

    S44: "float | np.ndarray"
    S33: "float | np.ndarray"
    S34: "float | np.ndarray"
    trSsl: "float | np.ndarray"
    TrS: "float | np.ndarray"
    Rscal: "float | np.ndarray"


@dataclass
class Residuals:
    """Constraint residuals of the unevolved d/dv equations on one v interval."""

    ray4: "float | np.ndarray"
    cross4: "float | np.ndarray"
    maxwell4: "float | np.ndarray"
    psi_link: "float | np.ndarray"
    area4: "float | np.ndarray"
    lapse4: "float | np.ndarray"

    def as_dict(self) -> dict:
        return {"ray4": self.ray4, "cross4": self.cross4,
                "maxwell4": self.maxwell4, "psi_link": self.psi_link,
                "area4": self.area4, "lapse4": self.lapse4}

    def overall_max(self) -> float:
        return max(float(np.max(v)) for v in self.as_dict().values())


@dataclass
class UDerivs:
    """d/du of the incoming-transported subset."""

    trchib: "float | np.ndarray"
    trchi: "float | np.ndarray"
    omega: "float | np.ndarray"
    rhoF: "float | np.ndarray"
    Psi4: "complex | np.ndarray"
    psi: "complex | np.ndarray"
    r: "float | np.ndarray"
    lnOmega: "float | np.ndarray"


@dataclass
class VDerivs:
    """d/dv of the per-cone re-integrated subset."""

    omegab: "float | np.ndarray"
    Ub: "float | np.ndarray"
    Psi3: "complex | np.ndarray"


@dataclass
class E4Rates:
    """d/dv of the constrained subset (the monitor equations as rates)."""

    trchi: "float | np.ndarray"
    trchib: "float | np.ndarray"
    rhoF: "float | np.ndarray"
    psi: "complex | np.ndarray"
    r: "float | np.ndarray"
    lnOmega: "float | np.ndarray"


def matter_components(s, coupling: float = 0.0) -> MatterComponents:
    """Ricci and Schouten null components of the Maxwell-charged-scalar source.

    Ric44 = 2|Psi4|^2, Ric33 = 2|Psi3|^2, Ric34 = 2 Re(Psi3 conj(Psi4)) + 2 rhoF^2,
    sphere part g * rhoF^2, and R = -2 Re(Psi3 conj(Psi4)).  The trace adjustment
    S = Ric - (1/6) g R uses g34 = -2.  The coupling enters only through the
    gauge-covariant derivatives already stored in the state, so it is accepted
    for signature compatibility and not otherwise used.
    """
    psi4_sq = (s.Psi4 * np.conj(s.Psi4)).real
    psi3_sq = (s.Psi3 * np.conj(s.Psi3)).real
    cross = (s.Psi3 * np.conj(s.Psi4)).real
    rhoF_sq = s.rhoF * s.rhoF

    ric44 = 2.0 * psi4_sq
    ric33 = 2.0 * psi3_sq
    ric34 = 2.0 * cross + 2.0 * rhoF_sq
    rscal = -2.0 * cross

    s44 = ric44
    s33 = ric33
    s34 = ric34 + rscal / 3.0
    # sphere trace: g^AB Ric_AB = 2 rhoF^2, minus (1/6) * 2 * R
    tr_ssl = 2.0 * rhoF_sq - rscal / 3.0
    # metric trace: g^{mu nu} S_{mu nu} = R - (2/3) R
    tr_s = rscal / 3.0
    return MatterComponents(S44=s44, S33=s33, S34=s34, trSsl=tr_ssl,
                            TrS=tr_s, Rscal=rscal)


def gauss_rho(s, m: MatterComponents):
    """Algebraic closure of the Weyl scalar rho from the Gauss relation.

    The sphere curvature is 1/r^2, so rho = -1/r^2 - (1/4) trchi trchib
    + (1/2) trSsl.  rho is never independently evolved.
    """
    return -1.0 / (s.r * s.r) - 0.25 * s.trchi * s.trchib + 0.5 * m.trSsl


def rhs_u(s, m: MatterComponents, rho, coupling: float,
          renormalized_maxwell_source: bool = False) -> UDerivs:
    """d/du rates of the incoming-transported fields.

    The Maxwell charge transport sources from Im(psi conj(Psi3)); setting
    renormalized_maxwell_source swaps Psi3 for its radially renormalized
    variant Psi3 - psi/(Omega |u|), kept as a sensitivity switch.
    """
    Om = np.exp(s.lnOmega)
    if renormalized_maxwell_source:
        psi3_src = s.Psi3 - s.psi / (Om * np.abs(s.u))
    else:
        psi3_src = s.Psi3
    im_psi_psi3 = (s.psi * np.conj(psi3_src)).imag

    d_trchib = Om * (-0.5 * s.trchib * s.trchib - 2.0 * s.omegab * s.trchib - m.S33)
    d_trchi = Om * (-0.5 * s.trchi * s.trchib + 2.0 * s.omegab * s.trchi
                    + 2.0 * rho + m.TrS)
    d_omega = Om * (2.0 * s.omega * s.omegab + 0.5 * rho
                    + 0.25 * (m.trSsl - m.TrS))
    d_rhoF = Om * (-s.trchib * s.rhoF - 2.0 * coupling * im_psi_psi3)
    d_Psi4 = Om * (-0.5 * s.trchib * s.Psi4 + 2.0 * s.omegab * s.Psi4
                   - 1j * coupling * s.Ub * s.Psi4
                   - 0.5 * s.trchi * s.Psi3 + 1j * coupling * s.rhoF * s.psi)
    d_psi = Om * (s.Psi3 - 1j * coupling * s.Ub * s.psi)
    d_r = 0.5 * Om * s.trchib * s.r
    d_lnOmega = -2.0 * Om * s.omegab
    return UDerivs(trchib=d_trchib, trchi=d_trchi, omega=d_omega, rhoF=d_rhoF,
                   Psi4=d_Psi4, psi=d_psi, r=d_r, lnOmega=d_lnOmega)


def rhs_v(s, m: MatterComponents, rho, coupling: float) -> VDerivs:
    """d/dv rates of the per-cone re-integrated fields (omegab, Ub, Psi3)."""
    Om = np.exp(s.lnOmega)
    d_omegab = Om * (2.0 * s.omega * s.omegab + 0.5 * rho
                     + 0.25 * (m.trSsl - m.TrS))
    d_Ub = Om * (-2.0 * s.rhoF + 2.0 * s.omega * s.Ub)
    d_Psi3 = Om * (-0.5 * s.trchi * s.Psi3 + 2.0 * s.omega * s.Psi3
                   - 0.5 * s.trchib * s.Psi4 - 1j * coupling * s.rhoF * s.psi)
    return VDerivs(omegab=d_omegab, Ub=d_Ub, Psi3=d_Psi3)


def e4_rates(s, m: MatterComponents, rho, coupling: float) -> E4Rates:
    """d/dv rates of the constrained subset.

    These are the equations monitored as residuals during evolution; the same
    expressions drive the constrained integration of the initial outgoing cone.
    """
    Om = np.exp(s.lnOmega)
    im_psi_psi4 = (s.psi * np.conj(s.Psi4)).imag
    d_trchi = Om * (-0.5 * s.trchi * s.trchi - 2.0 * s.omega * s.trchi - m.S44)
    d_trchib = Om * (-0.5 * s.trchi * s.trchib + 2.0 * s.omega * s.trchib
                     + 2.0 * rho + m.TrS)
    d_rhoF = Om * (-s.trchi * s.rhoF + 2.0 * coupling * im_psi_psi4)
    d_psi = Om * s.Psi4
    d_r = 0.5 * Om * s.trchi * s.r
    d_lnOmega = -2.0 * Om * s.omega
    return E4Rates(trchi=d_trchi, trchib=d_trchib, rhoF=d_rhoF, psi=d_psi,
                   r=d_r, lnOmega=d_lnOmega)


def _mid(a, b):
    return 0.5 * (a + b)


def constraint_residuals(left, right, dv: float, coupling: float) -> Residuals:
    """Defect of each monitor equation on the v-interval [left, right].

    Residual = |centered finite difference of the left-hand side minus the
    midpoint average of the right-hand side|; O(dv^2) on exact solutions.
    left and right may be PointStates or aligned array views of two cones.
    """
    rates_l = e4_rates(left, matter_components(left, coupling),
                       gauss_rho(left, matter_components(left, coupling)), coupling)
    rates_r = e4_rates(right, matter_components(right, coupling),
                       gauss_rho(right, matter_components(right, coupling)), coupling)

    def defect(fname, rname):
        fd = (getattr(right, fname) - getattr(left, fname)) / dv
        mid = _mid(getattr(rates_l, rname), getattr(rates_r, rname))
        return np.abs(fd - mid)

    return Residuals(
        ray4=defect("trchi", "trchi"),
        cross4=defect("trchib", "trchib"),
        maxwell4=defect("rhoF", "rhoF"),
        psi_link=defect("psi", "psi"),
        area4=defect("r", "r"),
        lapse4=defect("lnOmega", "lnOmega"),
    )


def cone_residuals(cone, coupling: float) -> Residuals:
    """Residuals on every v interval of a cone, as arrays of length n_v."""

    class _View:
        def __init__(self, c, sl):
            self.u = c.u
            for name in ("v", "r", "lnOmega", "trchi", "trchib", "omega",
                         "omegab", "rhoF", "Ub", "psi", "Psi4", "Psi3"):
                setattr(self, name, getattr(c, name)[sl])

    dv = float(cone.v[1] - cone.v[0])
    left = _View(cone, slice(None, -1))
    right = _View(cone, slice(1, None))
    return constraint_residuals(left, right, dv, coupling)
