"""Run parameters, grids, state containers and the flat-space reference solution.

Coordinates: u labels outgoing cones (u < 0 throughout the evolution region),
v labels incoming cones (v in [0, 1] for a standard run).  The sphere at (u, v)
has areal radius r; in flat space r = v - u and the outgoing/incoming expansions
are 2/r and -2/r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "PulseShape",
    "RunParams",
    "GridSpec",
    "PointState",
    "ConeData",
    "make_grid",
    "minkowski_state",
    "minkowski_cone",
]

PROFILE_KINDS = ("sine_squared", "smooth_bump")


@dataclass(frozen=True)
class PulseShape:
    """Free-data profile for the complex scalar on the initial outgoing cone.

    amp is an overall dimensionless multiplier on top of the sqrt(a)/|u_inf|
    amplitude normalization; phase_rate is the linear phase rate of psi in v
    (negative values wind the phase so the generated charge is positive);
    support is the open interval of v on which the bump lives.
    """

    amp: float = 1.0
    phase_rate: float = 0.0
    support: tuple[float, float] = (0.1, 0.9)
    profile: str = "sine_squared"

    def validate(self) -> None:
        v0, v1 = self.support
        if not (0.0 <= v0 < v1 <= 1.0):
            raise ValueError("pulse support must satisfy 0 <= v0 < v1 <= 1")
        if self.amp < 0:
            raise ValueError("pulse amp must be nonnegative")
        if self.profile not in PROFILE_KINDS:
            raise ValueError(f"unknown pulse profile {self.profile!r}")


@dataclass(frozen=True)
class RunParams:
    """Parameters of one evolution: pulse size a, coupling, region and grid."""

    a: float = 40.0
    coupling: float = 0.01
    u_inf_factor: float = 4.0
    n_u: int = 200
    n_v: int = 200
    pulse: PulseShape = field(default_factory=PulseShape)
    delta_scale: float = 0.5

    @property
    def u_inf(self) -> float:
        return -self.u_inf_factor * self.a

    @property
    def u_end(self) -> float:
        return -self.a / 4.0

    def validate(self) -> None:
        if not self.a > 1:
            raise ValueError("a must exceed 1")
        if not self.coupling > 0:
            raise ValueError("coupling must be positive")
        if not self.u_inf_factor >= 2:
            raise ValueError("u_inf_factor must be at least 2")
        if self.n_u < 2:
            raise ValueError("n_u must be at least 2")
        if self.n_v < 2:
            raise ValueError("n_v must be at least 2")
        if not self.delta_scale > 0:
            raise ValueError("delta_scale must be positive")
        if not (self.u_end - self.u_inf) > 0:
            raise ValueError("u range is empty: u_inf must lie below -a/4")
        self.pulse.validate()

    def with_pulse(self, pulse: PulseShape) -> "RunParams":
        return replace(self, pulse=pulse)


@dataclass(frozen=True)
class GridSpec:
    """Uniform characteristic grid on [u_start, u_end] x [0, v_max]."""

    u_levels: np.ndarray
    v_levels: np.ndarray
    du: float
    dv: float

    @property
    def n_u(self) -> int:
        return len(self.u_levels) - 1

    @property
    def n_v(self) -> int:
        return len(self.v_levels) - 1


def make_grid(params: RunParams) -> GridSpec:
    """Build the uniform grid covering [u_inf, -a/4] x [0, 1].

    Endpoints are set exactly; interior levels are evenly spaced.
    """
    params.validate()
    u = np.linspace(params.u_inf, params.u_end, params.n_u + 1)
    v = np.linspace(0.0, 1.0, params.n_v + 1)
    u[0], u[-1] = params.u_inf, params.u_end
    v[0], v[-1] = 0.0, 1.0
    du = (params.u_end - params.u_inf) / params.n_u
    dv = 1.0 / params.n_v
    return GridSpec(u_levels=u, v_levels=v, du=du, dv=dv)


@dataclass
class PointState:
    """All evolved fields at one grid point.

    Units: r is a length; trchi, trchib, omega, omegab, Ub carry 1/length;
    rhoF carries 1/length^2; psi is dimensionless; Psi4, Psi3 carry 1/length.
    """

    u: float
    v: float
    r: float
    lnOmega: float
    trchi: float
    trchib: float
    omega: float
    omegab: float
    rhoF: float
    Ub: float
    psi: complex
    Psi4: complex
    Psi3: complex

    @property
    def Omega(self) -> float:
        return math.exp(self.lnOmega)

    def is_finite(self) -> bool:
        reals = (self.u, self.v, self.r, self.lnOmega, self.trchi, self.trchib,
                 self.omega, self.omegab, self.rhoF, self.Ub)
        cplx = (self.psi, self.Psi4, self.Psi3)
        return all(math.isfinite(x) for x in reals) and all(
            math.isfinite(z.real) and math.isfinite(z.imag) for z in cplx)


FLOAT_FIELDS = ("r", "lnOmega", "trchi", "trchib", "omega", "omegab", "rhoF", "Ub")
COMPLEX_FIELDS = ("psi", "Psi4", "Psi3")
ALL_FIELDS = FLOAT_FIELDS + COMPLEX_FIELDS


@dataclass
class ConeData:
    """One outgoing cone H_u: every evolved field sampled on the v grid.

    Fields are stored as arrays over v; point(i) packages a single grid point
    as a PointState.  max_residuals holds the worst constraint residuals seen
    on this cone (filled in by the evolution; None on freshly built cones).
    """

    u: float
    v: np.ndarray
    r: np.ndarray
    lnOmega: np.ndarray
    trchi: np.ndarray
    trchib: np.ndarray
    omega: np.ndarray
    omegab: np.ndarray
    rhoF: np.ndarray
    Ub: np.ndarray
    psi: np.ndarray
    Psi4: np.ndarray
    Psi3: np.ndarray
    max_residuals: "object | None" = None

    @property
    def Omega(self) -> np.ndarray:
        return np.exp(self.lnOmega)

    @property
    def n_v(self) -> int:
        return len(self.v) - 1

    def point(self, i: int) -> PointState:
        return PointState(
            u=self.u, v=float(self.v[i]), r=float(self.r[i]),
            lnOmega=float(self.lnOmega[i]), trchi=float(self.trchi[i]),
            trchib=float(self.trchib[i]), omega=float(self.omega[i]),
            omegab=float(self.omegab[i]), rhoF=float(self.rhoF[i]),
            Ub=float(self.Ub[i]), psi=complex(self.psi[i]),
            Psi4=complex(self.Psi4[i]), Psi3=complex(self.Psi3[i]))

    def __iter__(self):
        return (self.point(i) for i in range(len(self.v)))

    def copy(self) -> "ConeData":
        return ConeData(
            u=self.u, v=self.v.copy(),
            max_residuals=self.max_residuals,
            **{name: getattr(self, name).copy() for name in ALL_FIELDS})

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(getattr(self, name))) for name in ALL_FIELDS)


def minkowski_state(u: float, v: float) -> PointState:
    """Exact flat-space values at (u, v): r = v - u, unit lapse, vanishing matter."""
    r = v - u
    if r <= 0:
        raise ValueError("degenerate sphere: minkowski_state requires v - u > 0")
    return PointState(
        u=u, v=v, r=r, lnOmega=0.0, trchi=2.0 / r, trchib=-2.0 / r,
        omega=0.0, omegab=0.0, rhoF=0.0, Ub=0.0,
        psi=0.0 + 0.0j, Psi4=0.0 + 0.0j, Psi3=0.0 + 0.0j)


def minkowski_cone(u: float, v_levels: np.ndarray) -> ConeData:
    """Exact flat-space cone at level u over the given v grid."""
    if v_levels[0] - u <= 0:
        raise ValueError("degenerate sphere: minkowski_cone requires v - u > 0")
    r = v_levels - u
    zeros = np.zeros_like(r)
    czeros = np.zeros(len(r), dtype=complex)
    return ConeData(
        u=u, v=v_levels.copy(), r=r, lnOmega=zeros.copy(),
        trchi=2.0 / r, trchib=-2.0 / r,
        omega=zeros.copy(), omegab=zeros.copy(), rhoF=zeros.copy(),
        Ub=zeros.copy(), psi=czeros.copy(), Psi4=czeros.copy(),
        Psi3=czeros.copy())
