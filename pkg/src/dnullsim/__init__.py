"""Double-null charged scalar collapse simulator and signature linter."""

from .core import (ConeData, GridSpec, PointState, PulseShape, RunParams,
                   make_grid, minkowski_cone, minkowski_state)
from .fieldeqs import (MatterComponents, Residuals, constraint_residuals,
                       gauss_rho, matter_components, rhs_u, rhs_v)
from .chardata import (CalibrationError, LowerBoundReport, calibrate_pulse,
                       complete_outgoing_cone, incoming_minkowski,
                       pulse_free_data, verify_lower_bounds)
from .evolve import (BlowupError, CheckpointError, HorizonBreachError,
                     Solution, checkpoint, restore, run, step_cone)
from .diagnostics import (DecayFit, SphereDiag, fit_decay, psi3_tilde, sc_norm,
                          sphere_diag)
from .rescale import ScaleMap, covariance_report, rescale_point

__version__ = "0.1.0"
