import math
import os

import numpy as np
import pytest

from dnullsim import chardata, core, evolve, experiments
from dnullsim.core import PulseShape, RunParams


def test_step_preserves_flat_space_to_rounding():
    v = np.linspace(0.0, 1.0, 101)
    cone = core.minkowski_cone(-160.0, v)
    params = RunParams(a=40, n_u=100, n_v=100)
    new = evolve.step_cone(cone, 1.5, params)
    r_exact = v - (-158.5)
    assert np.max(np.abs(new.r - r_exact)) <= 1e-12
    assert np.max(np.abs(new.trchi - 2 / r_exact)) <= 1e-13
    assert np.max(np.abs(new.trchib + 2 / r_exact)) <= 1e-13
    assert np.max(np.abs(new.psi)) == 0.0
    assert np.max(np.abs(new.omegab)) <= 1e-15


def test_step_rejects_inverted_direction():
    cone = core.minkowski_cone(-160.0, np.linspace(0, 1, 11))
    with pytest.raises(ValueError, match="positive"):
        evolve.step_cone(cone, -1.0, RunParams())


def test_single_step_residuals_small_at_high_resolution():
    params = experiments.calibrated_params(40.0, n=400)
    cone0 = chardata.complete_outgoing_cone(params)
    du = (params.u_end - params.u_inf) / params.n_u
    new = evolve.step_cone(cone0, du, params)
    worst = new.max_residuals.overall_max()
    assert math.isfinite(worst)
    assert worst <= 1e-3


def test_blowup_guard_names_the_point():
    params = RunParams(a=40, n_u=20, n_v=20)
    cone = chardata.complete_outgoing_cone(params)
    cone.Psi4 = cone.Psi4 + 2e6  # past the default ceiling
    with pytest.raises(evolve.BlowupError) as err:
        evolve.step_cone(cone, 1.0, params)
    assert hasattr(err.value, "u") and hasattr(err.value, "v")


def test_horizon_breach_guard():
    params = RunParams(a=40, n_u=20, n_v=20)
    cone = chardata.complete_outgoing_cone(params)
    with pytest.raises(evolve.HorizonBreachError):
        # a giant step drives r through zero on the predictor
        evolve.step_cone(cone, 1e4, params)


def test_run_is_deterministic(small_pulse_solution):
    again = evolve.run(small_pulse_solution.params)
    assert evolve.solutions_equal(small_pulse_solution, again)


def test_run_covers_the_rectangle(small_pulse_solution):
    sol = small_pulse_solution
    params = sol.params
    assert sol.cones[0].u == params.u_inf
    assert sol.cones[-1].u == params.u_end
    assert len(sol.cones) == params.n_u + 1
    assert all(c.is_finite() for c in sol.cones)
    assert len(sol.residual_history) == len(sol.cones)
    assert set(sol.diagnostics) >= {"u", "Q_end", "m_end", "min_exp_out",
                                    "min_exp_in"}


def test_incoming_boundary_is_pinned_exactly(small_pulse_solution):
    for cone in small_pulse_solution.cones:
        s = core.minkowski_state(cone.u, 0.0)
        assert cone.r[0] == s.r
        assert cone.trchi[0] == s.trchi
        assert cone.trchib[0] == s.trchib
        assert cone.psi[0] == 0.0


def test_unmet_bounds_warn_not_fail():
    params = RunParams(a=40, n_u=20, n_v=20).with_pulse(
        PulseShape(amp=0.01, phase_rate=-1.0))
    sol = evolve.run(params)
    assert "bounds-unmet" in sol.meta["warnings"]


def test_monotone_trapping_drive_where_scalar_vanishes(small_pulse_solution):
    # ahead of the pulse (v below the support) the outgoing expansion can
    # only decrease along v, up to the scheme's quadratic truncation error
    sol = small_pulse_solution
    v = sol.cones[0].v
    dv = float(v[1] - v[0])
    v0 = sol.params.pulse.support[0]
    ahead = v < v0 - 1e-9
    for cone in sol.cones:
        exp_out = cone.trchi / cone.Omega
        diffs = np.diff(exp_out[ahead])
        assert np.all(diffs <= 10.0 * dv ** 2)


class TestCheckpoint:
    def test_round_trip_bit_exact(self, tmp_path, small_pulse_solution):
        path = tmp_path / "sol.npz"
        evolve.checkpoint(small_pulse_solution, path)
        back = evolve.restore(path)
        assert evolve.solutions_equal(small_pulse_solution, back)
        assert back.params == small_pulse_solution.params

    def test_truncated_file_is_rejected_whole(self, tmp_path,
                                              small_pulse_solution):
        path = tmp_path / "sol.npz"
        evolve.checkpoint(small_pulse_solution, path)
        blob = path.read_bytes()
        path.write_bytes(blob[: len(blob) // 3])
        with pytest.raises(evolve.CheckpointError, match="truncated|damaged"):
            evolve.restore(path)

    def test_version_bump_is_rejected(self, tmp_path, small_pulse_solution):
        path = tmp_path / "sol.npz"
        evolve.checkpoint(small_pulse_solution, path)
        with np.load(path) as data:
            payload = {k: data[k] for k in data.files}
        payload["schema_version"] = np.array(99, dtype=np.int64)
        with open(path, "wb") as fh:
            np.savez(fh, **payload)
        with pytest.raises(evolve.CheckpointError, match="unsupported.*99"):
            evolve.restore(path)

    def test_not_a_checkpoint(self, tmp_path):
        path = tmp_path / "junk.npz"
        np.savez(path, foo=np.arange(3))
        with pytest.raises(evolve.CheckpointError):
            evolve.restore(path)
