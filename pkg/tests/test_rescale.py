import numpy as np
import pytest
from hypothesis import given, strategies as st

from dnullsim import core, experiments, rescale
from dnullsim.core import PulseShape, RunParams


def test_scale_map_coupling_relation():
    m = rescale.ScaleMap(delta=0.5, coupling=0.01)
    assert m.coupling_prime * m.delta == m.coupling


def test_identity_map():
    s = core.minkowski_state(-12.0, 0.7)
    assert rescale.rescale_point(s, 1.0) == s


def test_flat_space_is_a_scale_family():
    s = core.minkowski_state(-12.0, 0.7)
    sp = rescale.rescale_point(s, 0.5)
    assert sp.u == -6.0 and sp.v == 0.35
    assert sp.r == sp.v - sp.u
    assert sp.trchi == pytest.approx(2.0 / sp.r)
    assert sp.trchib == pytest.approx(-2.0 / sp.r)


def test_fixture_field_weights():
    s = core.PointState(u=-20.0, v=0.5, r=20.3, lnOmega=0.02, trchi=0.11,
                        trchib=-0.093, omega=0.004, omegab=-0.006, rhoF=0.03,
                        Ub=-0.01, psi=0.05 + 0.02j, Psi4=0.04 - 0.01j,
                        Psi3=-0.002 + 0.003j)
    d = 0.25
    sp = rescale.rescale_point(s, d)
    assert sp.r == s.r * d
    assert sp.lnOmega == s.lnOmega
    assert sp.psi == s.psi
    assert sp.Ub == s.Ub
    for name in ("trchi", "trchib", "omega", "omegab", "rhoF", "Psi4", "Psi3"):
        assert getattr(sp, name) == getattr(s, name) / d, name


@given(delta=st.sampled_from([0.25, 0.5, 2.0, 4.0]))
def test_rescale_round_trip(delta):
    s = core.minkowski_state(-9.0, 0.25)
    back = rescale.rescale_point(rescale.rescale_point(s, delta), 1.0 / delta)
    for name in ("u", "v", "r", "trchi", "trchib", "rhoF"):
        assert getattr(back, name) == pytest.approx(getattr(s, name), rel=1e-15)


def test_rejects_nonpositive_delta():
    s = core.minkowski_state(-9.0, 0.25)
    with pytest.raises(ValueError):
        rescale.rescale_point(s, -1.0)


def test_non_dyadic_delta_is_a_grid_mismatch():
    with pytest.raises(ValueError, match="grid-mismatch"):
        rescale.covariance_report(RunParams(n_u=4, n_v=4), 0.3)


def test_covariance_flat_space():
    params = RunParams(a=40, n_u=24, n_v=24).with_pulse(PulseShape(amp=0.0))
    report = rescale.covariance_report(params, 0.5, measure_truncation=False)
    assert report["max_discrepancy"] <= 1e-12


def test_covariance_identity_at_delta_one(small_pulse_solution):
    report = rescale.covariance_report(small_pulse_solution.params, 1.0,
                                       sol_a=small_pulse_solution,
                                       measure_truncation=False)
    assert report["max_discrepancy"] == 0.0


def test_covariance_pulse_within_scheme_order():
    params = experiments.calibrated_params(40.0, n=64)
    report = rescale.covariance_report(params, 0.5)
    for name, entry in report["fields"].items():
        assert entry["max"] <= 3.0 * max(report["truncation_b"][name], 1e-14), name


def test_branch_b_charge_and_mass_scale(small_pulse_solution):
    # the rescaled run's end-cone charge and mass are delta, delta^2 multiples
    delta = 0.5
    sol_b = rescale._run_branch_b(small_pulse_solution.params, delta)
    cone_a = small_pulse_solution.cones[0]
    cone_b = sol_b.cones[0]
    q_a = cone_a.r[-1] ** 2 * cone_a.rhoF[-1]
    q_b = cone_b.r[-1] ** 2 * cone_b.rhoF[-1]
    assert q_b == pytest.approx(delta * q_a, rel=1e-12)
    m_a = 0.5 * cone_a.r[-1] * (1 + 0.25 * cone_a.r[-1] ** 2
                                * cone_a.trchi[-1] * cone_a.trchib[-1])
    m_b = 0.5 * cone_b.r[-1] * (1 + 0.25 * cone_b.r[-1] ** 2
                                * cone_b.trchi[-1] * cone_b.trchib[-1])
    assert m_b == pytest.approx(delta * m_a, rel=1e-12)
