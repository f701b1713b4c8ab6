import pytest

from dnullsim import evolve, experiments


@pytest.fixture(scope="session")
def calibrated_params_40():
    return experiments.calibrated_params(40.0, coupling=0.01, n=200)


@pytest.fixture(scope="session")
def pulse_solution_40(calibrated_params_40):
    """Reference calibrated run at a=40, 200x200; shared by several suites."""
    return evolve.run(calibrated_params_40)


@pytest.fixture(scope="session")
def small_pulse_solution():
    """Cheap calibrated run for structural tests."""
    return evolve.run(experiments.calibrated_params(40.0, n=40))
