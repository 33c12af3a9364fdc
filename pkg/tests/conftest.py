import numpy as np
import pytest

from dkwband.experiments import calibrate_constants


@pytest.fixture(scope="session")
def full_calibration():
    """The repository's reference calibration run (shared by the slow checks)."""
    return calibrate_constants(
        "variance", [10**3, 10**4, 10**5], seed=7, trials_per_cell=10**5
    )


@pytest.fixture()
def rng_np():
    return np.random.default_rng(20240817)
