import pytest

from wormcert.certify import RunSettings, select_parameters
from wormcert.geometry import RotationParams
from wormcert.profiles import build_profile, build_smoothed, make_smoothed

# An eta for which the factor-100 search succeeds (see test_profiles for the range).
WORKING_ETA = 5e-5


@pytest.fixture(scope="session")
def profile():
    return build_profile()


@pytest.fixture(scope="session")
def smoothed(profile):
    return build_smoothed(profile, WORKING_ETA)


@pytest.fixture(scope="session")
def coarse_smoothed(profile):
    """S_eta at eta = 0.01 with gamma = alpha/2, built without the curvature check."""
    return make_smoothed(profile, 0.01, 0.5 * profile.alpha)


@pytest.fixture(scope="session")
def small_rp(smoothed):
    return RotationParams(0.1, smoothed.eta, 5e-6, 1e-10)


@pytest.fixture(scope="session")
def selection(profile):
    return select_parameters(profile, RunSettings())

