import pytest

from nvortex import ConformalDisk, shoot


@pytest.fixture(scope="session")
def disk3():
    return ConformalDisk.flat(3.0)


@pytest.fixture(scope="session")
def radial_r3(disk3):
    """Converged centered-vortex profile at the default step count (shared)."""
    profile = shoot(disk3, n=1)
    assert profile.converged
    return profile
