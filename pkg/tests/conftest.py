import numpy as np
import pytest

from hopfcap import CapDomain, SpherePoint, build_gauss_rule


@pytest.fixture(scope="session")
def north():
    return SpherePoint(np.array([1.0, 0.0, 0.0, 0.0]))


@pytest.fixture(scope="session")
def unit_cap(north):
    return CapDomain(north, 1.0)


@pytest.fixture(scope="session")
def unit_cap_rule(unit_cap):
    # Modest orders keep module tests fast; acceptance uses the defaults.
    return build_gauss_rule(unit_cap, 32, 16, 32)
