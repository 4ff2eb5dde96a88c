import numpy as np
import pytest

from hallsim.params import PhysicalParams


@pytest.fixture
def natural():
    return PhysicalParams()


def slope(hs, errs):
    """Least-squares log-log slope of errs against hs."""
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
