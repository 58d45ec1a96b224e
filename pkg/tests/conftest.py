import pytest

from borelinv import MomentTable
from borelinv.kernel import KernelParams


@pytest.fixture(scope="session")
def params15():
    return KernelParams(1.0, 1.5)


@pytest.fixture(scope="session")
def table15(params15):
    """Moments of the tau=1, sigma=1.5 kernel for p <= 60, shared across modules."""
    return MomentTable.build(params15, 60)
