import pytest

from core.afm import AFMSolver
from core.config import get_settings
from core.model import NonRelativistic, SystemSpec


@pytest.fixture(scope="session")
def settings():
    return get_settings()


@pytest.fixture(scope="session")
def solver(settings):
    return AFMSolver(settings)


@pytest.fixture
def nr_pair():
    """Fábrica de pares NR de massas iguais."""

    def build(potential, m=1.0):
        return SystemSpec(N=2, kinematics=NonRelativistic(m=m), two_body=potential)

    return build
