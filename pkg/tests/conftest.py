import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from darboux_nvne.darboux import DarbouxSolution
from darboux_nvne.seeds import build_equispaced_seed, build_hydrogen_seed

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def ho_seed():
    return build_equispaced_seed(1.0, 0.0, 0.3)


@pytest.fixture(scope="session")
def ha_seed():
    return build_hydrogen_seed(1, 1.0, 0.1)


@pytest.fixture(scope="session")
def ho_sol(ho_seed):
    return DarbouxSolution.from_seed(ho_seed)


@pytest.fixture(scope="session")
def ha_sol(ha_seed):
    return DarbouxSolution.from_seed(ha_seed)


def random_density(rng, n=3):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    R = A @ A.conj().T
    return R / np.trace(R).real


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
