import math

import pytest

from tubeorbit import ModelParams, OptimConfig, find_orbit

ACCEPTANCE_LINES = []

ORBIT_CASES = [(2 * math.pi, 1), (2 * math.pi, 2), (5.0, 1), (5.0, 3)]


@pytest.fixture
def unit():
    return ModelParams()


@pytest.fixture(scope="session")
def orbits():
    """Converged default-config orbits for the four reference (omega, k) pairs."""
    return {case: find_orbit(ModelParams(), *case, OptimConfig()) for case in ORBIT_CASES}


@pytest.fixture(scope="session")
def orbit_2pi_1(orbits):
    return orbits[(2 * math.pi, 1)]


def record_acceptance(name, ok, detail=""):
    line = f"{name}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
