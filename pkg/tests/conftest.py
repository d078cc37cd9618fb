import numpy as np
import pytest

from mossbeat import (
    LatticeSpec,
    bragg_angle_solve,
    build_trigamma,
    photon_wavenumber,
)

_ACCEPTANCE_LINES = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def acceptance_log():
    return record_acceptance


@pytest.fixture(scope="session")
def k40() -> float:
    return photon_wavenumber(40.0e3)


@pytest.fixture(scope="session")
def lattice111() -> LatticeSpec:
    return LatticeSpec(a=3.8034e-10)


@pytest.fixture(scope="session")
def bragg_geom(k40, lattice111):
    candidates = bragg_angle_solve(k40, lattice111)
    assert candidates, "no Bragg-matched cone angle found"
    return build_trigamma(k40, candidates[0].theta)


@pytest.fixture(scope="session")
def open_geom(k40):
    # an angle chosen away from any lattice match
    return build_trigamma(k40, np.radians(5.0))
