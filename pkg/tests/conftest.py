import math

import numpy as np
import pytest

from weakdyn.freeparticle import FreeParticleConfig, build_scene
from weakdyn.hilbert import SpectralObservable, normalize

ACCEPTANCE_LINES: list[str] = []

R2 = 1 / math.sqrt(2)


@pytest.fixture
def pauli_z():
    return SpectralObservable.diagonal([1.0, -1.0])


@pytest.fixture
def qubit_pair():
    """i = (|0> + |1>)/sqrt2, f = (|0> + i|1>)/sqrt2."""
    return normalize([1, 1]), normalize([1, 1j])


@pytest.fixture(scope="session")
def default_scene():
    return build_scene(FreeParticleConfig())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
