import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from thermalops import BipartiteSetup, DensityMatrix, apply_to, random_energy_preserving_unitary

# Spectra with integer levels so total-energy degeneracies are exact; the 2x4
# bath repeats the qubit spectrum to give a degenerate bath Hamiltonian.
SPECTRA = {
    (2, 2): ([0.0, 1.0], [0.0, 1.0]),
    (2, 3): ([0.0, 1.0], [0.0, 1.0, 2.0]),
    (3, 3): ([0.0, 1.0, 2.0], [0.0, 1.0, 2.0]),
    (2, 4): ([0.0, 1.0], [0.0, 1.0, 0.0, 1.0]),
}
DIMS = tuple(SPECTRA)

ACCEPTANCE_LINES: list[str] = []


def make_setup(dims, beta=1.0, scale=1.0):
    es, eb = SPECTRA[dims]
    return BipartiteSetup.from_energies([scale * e for e in es], [scale * e for e in eb], beta)


def random_scenarios(n, seed0=0):
    """``n`` seeded (setup, op, rho_s, outcome) tuples cycling through DIMS."""
    out = []
    for k in range(n):
        rng = np.random.default_rng(10_000 + seed0 + k)
        dims = DIMS[k % len(DIMS)]
        setup = make_setup(dims, beta=float(rng.uniform(0.2, 3.0)), scale=float(rng.uniform(0.5, 2.0)))
        op = random_energy_preserving_unitary(setup, seed0 + k)
        rho = DensityMatrix.random_mixed(setup.ds, 7919 * (seed0 + k) + 1)
        out.append((setup, op, rho, apply_to(op, rho)))
    return out


@pytest.fixture(scope="session")
def scenarios200():
    return random_scenarios(200)


@pytest.fixture
def qubits():
    return BipartiteSetup.from_energies([0.0, 1.0], [0.0, 1.0], 1.0)


@pytest.fixture
def plus():
    return DensityMatrix.from_vector([1 / math.sqrt(2), 1 / math.sqrt(2)])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
