"""Energy-preserving unitaries and the channels they induce on a system
coupled to a Gibbs bath."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotEnergyPreserving, NotResonant, NotUnitary
from .linalg import Subsystem, as_matrix, commutator_norm, partial_trace, tensor_product, unitarity_error
from .states import BipartiteSetup, DensityMatrix, Hamiltonian, seed_to_uint64

UNITARY_ATOL = 1e-9
COMMUTATOR_ATOL = 1e-9


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed ``n x n`` unitary: QR of a complex Ginibre matrix with R's diagonal made positive."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_unitary(dim: int, seed: int) -> np.ndarray:
    return haar_unitary(dim, np.random.default_rng(seed_to_uint64(seed)))


class ThermalOperation:
    """A unitary on system+bath validated to be unitary and to commute with ``h_total``."""

    def __init__(self, setup: BipartiteSetup, u):
        u = as_matrix(u)
        d = setup.ds * setup.db
        if u.shape[0] != d:
            raise DimensionMismatch(f"unitary dim {u.shape[0]} != {setup.ds}*{setup.db}")
        self.unitarity_error = unitarity_error(u)
        if self.unitarity_error > UNITARY_ATOL:
            raise NotUnitary(f"|U^dagger U - 1|_max = {self.unitarity_error:.3e}")
        self.commutator_error = commutator_norm(u, setup.h_total.matrix)
        if self.commutator_error > COMMUTATOR_ATOL:
            raise NotEnergyPreserving(f"|[U, H_total]|_max = {self.commutator_error:.3e}")
        u = u.copy()
        u.setflags(write=False)
        self.setup = setup
        self.u = u

    @property
    def blocks(self) -> tuple[tuple[int, int], ...]:
        return self.setup.h_total.spectrum.blocks

    @classmethod
    def identity(cls, setup: BipartiteSetup) -> "ThermalOperation":
        return cls(setup, np.eye(setup.ds * setup.db, dtype=np.complex128))

    def __call__(self, rho_s) -> DensityMatrix:
        return apply_to(self, rho_s).rho_s_prime


@dataclass(frozen=True)
class ProcessOutcome:
    setup: BipartiteSetup
    unitary: np.ndarray
    rho_s: DensityMatrix
    rho_b: DensityMatrix
    rho_sb_prime: DensityMatrix
    rho_s_prime: DensityMatrix
    rho_b_prime: DensityMatrix


def random_energy_preserving_unitary(setup: BipartiteSetup, seed: int) -> ThermalOperation:
    """Independent Haar unitary inside each degenerate eigenspace of ``h_total``.

    Blocks are sampled in ascending-energy order from one generator seeded by ``seed``.
    """
    rng = np.random.default_rng(seed_to_uint64(seed))
    spec = setup.h_total.spectrum
    w = np.zeros((spec.dim, spec.dim), dtype=np.complex128)
    for a, b in spec.blocks:
        w[a:b, a:b] = haar_unitary(b - a, rng)
    v = spec.eigenvectors
    return ThermalOperation(setup, v @ w @ v.conj().T)


def is_resonant(setup: BipartiteSetup) -> bool:
    if setup.ds != setup.db:
        return False
    es, eb = setup.h_s.spectrum.eigenvalues, setup.h_b.spectrum.eigenvalues
    return bool(np.max(np.abs(es - eb)) <= setup.degeneracy_tol)


def partial_swap_unitary(setup: BipartiteSetup, theta: float) -> ThermalOperation:
    """``exp(-i theta SWAP) = cos(theta) 1 - i sin(theta) SWAP`` with SWAP exchanging
    energy-eigenvector labels, ``|E_i, E_j> <-> |E_j, E_i>``.

    ``theta = pi/2`` is a full swap (up to a global phase).
    """
    if not is_resonant(setup):
        raise NotResonant("partial swap needs identical system and bath spectra")
    d = setup.ds
    swap = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            swap[j * d + i, i * d + j] = 1.0
    core = np.cos(theta) * np.eye(d * d) - 1j * np.sin(theta) * swap
    v = np.kron(setup.h_s.spectrum.eigenvectors, setup.h_b.spectrum.eigenvectors)
    return ThermalOperation(setup, v @ core @ v.conj().T)


def _outcome(setup, u, rho_s, rho_b) -> ProcessOutcome:
    rho_sb = u @ tensor_product(rho_s.matrix, rho_b.matrix) @ u.conj().T
    return ProcessOutcome(
        setup=setup,
        unitary=u,
        rho_s=rho_s,
        rho_b=rho_b,
        rho_sb_prime=DensityMatrix(rho_sb),
        rho_s_prime=DensityMatrix(partial_trace(rho_sb, setup.dims, Subsystem.SYSTEM)),
        rho_b_prime=DensityMatrix(partial_trace(rho_sb, setup.dims, Subsystem.BATH)),
    )


def _as_state(rho, dim: int, what: str) -> DensityMatrix:
    rho = rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)
    if rho.dim != dim:
        raise DimensionMismatch(f"{what} has dim {rho.dim}, expected {dim}")
    return rho


def apply_to(op: ThermalOperation, rho_s) -> ProcessOutcome:
    """Couple ``rho_s`` to the bath Gibbs state, evolve with ``op.u``, and take marginals."""
    setup = op.setup
    rho_s = _as_state(rho_s, setup.ds, "system state")
    return _outcome(setup, op.u, rho_s, setup.gamma_b)


def apply_general_unitary(setup: BipartiteSetup, u, rho_s, rho_b) -> ProcessOutcome:
    """Same as :func:`apply_to` for any unitary and any initial bath state."""
    u = as_matrix(u)
    if u.shape[0] != setup.ds * setup.db:
        raise DimensionMismatch(f"unitary dim {u.shape[0]} != {setup.ds}*{setup.db}")
    err = unitarity_error(u)
    if err > UNITARY_ATOL:
        raise NotUnitary(f"|U^dagger U - 1|_max = {err:.3e}")
    rho_s = _as_state(rho_s, setup.ds, "system state")
    rho_b = _as_state(rho_b, setup.db, "bath state")
    return _outcome(setup, u, rho_s, rho_b)


def evolve_free(h: Hamiltonian, rho, t: float) -> np.ndarray:
    """``exp(-i H t) rho exp(i H t)``."""
    spec = h.spectrum
    v = spec.eigenvectors
    phase = (v * np.exp(-1j * spec.eigenvalues * t)) @ v.conj().T
    return phase @ as_matrix(rho) @ phase.conj().T


@dataclass(frozen=True)
class CovarianceCheck:
    passed: bool
    deviation: float


def check_time_translation_covariance(op: ThermalOperation, rho_s, t: float,
                                      tol: float = 1e-9) -> CovarianceCheck:
    """Compare ``E(e^{-iHt} rho e^{iHt})`` with ``e^{-iHt} E(rho) e^{iHt}`` entrywise."""
    h_s = op.setup.h_s
    rho_s = _as_state(rho_s, op.setup.ds, "system state")
    before = apply_to(op, DensityMatrix(evolve_free(h_s, rho_s, t))).rho_s_prime.matrix
    after = evolve_free(h_s, apply_to(op, rho_s).rho_s_prime, t)
    dev = float(np.max(np.abs(before - after)))
    return CovarianceCheck(passed=dev <= tol, deviation=dev)
