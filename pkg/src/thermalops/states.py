"""Hamiltonians, density matrices, Gibbs and coherent Gibbs states.

Units: k_B = 1 and hbar = 1. Energies are arbitrary; ``beta`` is inverse energy.
"""

from __future__ import annotations

import math
from functools import cached_property

import numpy as np

from .errors import DegenerateSpectrum, DimensionMismatch, NotDensityMatrix
from .linalg import (
    DEGENERACY_TOL,
    ZERO_EIGENVALUE_TOL,
    HermitianOperator,
    SpectralDecomposition,
    as_matrix,
    group_degenerate,
    tensor_product,
)

TRACE_ATOL = 1e-10


class Hamiltonian(HermitianOperator):
    @classmethod
    def from_energies(cls, energies, degeneracy_tol: float = DEGENERACY_TOL) -> "Hamiltonian":
        """Diagonal Hamiltonian in the computational basis, with its eigenbasis known exactly."""
        e = np.asarray(energies, dtype=np.float64)
        if e.ndim != 1 or len(e) == 0 or not np.all(np.isfinite(e)):
            raise ValueError("energies must be a non-empty finite vector")
        order = np.argsort(e, kind="stable")
        vecs = np.zeros((len(e), len(e)), dtype=np.complex128)
        vecs[order, np.arange(len(e))] = 1.0
        spec = SpectralDecomposition(
            eigenvalues=e[order].copy(),
            eigenvectors=vecs,
            blocks=group_degenerate(e[order], degeneracy_tol),
            degeneracy_tol=degeneracy_tol,
        )
        return cls(np.diag(e).astype(np.complex128), spectrum=spec, degeneracy_tol=degeneracy_tol)

    def energy(self, rho) -> float:
        return float(np.real(np.trace(self.matrix @ as_matrix(rho))))


class DensityMatrix(HermitianOperator):
    """Unit-trace positive semidefinite operator.

    Eigenvalues down to ``-ZERO_EIGENVALUE_TOL`` are accepted as rounding noise.
    """

    def __init__(self, matrix, **kwargs):
        super().__init__(matrix, **kwargs)
        tr = np.trace(self.matrix)
        if abs(tr - 1.0) > TRACE_ATOL:
            raise NotDensityMatrix(f"trace {tr.real:.12g} differs from 1")
        lo = self.spectrum.eigenvalues[0]
        if lo < -ZERO_EIGENVALUE_TOL:
            raise NotDensityMatrix(f"negative eigenvalue {lo:.3e}")

    @classmethod
    def from_vector(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=np.complex128).ravel()
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > TRACE_ATOL:
            raise NotDensityMatrix(f"state vector norm {norm:.12g} differs from 1")
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def diagonal(cls, probabilities) -> "DensityMatrix":
        return cls(np.diag(np.asarray(probabilities, dtype=np.float64)).astype(np.complex128))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    @classmethod
    def random_mixed(cls, dim: int, seed: int) -> "DensityMatrix":
        """Full-rank random state from a square complex Ginibre matrix."""
        rng = np.random.default_rng(seed_to_uint64(seed))
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        m = g @ g.conj().T
        return cls(m / np.trace(m).real)

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def seed_to_uint64(seed: int) -> int:
    return int(seed) & (2**64 - 1)


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not math.isfinite(beta) or beta < 0:
        raise ValueError(f"beta must be finite and >= 0, got {beta}")
    return beta


def _boltzmann(h: Hamiltonian, beta: float) -> tuple[np.ndarray, float]:
    """Normalized Boltzmann weights over the represented eigenbasis, and ln Z."""
    e = h.spectrum.eigenvalues
    shifted = -beta * (e - e[0])
    w = np.exp(shifted)
    s = w.sum()
    return w / s, float(-beta * e[0] + math.log(s))


def log_partition(h: Hamiltonian, beta: float) -> float:
    return _boltzmann(h, _check_beta(beta))[1]


def boltzmann_weights(h: Hamiltonian, beta: float) -> np.ndarray:
    """Gibbs probability of each eigenvector of ``h``, in ascending-energy order."""
    return _boltzmann(h, _check_beta(beta))[0]


def gibbs_state(h: Hamiltonian, beta: float) -> DensityMatrix:
    """``exp(-beta H) / Z`` built on the eigenbasis of ``h`` so it commutes with ``h`` to rounding."""
    beta = _check_beta(beta)
    p, _ = _boltzmann(h, beta)
    v = h.spectrum.eigenvectors
    return DensityMatrix((v * p) @ v.conj().T)


def coherent_gibbs_state(h: Hamiltonian, beta: float) -> DensityMatrix:
    """Pure state with amplitudes ``sqrt(exp(-beta E_i) / Z)`` on each energy eigenvector."""
    beta = _check_beta(beta)
    if h.spectrum.is_degenerate:
        raise DegenerateSpectrum("coherent Gibbs state needs a nondegenerate Hamiltonian")
    p, _ = _boltzmann(h, beta)
    psi = h.spectrum.eigenvectors @ np.sqrt(p)
    return DensityMatrix(np.outer(psi, psi.conj()))


def populations(rho, h: Hamiltonian) -> np.ndarray:
    """Probability ``Tr(P_E rho)`` of each energy eigenspace of ``h``, ascending in energy."""
    m = as_matrix(rho)
    if m.shape[0] != h.dim:
        raise DimensionMismatch(f"state dim {m.shape[0]} != Hamiltonian dim {h.dim}")
    spec = h.spectrum
    diag = np.real(np.einsum("ij,ik,kj->j", spec.eigenvectors.conj(), m, spec.eigenvectors))
    return np.array([diag[a:b].sum() for a, b in spec.blocks])


class BipartiteSetup:
    """System and bath Hamiltonians at a common inverse temperature.

    ``h_total = H_S (x) 1 + 1 (x) H_B`` carries the product eigenbasis
    ``|E_i>|e_k>`` sorted by total energy (stable in system-major order).
    """

    def __init__(self, h_s: Hamiltonian, h_b: Hamiltonian, beta: float):
        self.h_s = h_s
        self.h_b = h_b
        self.beta = _check_beta(beta)

    @classmethod
    def from_energies(cls, energies_s, energies_b, beta: float,
                      degeneracy_tol: float = DEGENERACY_TOL) -> "BipartiteSetup":
        return cls(Hamiltonian.from_energies(energies_s, degeneracy_tol),
                   Hamiltonian.from_energies(energies_b, degeneracy_tol), beta)

    @property
    def ds(self) -> int:
        return self.h_s.dim

    @property
    def db(self) -> int:
        return self.h_b.dim

    @property
    def dims(self) -> tuple[int, int]:
        return self.ds, self.db

    @property
    def degeneracy_tol(self) -> float:
        return self.h_s.degeneracy_tol

    @cached_property
    def h_total(self) -> Hamiltonian:
        ss, sb = self.h_s.spectrum, self.h_b.spectrum
        energies = np.add.outer(ss.eigenvalues, sb.eigenvalues).ravel()
        vecs = np.kron(ss.eigenvectors, sb.eigenvectors)
        order = np.argsort(energies, kind="stable")
        spec = SpectralDecomposition(
            eigenvalues=energies[order].copy(),
            eigenvectors=np.ascontiguousarray(vecs[:, order]),
            blocks=group_degenerate(energies[order], self.degeneracy_tol),
            degeneracy_tol=self.degeneracy_tol,
        )
        ids, idb = np.eye(self.ds), np.eye(self.db)
        m = tensor_product(self.h_s.matrix, idb) + tensor_product(ids, self.h_b.matrix)
        return Hamiltonian(m, spectrum=spec, degeneracy_tol=self.degeneracy_tol)

    @cached_property
    def gamma_s(self) -> DensityMatrix:
        return gibbs_state(self.h_s, self.beta)

    @cached_property
    def gamma_b(self) -> DensityMatrix:
        return gibbs_state(self.h_b, self.beta)

    @property
    def temperature(self) -> float:
        return math.inf if self.beta == 0 else 1.0 / self.beta

    def __repr__(self):
        return f"BipartiteSetup(ds={self.ds}, db={self.db}, beta={self.beta})"
