"""Dense Hermitian linear algebra: eigendecomposition, matrix functions,
tensor products and partial traces.

Composite operators are indexed system-major: the basis state
``|i>_S |k>_B`` sits at row ``i * dB + k``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    DimensionOverflow,
    DomainError,
    NotHermitian,
)

HERMITIAN_ATOL = 1e-10
DEGENERACY_TOL = 1e-9
ZERO_EIGENVALUE_TOL = 1e-12
MAX_DIM = 4096


class Subsystem(str, enum.Enum):
    SYSTEM = "system"
    BATH = "bath"


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a square, finite complex128 array."""
    if isinstance(m, HermitianOperator):
        return m.matrix
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def hermiticity_error(m) -> float:
    arr = as_matrix(m)
    return float(np.max(np.abs(arr - arr.conj().T)))


def group_degenerate(eigenvalues: np.ndarray, tol: float = DEGENERACY_TOL) -> tuple[tuple[int, int], ...]:
    """Split ascending eigenvalues into ``(start, stop)`` runs by single-linkage chaining."""
    n = len(eigenvalues)
    if n == 0:
        return ()
    blocks = []
    start = 0
    for k in range(1, n):
        if eigenvalues[k] - eigenvalues[k - 1] > tol:
            blocks.append((start, k))
            start = k
    blocks.append((start, n))
    return tuple(blocks)


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    # Largest-modulus component of each column made real positive (first index wins ties).
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        mags = np.abs(col)
        k = int(np.flatnonzero(mags >= mags.max() - 1e-12)[0])
        out[:, j] = col * (abs(col[k]) / col[k])
    return out


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues, unitary eigenvector columns and the degenerate-block partition."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    blocks: tuple[tuple[int, int], ...]
    degeneracy_tol: float = DEGENERACY_TOL

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.eigenvectors.setflags(write=False)

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    @property
    def block_energies(self) -> np.ndarray:
        return np.array([self.eigenvalues[a:b].mean() for a, b in self.blocks])

    @property
    def is_degenerate(self) -> bool:
        return len(self.blocks) < self.dim

    def block_vectors(self, k: int) -> np.ndarray:
        a, b = self.blocks[k]
        return self.eigenvectors[:, a:b]

    def projector(self, k: int) -> np.ndarray:
        v = self.block_vectors(k)
        return v @ v.conj().T

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def apply(self, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        v = self.eigenvectors
        vals = np.asarray(f(self.eigenvalues), dtype=np.float64)
        return (v * vals) @ v.conj().T


def eigh(m, degeneracy_tol: float = DEGENERACY_TOL) -> SpectralDecomposition:
    """Hermitian eigendecomposition with a deterministic eigenvector phase convention."""
    arr = as_matrix(m)
    err = hermiticity_error(arr)
    if err > HERMITIAN_ATOL:
        raise NotHermitian(f"max |m - m^dagger| = {err:.3e} exceeds {HERMITIAN_ATOL:.0e}")
    arr = 0.5 * (arr + arr.conj().T)
    try:
        vals, vecs = np.linalg.eigh(arr)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    vecs = _fix_phases(vecs)
    return SpectralDecomposition(
        eigenvalues=vals,
        eigenvectors=vecs,
        blocks=group_degenerate(vals, degeneracy_tol),
        degeneracy_tol=degeneracy_tol,
    )


class HermitianOperator:
    """Immutable Hermitian matrix with a lazily computed spectral decomposition.

    Input within ``HERMITIAN_ATOL`` of Hermitian is symmetrized on entry.
    A precomputed ``spectrum`` may be supplied when the eigenbasis is known
    by construction (e.g. product eigenbases of composite Hamiltonians).
    """

    def __init__(self, matrix, *, spectrum: SpectralDecomposition | None = None,
                 degeneracy_tol: float = DEGENERACY_TOL):
        arr = as_matrix(matrix)
        err = hermiticity_error(arr)
        if err > HERMITIAN_ATOL:
            raise NotHermitian(f"max |m - m^dagger| = {err:.3e} exceeds {HERMITIAN_ATOL:.0e}")
        arr = 0.5 * (arr + arr.conj().T)
        arr.setflags(write=False)
        self._matrix = arr
        self.degeneracy_tol = degeneracy_tol
        if spectrum is not None:
            if spectrum.dim != arr.shape[0]:
                raise DimensionMismatch("spectrum dimension does not match operator")
            self.__dict__["spectrum"] = spectrum

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @cached_property
    def spectrum(self) -> SpectralDecomposition:
        return eigh(self._matrix, self.degeneracy_tol)

    def __array__(self, dtype=None, copy=None):
        return self._matrix if dtype is None else self._matrix.astype(dtype)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


def tensor_product(a, b, max_dim: int = MAX_DIM) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    d = a.shape[0] * b.shape[0]
    if d > max_dim:
        raise DimensionOverflow(f"product dimension {d} exceeds maximum {max_dim}")
    return np.kron(a, b)


def partial_trace(m, dims: tuple[int, int], keep: Subsystem | str) -> np.ndarray:
    keep = Subsystem(keep)
    arr = as_matrix(m)
    ds, db = dims
    if arr.shape[0] != ds * db:
        raise DimensionMismatch(f"matrix of dim {arr.shape[0]} is not {ds}x{db}")
    t = arr.reshape(ds, db, ds, db)
    if keep is Subsystem.SYSTEM:
        return np.einsum("ikjk->ij", t)
    return np.einsum("kikj->ij", t)


def matrix_function(m, f: Callable[[np.ndarray], np.ndarray]) -> HermitianOperator:
    """``V f(diag lambda) V^dagger`` for real scalar ``f``.

    Eigenvalues within ``ZERO_EIGENVALUE_TOL`` of zero are evaluated as exact zeros.
    """
    op = m if isinstance(m, HermitianOperator) else HermitianOperator(m)
    spec = op.spectrum
    lam = np.where(np.abs(spec.eigenvalues) <= ZERO_EIGENVALUE_TOL, 0.0, spec.eigenvalues)
    with np.errstate(all="ignore"):
        vals = np.asarray(f(lam))
    if np.iscomplexobj(vals) or not np.all(np.isfinite(vals)):
        bad = lam[~np.isfinite(np.real(vals))] if not np.iscomplexobj(vals) else lam
        raise DomainError(f"function undefined on eigenvalue(s) {bad}")
    v = spec.eigenvectors
    return HermitianOperator((v * vals) @ v.conj().T)


def xlogx(p: np.ndarray) -> np.ndarray:
    """Elementwise ``p ln p`` with ``0 ln 0 = 0``."""
    p = np.asarray(p, dtype=np.float64)
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = p[pos] * np.log(p[pos])
    return out


def commutator_norm(a, b) -> float:
    a, b = as_matrix(a), as_matrix(b)
    return float(np.max(np.abs(a @ b - b @ a)))


def unitarity_error(u) -> float:
    u = as_matrix(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
