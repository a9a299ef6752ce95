"""Entropic functionals and entropy-production bookkeeping under the
energy-based heat ``-dE_B`` and the entropy-based heat ``-dS_B / beta``.

All entropies are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BetaZero, DimensionMismatch, SupportViolation
from .linalg import ZERO_EIGENVALUE_TOL, Subsystem, as_matrix, eigh, partial_trace, tensor_product, xlogx
from .states import DensityMatrix, Hamiltonian, gibbs_state, log_partition
from .thermal_ops import ProcessOutcome

NONNEG_ATOL = 1e-9
SUPPORT_WEIGHT_TOL = 1e-10


def _spectrum(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        lam = rho.spectrum.eigenvalues
    else:
        lam = eigh(rho).eigenvalues
    return np.where(np.abs(lam) <= ZERO_EIGENVALUE_TOL, 0.0, lam)


def von_neumann_entropy(rho) -> float:
    return float(-np.sum(xlogx(_spectrum(rho))))


def relative_entropy(rho, sigma) -> float:
    """``Tr(rho ln rho - rho ln sigma)``, or ``math.inf`` when supp(rho) is not inside supp(sigma)."""
    r, s = as_matrix(rho), as_matrix(sigma)
    if r.shape != s.shape:
        raise DimensionMismatch(f"relative entropy of dims {r.shape[0]} and {s.shape[0]}")
    spec = sigma.spectrum if isinstance(sigma, DensityMatrix) else eigh(s)
    w = spec.eigenvectors
    weights = np.real(np.einsum("ij,ik,kj->j", w.conj(), r, w))
    lam = spec.eigenvalues
    null = lam < ZERO_EIGENVALUE_TOL
    if np.any(weights[null] > SUPPORT_WEIGHT_TOL):
        return math.inf
    cross = float(np.sum(weights[~null] * np.log(lam[~null])))
    return -von_neumann_entropy(rho) - cross


def mutual_information(rho_sb, dims: tuple[int, int]) -> float:
    """``S(rho_S) + S(rho_B) - S(rho_SB)``."""
    m = as_matrix(rho_sb)
    if m.shape[0] != dims[0] * dims[1]:
        raise DimensionMismatch(f"state of dim {m.shape[0]} is not {dims[0]}x{dims[1]}")
    rho_s = partial_trace(m, dims, Subsystem.SYSTEM)
    rho_b = partial_trace(m, dims, Subsystem.BATH)
    return von_neumann_entropy(rho_s) + von_neumann_entropy(rho_b) - von_neumann_entropy(rho_sb)


def mutual_information_relative(rho_sb, dims: tuple[int, int]) -> float:
    """Mutual information as ``S(rho_SB || rho_S (x) rho_B)``."""
    m = as_matrix(rho_sb)
    product = tensor_product(partial_trace(m, dims, Subsystem.SYSTEM),
                             partial_trace(m, dims, Subsystem.BATH))
    return relative_entropy(rho_sb, product)


def _temperature(beta: float) -> float:
    if beta == 0:
        raise BetaZero("free energy is undefined at infinite temperature")
    return 1.0 / beta


def energy(rho, h: Hamiltonian) -> float:
    m = as_matrix(rho)
    if m.shape[0] != h.dim:
        raise DimensionMismatch(f"state dim {m.shape[0]} != Hamiltonian dim {h.dim}")
    return float(np.real(np.trace(h.matrix @ m)))


def free_energy(rho, h: Hamiltonian, beta: float) -> float:
    """Non-equilibrium free energy ``Tr(H rho) - T S(rho)``."""
    t = _temperature(beta)
    return energy(rho, h) - t * von_neumann_entropy(rho)


def equilibrium_free_energy(h: Hamiltonian, beta: float) -> float:
    return -_temperature(beta) * log_partition(h, beta)


def free_energy_relative(rho, h: Hamiltonian, beta: float) -> float:
    """Free energy as ``F_eq + T S(rho || gamma)``."""
    t = _temperature(beta)
    return equilibrium_free_energy(h, beta) + t * relative_entropy(rho, gibbs_state(h, beta))


def heat_standard(outcome: ProcessOutcome) -> float:
    """Heat as minus the change in the bath's mean energy."""
    h_b = outcome.setup.h_b
    return -(energy(outcome.rho_b_prime, h_b) - energy(outcome.rho_b, h_b))


def heat_new(outcome: ProcessOutcome) -> float:
    """Heat as minus the bath's entropy change over beta."""
    t = _temperature(outcome.setup.beta)
    return -t * (von_neumann_entropy(outcome.rho_b_prime) - von_neumann_entropy(outcome.rho_b))


def _finite(x: float, what: str) -> float:
    if math.isinf(x):
        raise SupportViolation(f"{what} is infinite")
    return x


@dataclass(frozen=True)
class StandardProduction:
    value: float                      # dS_S - beta * heat_standard
    free_energy_form: float           # -beta dF_S
    relative_entropy_form: float      # S(rho_S||g_S) - S(rho'_S||g_S)
    bath_correlation_form: float      # S(rho'_B||g_B) + I(rho'_SB)

    @property
    def max_deviation(self) -> float:
        forms = (self.free_energy_form, self.relative_entropy_form, self.bath_correlation_form)
        return max(abs(f - self.value) for f in forms)

    @property
    def nonnegative(self) -> bool:
        return self.value >= -NONNEG_ATOL


@dataclass(frozen=True)
class NewProduction:
    value: float                      # dS_S - beta * heat_new
    free_energy_form: float           # -beta (dF_S + dF_B)
    relative_entropy_form: float      # S(rho_S||g_S) - S(rho'_S||g_S) - S(rho'_B||g_B)
    mutual_information_form: float    # I(rho'_SB)
    standard_gap_form: float          # standard production - S(rho'_B||g_B)

    @property
    def max_deviation(self) -> float:
        forms = (self.free_energy_form, self.relative_entropy_form,
                 self.mutual_information_form, self.standard_gap_form)
        return max(abs(f - self.value) for f in forms)

    @property
    def nonnegative(self) -> bool:
        return self.value >= -NONNEG_ATOL


def _entropy_change(before, after) -> float:
    return von_neumann_entropy(after) - von_neumann_entropy(before)


def entropy_production_standard(outcome: ProcessOutcome) -> StandardProduction:
    s = outcome.setup
    beta = s.beta
    ds_s = _entropy_change(outcome.rho_s, outcome.rho_s_prime)
    # beta * dF_S written as beta dE - dS so beta = 0 stays finite
    beta_df_s = beta * (energy(outcome.rho_s_prime, s.h_s) - energy(outcome.rho_s, s.h_s)) - ds_s
    rel_before = _finite(relative_entropy(outcome.rho_s, s.gamma_s), "S(rho_S||gamma_S)")
    rel_after = _finite(relative_entropy(outcome.rho_s_prime, s.gamma_s), "S(rho'_S||gamma_S)")
    rel_bath = _finite(relative_entropy(outcome.rho_b_prime, s.gamma_b), "S(rho'_B||gamma_B)")
    mi = mutual_information(outcome.rho_sb_prime, s.dims)
    heat_term = -beta * (energy(outcome.rho_b_prime, s.h_b) - energy(outcome.rho_b, s.h_b))
    return StandardProduction(
        value=ds_s - heat_term,
        free_energy_form=-beta_df_s,
        relative_entropy_form=rel_before - rel_after,
        bath_correlation_form=rel_bath + mi,
    )


def entropy_production_new(outcome: ProcessOutcome) -> NewProduction:
    s = outcome.setup
    beta = s.beta
    ds_s = _entropy_change(outcome.rho_s, outcome.rho_s_prime)
    ds_b = _entropy_change(outcome.rho_b, outcome.rho_b_prime)
    de_s = energy(outcome.rho_s_prime, s.h_s) - energy(outcome.rho_s, s.h_s)
    de_b = energy(outcome.rho_b_prime, s.h_b) - energy(outcome.rho_b, s.h_b)
    rel_before = _finite(relative_entropy(outcome.rho_s, s.gamma_s), "S(rho_S||gamma_S)")
    rel_after = _finite(relative_entropy(outcome.rho_s_prime, s.gamma_s), "S(rho'_S||gamma_S)")
    rel_bath = _finite(relative_entropy(outcome.rho_b_prime, s.gamma_b), "S(rho'_B||gamma_B)")
    standard = entropy_production_standard(outcome).value
    return NewProduction(
        value=ds_s + ds_b,
        free_energy_form=-((beta * de_s - ds_s) + (beta * de_b - ds_b)),
        relative_entropy_form=rel_before - rel_after - rel_bath,
        mutual_information_form=mutual_information(outcome.rho_sb_prime, s.dims),
        standard_gap_form=standard - rel_bath,
    )


@dataclass(frozen=True)
class FreeEnergyBounds:
    d_f_s: float
    bound_standard: float   # always 0
    bound_new: float        # -dF_B
    tightness_gap: float    # bound_new - bound_standard, <= 0

    @property
    def standard_violation(self) -> float:
        return max(0.0, self.d_f_s - self.bound_standard)

    @property
    def new_violation(self) -> float:
        return max(0.0, self.d_f_s - self.bound_new)

    @property
    def holds(self) -> bool:
        return (self.standard_violation <= NONNEG_ATOL and self.new_violation <= NONNEG_ATOL
                and self.tightness_gap <= NONNEG_ATOL)


def free_energy_bounds(outcome: ProcessOutcome) -> FreeEnergyBounds:
    """``dF_S <= -dF_B <= 0``: the entropy-based heat tightens the usual free-energy bound."""
    s = outcome.setup
    d_f_s = free_energy(outcome.rho_s_prime, s.h_s, s.beta) - free_energy(outcome.rho_s, s.h_s, s.beta)
    d_f_b = free_energy(outcome.rho_b_prime, s.h_b, s.beta) - free_energy(outcome.rho_b, s.h_b, s.beta)
    return FreeEnergyBounds(d_f_s=d_f_s, bound_standard=0.0, bound_new=-d_f_b, tightness_gap=-d_f_b)
