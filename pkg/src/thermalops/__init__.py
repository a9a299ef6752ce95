"""Thermal operations on finite-dimensional quantum systems and the
entropy-production bookkeeping under energy-based and entropy-based heat."""

from .accounting import (
    entropy_production_new,
    entropy_production_standard,
    free_energy,
    free_energy_bounds,
    heat_new,
    heat_standard,
    mutual_information,
    relative_entropy,
    von_neumann_entropy,
)
from .coherence import (
    DephasingConvention,
    check_coherence_preservation,
    correlated_coherence,
    dephase,
    entropy_production_split_new,
    entropy_production_split_standard,
    free_energy_decomposition,
    relative_entropy_of_coherence,
)
from .linalg import HermitianOperator, SpectralDecomposition, Subsystem, eigh, matrix_function, partial_trace, tensor_product
from .report import ProcessReport, process_report
from .states import BipartiteSetup, DensityMatrix, Hamiltonian, coherent_gibbs_state, gibbs_state, populations
from .thermal_ops import (
    ProcessOutcome,
    ThermalOperation,
    apply_general_unitary,
    apply_to,
    check_time_translation_covariance,
    partial_swap_unitary,
    random_energy_preserving_unitary,
)

__version__ = "0.1.0"
