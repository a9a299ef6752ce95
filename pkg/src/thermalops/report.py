"""Full thermodynamic bookkeeping of one process, flattened to scalars."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

from .accounting import (
    energy,
    entropy_production_new,
    entropy_production_standard,
    free_energy,
    heat_new,
    heat_standard,
    mutual_information,
    relative_entropy,
    von_neumann_entropy,
)
from .coherence import DephasingConvention, coherence_report
from .thermal_ops import ProcessOutcome


@dataclass(frozen=True)
class ProcessReport:
    d_e_s: float
    d_e_b: float
    d_s_s: float
    d_s_b: float
    d_f_s: float
    d_f_b: float
    heat_standard: float
    heat_new: float
    sirr_standard: float
    sirr_new: float
    mutual_info: float
    rel_ent_bath_to_gibbs: float
    classical_standard: float
    quantum_standard: float
    classical_new: float
    quantum_new: float
    c_s: float
    c_s_prime: float
    c_b_prime: float
    c_sb_prime: float
    correlated_coherence: float

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def process_report(outcome: ProcessOutcome,
                   conv: DephasingConvention = DephasingConvention.EIGENSPACE) -> ProcessReport:
    """Evaluate every scalar of ``outcome``; needs ``beta > 0``."""
    s = outcome.setup
    beta = s.beta

    def delta_f(h, before, after):
        return free_energy(after, h, beta) - free_energy(before, h, beta)

    coh = coherence_report(outcome, conv)
    return ProcessReport(
        d_e_s=energy(outcome.rho_s_prime, s.h_s) - energy(outcome.rho_s, s.h_s),
        d_e_b=energy(outcome.rho_b_prime, s.h_b) - energy(outcome.rho_b, s.h_b),
        d_s_s=von_neumann_entropy(outcome.rho_s_prime) - von_neumann_entropy(outcome.rho_s),
        d_s_b=von_neumann_entropy(outcome.rho_b_prime) - von_neumann_entropy(outcome.rho_b),
        d_f_s=delta_f(s.h_s, outcome.rho_s, outcome.rho_s_prime),
        d_f_b=delta_f(s.h_b, outcome.rho_b, outcome.rho_b_prime),
        heat_standard=heat_standard(outcome),
        heat_new=heat_new(outcome),
        sirr_standard=entropy_production_standard(outcome).value,
        sirr_new=entropy_production_new(outcome).value,
        mutual_info=mutual_information(outcome.rho_sb_prime, s.dims),
        rel_ent_bath_to_gibbs=relative_entropy(outcome.rho_b_prime, s.gamma_b),
        classical_standard=coh.classical_standard,
        quantum_standard=coh.quantum_standard,
        classical_new=coh.classical_new,
        quantum_new=coh.quantum_new,
        c_s=coh.c_s,
        c_s_prime=coh.c_s_prime,
        c_b_prime=coh.c_b_prime,
        c_sb_prime=coh.c_sb_prime,
        correlated_coherence=coh.correlated_coherence,
    )
