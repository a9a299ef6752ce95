"""End-to-end scenario evaluation with every identity check recorded."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..accounting import (
    entropy_production_new,
    entropy_production_standard,
    free_energy,
    free_energy_bounds,
    mutual_information_relative,
    relative_entropy,
    von_neumann_entropy,
)
from ..coherence import (
    DephasingConvention,
    check_coherence_preservation,
    entropy_production_split_new,
    entropy_production_split_standard,
    free_energy_decomposition,
    relative_entropy_of_coherence,
)
from ..errors import ConfigError, ConventionMismatch, ThermalOpsError, UnknownParameter
from ..linalg import commutator_norm, unitarity_error
from ..report import ProcessReport, process_report
from ..states import BipartiteSetup, DensityMatrix, coherent_gibbs_state, gibbs_state
from ..thermal_ops import (
    ProcessOutcome,
    ThermalOperation,
    apply_general_unitary,
    apply_to,
    check_time_translation_covariance,
    partial_swap_unitary,
    random_energy_preserving_unitary,
    random_unitary,
)
from .config import ScenarioConfig

# Stable order; appended columns only (bump SCHEMA_VERSION otherwise).
IDENTITIES = (
    "unitarity",
    "energy_preserving",
    "output_trace",
    "total_entropy",
    "energy_conservation",
    "gibbs_fixed_point",
    "covariance",
    "heat_bridge",
    "mi_entropy_sum",
    "mi_relative",
    "bath_free_energy",
    "ep_standard_forms",
    "ep_standard_nonneg",
    "ep_new_forms",
    "ep_new_nonneg",
    "free_energy_bounds",
    "free_energy_decomposition",
    "coherence_preservation",
    "split_standard_sum",
    "split_new_sum",
    "split_new_classical",
    "split_new_quantum_gap",
    "split_new_quantum_cc",
    "theorem_incoherent",
    "theorem_coherent_gibbs",
)

SWEEP_PARAMETERS = ("theta", "beta", "seed", "db")


class ScenarioError(ThermalOpsError):
    """A module error raised while evaluating a scenario, with the scenario attached."""

    def __init__(self, message: str, config: ScenarioConfig):
        super().__init__(message)
        self.config = config


@dataclass(frozen=True)
class Check:
    deviation: float
    passed: bool


@dataclass
class RunRecord:
    config: ScenarioConfig
    report: ProcessReport
    checks: dict[str, Check] = field(default_factory=dict)
    convention_mismatch: bool = False

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    @property
    def failures(self) -> list[str]:
        return [k for k, c in self.checks.items() if not c.passed]


def build_setup(cfg: ScenarioConfig) -> BipartiteSetup:
    return BipartiteSetup.from_energies(cfg.spectrum_s, cfg.spectrum_b, cfg.beta)


def build_input(cfg: ScenarioConfig, setup: BipartiteSetup) -> DensityMatrix:
    kind = cfg.input
    if kind == "gibbs":
        return gibbs_state(setup.h_s, cfg.beta)
    if kind == "coherent_gibbs":
        return coherent_gibbs_state(setup.h_s, cfg.beta)
    if kind == "diagonal":
        return DensityMatrix.diagonal(cfg.input_probs)
    if kind == "pure":
        return DensityMatrix.from_vector(np.array(cfg.input_amplitudes, dtype=np.complex128))
    return DensityMatrix.random_mixed(setup.ds, cfg.input_seed)


def build_operation(cfg: ScenarioConfig, setup: BipartiteSetup) -> ThermalOperation | np.ndarray:
    kind = cfg.operation
    if kind == "identity":
        return ThermalOperation.identity(setup)
    if kind == "partial_swap":
        return partial_swap_unitary(setup, cfg.theta)
    if kind == "random_to":
        return random_energy_preserving_unitary(setup, cfg.op_seed)
    return random_unitary(setup.ds * setup.db, cfg.op_seed)


def evaluate(cfg: ScenarioConfig) -> tuple[BipartiteSetup, ThermalOperation | np.ndarray, ProcessOutcome]:
    setup = build_setup(cfg)
    rho_s = build_input(cfg, setup)
    op = build_operation(cfg, setup)
    if isinstance(op, ThermalOperation):
        return setup, op, apply_to(op, rho_s)
    rho_b = setup.gamma_b if cfg.bath == "gibbs" else DensityMatrix.random_mixed(setup.db, cfg.bath_seed)
    return setup, op, apply_general_unitary(setup, op, rho_s, rho_b)


def _identity_checks(cfg: ScenarioConfig, setup: BipartiteSetup, op, outcome: ProcessOutcome,
                     report: ProcessReport, conv: DephasingConvention) -> tuple[dict[str, float], bool]:
    is_to = isinstance(op, ThermalOperation)
    thermal_bath = is_to or cfg.bath == "gibbs"
    u = outcome.unitary
    beta, temp = setup.beta, setup.temperature
    dev: dict[str, float] = {}

    dev["unitarity"] = unitarity_error(u)
    dev["output_trace"] = abs(np.trace(outcome.rho_sb_prime.matrix) - 1.0)
    s_in = von_neumann_entropy(outcome.rho_s) + von_neumann_entropy(outcome.rho_b)
    dev["total_entropy"] = abs(von_neumann_entropy(outcome.rho_sb_prime) - s_in)
    dev["heat_bridge"] = abs(report.heat_new - report.heat_standard - report.d_f_b)
    dev["mi_entropy_sum"] = abs(report.mutual_info - (report.d_s_s + report.d_s_b))
    dev["mi_relative"] = abs(report.mutual_info - mutual_information_relative(outcome.rho_sb_prime, setup.dims))
    dev["ep_new_nonneg"] = max(0.0, -report.sirr_new)
    dev["free_energy_decomposition"] = max(
        abs(free_energy_decomposition(rho, setup.h_s, beta, conv).total - free_energy(rho, setup.h_s, beta))
        for rho in (outcome.rho_s, outcome.rho_s_prime)
    )
    if thermal_bath:
        dev["bath_free_energy"] = abs(report.d_f_b - temp * relative_entropy(outcome.rho_b_prime, setup.gamma_b))

    mismatch = False
    if is_to:
        dev["energy_preserving"] = commutator_norm(u, setup.h_total.matrix)
        dev["energy_conservation"] = abs(report.d_e_s + report.d_e_b)
        dev["gibbs_fixed_point"] = float(np.max(np.abs(op(setup.gamma_s).matrix - setup.gamma_s.matrix)))
        dev["covariance"] = check_time_translation_covariance(op, outcome.rho_s, cfg.covariance_time).deviation
        std = entropy_production_standard(outcome)
        new = entropy_production_new(outcome)
        dev["ep_standard_forms"] = std.max_deviation
        dev["ep_standard_nonneg"] = max(0.0, -std.value)
        dev["ep_new_forms"] = new.max_deviation
        bounds = free_energy_bounds(outcome)
        dev["free_energy_bounds"] = max(bounds.standard_violation, bounds.new_violation,
                                        max(0.0, bounds.tightness_gap))
        dev["coherence_preservation"] = check_coherence_preservation(op, outcome.rho_s, conv)
        dev["split_standard_sum"] = entropy_production_split_standard(outcome, conv).deviation
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ConventionMismatch)
            split = entropy_production_split_new(outcome, conv, tol=cfg.tolerance)
        mismatch = any(issubclass(w.category, ConventionMismatch) for w in caught)
        dev["split_new_sum"] = split.sum_deviation
        dev["split_new_classical"] = split.classical_deviation
        dev["split_new_quantum_gap"] = split.quantum_gap_deviation
        dev["split_new_quantum_cc"] = split.quantum_cc_deviation
        if relative_entropy_of_coherence(outcome.rho_s, setup.h_s, conv) <= cfg.tolerance:
            dev["theorem_incoherent"] = max(report.c_s_prime, report.c_b_prime,
                                            abs(report.correlated_coherence),
                                            abs(report.sirr_new - split.classical))
        if cfg.input == "coherent_gibbs":
            dev["theorem_coherent_gibbs"] = max(abs(split.classical),
                                                abs(report.sirr_new - report.correlated_coherence))
    return dev, mismatch


def run_scenario(cfg: ScenarioConfig) -> RunRecord:
    """Evaluate one scenario deterministically and check every applicable identity."""
    conv = DephasingConvention(cfg.dephasing)
    try:
        setup, op, outcome = evaluate(cfg)
        report = process_report(outcome, conv)
        dev, mismatch = _identity_checks(cfg, setup, op, outcome, report, conv)
    except ThermalOpsError as exc:
        raise ScenarioError(f"{type(exc).__name__}: {exc} [{describe(cfg)}]", cfg) from exc
    checks = {
        name: Check(deviation=float(dev[name]), passed=bool(dev[name] <= cfg.tolerance))
        for name in IDENTITIES if name in dev
    }
    return RunRecord(config=cfg, report=report, checks=checks, convention_mismatch=mismatch)


def describe(cfg: ScenarioConfig) -> str:
    op = cfg.operation
    if op == "partial_swap":
        op += f"(theta={cfg.theta:g})"
    elif op in ("random_to", "general_unitary"):
        op += f"(seed={cfg.op_seed})"
    return f"{cfg.ds}x{cfg.db} beta={cfg.beta:g} input={cfg.input} op={op} dephasing={cfg.dephasing}"


def sweep_configs(base: ScenarioConfig, parameter: str, values) -> list[ScenarioConfig]:
    if parameter not in SWEEP_PARAMETERS:
        raise UnknownParameter(f"cannot sweep {parameter!r}; choose from {SWEEP_PARAMETERS}")
    out = []
    for v in values:
        if parameter == "theta":
            out.append(base.replace(theta=float(v)))
        elif parameter == "beta":
            out.append(base.replace(beta=float(v)))
        elif parameter == "seed":
            if float(v) != int(v):
                raise ConfigError(f"seed values must be integers, got {v!r}")
            s = int(v)
            out.append(base.replace(op_seed=s, input_seed=s, bath_seed=s))
        else:
            if float(v) != int(v) or int(v) < 1:
                raise ConfigError(f"db values must be positive integers, got {v!r}")
            out.append(base.replace(db=int(v), spectrum_b=None))
    return out


def run_sweep(base: ScenarioConfig, parameter: str, values) -> list[RunRecord]:
    """One record per value, in input order."""
    return [run_scenario(c) for c in sweep_configs(base, parameter, values)]


VERIFY_DIMS = ((2, 2), (2, 3), (3, 3), (2, 4))
VERIFY_INPUTS = ("gibbs", "coherent_gibbs", "diagonal", "pure", "random_mixed")
VERIFY_OPERATIONS = ("identity", "partial_swap", "random_to", "general_unitary")
VERIFY_SEEDS = (0, 1, 2, 3, 4)


def _canonical_spectrum(d: int) -> tuple[float, ...]:
    return tuple(float(k) for k in range(d))


def _canonical_probs(d: int) -> tuple[float, ...]:
    w = [0.5 ** k for k in range(d)]
    return tuple(x / sum(w) for x in w)


def _canonical_amplitudes(d: int) -> tuple[complex, ...]:
    a = [complex(math.cos(0.9 * k), math.sin(0.9 * k)) * (1.0 + 0.3 * k) for k in range(d)]
    n = math.sqrt(sum(abs(z) ** 2 for z in a))
    return tuple(z / n for z in a)


def verify_configs(dims=VERIFY_DIMS, inputs=VERIFY_INPUTS, operations=VERIFY_OPERATIONS,
                   seeds=VERIFY_SEEDS, beta: float = 1.0, theta: float = math.pi / 4,
                   dephasing: str = DephasingConvention.EIGENSPACE.value,
                   tolerance: float = 1e-9) -> list[ScenarioConfig]:
    """Canonical property matrix: dims x input families x operation families (x seeds).

    System spectra are ``0, 1, ..., ds-1``. A bath as large as the system uses
    the same spectrum; otherwise the bath is a ladder ``0, 1, ..., db-1`` when
    ``db`` is odd and the cyclically repeated system spectrum when even, so both
    a nondegenerate and a degenerate bath Hamiltonian are exercised.
    """
    out = []
    for ds, db in dims:
        spec_s = _canonical_spectrum(ds)
        spec_b = spec_s if db == ds else (
            _canonical_spectrum(db) if db % 2 else tuple(spec_s[k % ds] for k in range(db)))
        base = ScenarioConfig(spectrum_s=spec_s, spectrum_b=spec_b, beta=beta, theta=theta,
                              dephasing=dephasing, tolerance=tolerance,
                              input_probs=_canonical_probs(ds),
                              input_amplitudes=_canonical_amplitudes(ds))
        for inp in inputs:
            for op in operations:
                if op == "partial_swap" and spec_s != spec_b:
                    continue
                if op in ("random_to", "general_unitary"):
                    for seed in seeds:
                        out.append(base.replace(
                            input=inp, operation=op, op_seed=seed, input_seed=seed, bath_seed=seed,
                            bath="random_mixed" if op == "general_unitary" else "gibbs"))
                else:
                    out.append(base.replace(input=inp, operation=op))
    return out


@dataclass(frozen=True)
class IdentitySummary:
    name: str
    checked: int
    failed: int
    worst: float


@dataclass
class VerifySummary:
    records: list[RunRecord]
    tolerance: float

    @property
    def identities(self) -> list[IdentitySummary]:
        out = []
        for name in IDENTITIES:
            devs = [r.checks[name] for r in self.records if name in r.checks]
            if devs:
                out.append(IdentitySummary(name, len(devs), sum(not c.passed for c in devs),
                                           max(c.deviation for c in devs)))
        return out

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def exit_status(self) -> int:
        return 0 if self.passed else 1

    def table(self) -> str:
        n = len(self.records)
        lines = [f"{n} scenarios, tolerance {self.tolerance:.1e}"]
        if n == 0:
            lines.append("0 scenarios: nothing to verify")
            return "\n".join(lines) + "\n"
        lines.append(f"{'identity':<28}{'checked':>8}{'failed':>8}  worst deviation")
        for s in self.identities:
            flag = "FAIL" if s.failed else "ok"
            lines.append(f"{s.name:<28}{s.checked:>8}{s.failed:>8}  {s.worst:.3e}  {flag}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines) + "\n"


def verify_all(tolerance: float = 1e-9, configs: list[ScenarioConfig] | None = None) -> VerifySummary:
    """Run the property matrix; identity failures are reported, never raised."""
    if configs is None:
        configs = verify_configs(tolerance=tolerance)
    else:
        configs = [c.replace(tolerance=tolerance) for c in configs]
    return VerifySummary(records=[run_scenario(c) for c in configs], tolerance=tolerance)
