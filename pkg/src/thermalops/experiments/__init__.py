from .config import ScenarioConfig, load_config, parse_config
from .csvio import SCHEMA_VERSION, render_csv
from .runner import (
    IDENTITIES,
    RunRecord,
    ScenarioError,
    VerifySummary,
    run_scenario,
    run_sweep,
    verify_all,
    verify_configs,
)

__all__ = [
    "IDENTITIES",
    "RunRecord",
    "SCHEMA_VERSION",
    "ScenarioConfig",
    "ScenarioError",
    "VerifySummary",
    "load_config",
    "parse_config",
    "render_csv",
    "run_scenario",
    "run_sweep",
    "verify_all",
    "verify_configs",
]
