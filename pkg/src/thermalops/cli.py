"""Command-line entry point.

    thermalops run <config> [--out FILE] [--no-timestamp] [--bits]
    thermalops sweep <config> --param NAME --values LIST [--out FILE] [--no-timestamp]
    thermalops verify [--tolerance X] [--matrix FILE] [--csv FILE] [--no-timestamp]
    thermalops emit-state <config> --out FILE

Exit codes: 0 success, 1 identity violation, 2 configuration error.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
import time
from pathlib import Path

from .errors import ConfigError, ThermalOpsError
from .experiments.config import load_config, parse_settings
from .experiments.csvio import render_csv
from .experiments.runner import (
    VERIFY_DIMS,
    VERIFY_INPUTS,
    VERIFY_OPERATIONS,
    VERIFY_SEEDS,
    RunRecord,
    evaluate,
    run_scenario,
    run_sweep,
    verify_all,
    verify_configs,
)
from .matrix_io import write_matrices

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG = 0, 1, 2

ENTROPIC_FIELDS = {
    "d_s_s", "d_s_b", "sirr_standard", "sirr_new", "mutual_info", "rel_ent_bath_to_gibbs",
    "classical_standard", "quantum_standard", "classical_new", "quantum_new",
    "c_s", "c_s_prime", "c_b_prime", "c_sb_prime", "correlated_coherence",
}

_PI_RE = re.compile(r"^(?:([-+]?[0-9.eE+-]+)\s*\*?\s*)?pi(?:\s*/\s*([0-9.eE+-]+))?$")


def parse_value(token: str) -> float:
    """A float, or a multiple/fraction of pi such as ``pi/4`` or ``3*pi/8``."""
    t = token.strip()
    m = _PI_RE.match(t)
    try:
        if m:
            coef = float(m.group(1)) if m.group(1) else 1.0
            den = float(m.group(2)) if m.group(2) else 1.0
            return coef * math.pi / den
        return float(t)
    except ValueError:
        raise ConfigError(f"cannot parse sweep value {token!r}") from None


def parse_values(text: str) -> list[float]:
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise ConfigError("--values is empty")
    return [parse_value(p) for p in parts]


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, newline="\n")
    else:
        sys.stdout.write(text)


def _summary(rec: RunRecord, bits: bool) -> str:
    scale = 1.0 / math.log(2) if bits else 1.0
    unit = "bits" if bits else "nats"
    lines = []
    for name, v in rec.report.as_dict().items():
        if name in ENTROPIC_FIELDS:
            lines.append(f"  {name:<24}{v * scale: .10e} {unit}")
        else:
            lines.append(f"  {name:<24}{v: .10e}")
    for name, c in rec.checks.items():
        lines.append(f"  check {name:<28}{c.deviation:.3e}  {'ok' if c.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


def cmd_run(args) -> int:
    rec = run_scenario(load_config(args.config))
    _emit(render_csv([rec], timestamp=not args.no_timestamp), args.out)
    if args.out or args.bits:
        sys.stderr.write(_summary(rec, args.bits))
    return EXIT_OK if rec.passed else EXIT_VIOLATION


def cmd_sweep(args) -> int:
    records = run_sweep(load_config(args.config), args.param, parse_values(args.values))
    _emit(render_csv(records, timestamp=not args.no_timestamp), args.out)
    return EXIT_OK if all(r.passed for r in records) else EXIT_VIOLATION


MATRIX_KEYS = {"dims", "inputs", "operations", "seeds", "beta", "theta", "dephasing"}


def load_matrix(path) -> list:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {p}: {exc}") from exc
    s = parse_settings(text, str(p), MATRIX_KEYS)
    try:
        dims = [tuple(int(x) for x in d) for d in s.get("dims", VERIFY_DIMS)]
        if any(len(d) != 2 for d in dims):
            raise ConfigError("dims entries must be [ds, db] pairs")
        kwargs = dict(dims=dims,
                      inputs=tuple(s.get("inputs", VERIFY_INPUTS)),
                      operations=tuple(s.get("operations", VERIFY_OPERATIONS)),
                      seeds=tuple(int(x) for x in s.get("seeds", VERIFY_SEEDS)))
        for k in ("beta", "theta"):
            if k in s:
                kwargs[k] = float(s[k])
        if "dephasing" in s:
            kwargs["dephasing"] = str(s["dephasing"])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{p}: malformed matrix setting: {exc}") from exc
    return verify_configs(**kwargs)


def cmd_verify(args) -> int:
    start = time.perf_counter()
    configs = load_matrix(args.matrix) if args.matrix else verify_configs()
    summary = verify_all(args.tolerance, configs)
    elapsed = time.perf_counter() - start
    if args.csv:
        Path(args.csv).write_text(render_csv(summary.records, timestamp=not args.no_timestamp), newline="\n")
    sys.stdout.write(summary.table())
    if not args.no_timestamp:
        sys.stdout.write(f"elapsed {elapsed:.1f} s\n")
    return summary.exit_status


def cmd_emit_state(args) -> int:
    cfg = load_config(args.config)
    _, _, outcome = evaluate(cfg)
    write_matrices(args.out, {
        "rho_sb_prime": outcome.rho_sb_prime.matrix,
        "rho_s_prime": outcome.rho_s_prime.matrix,
        "rho_b_prime": outcome.rho_b_prime.matrix,
    })
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thermalops", description="Thermal-operation entropy-production experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="evaluate one scenario and print its CSV row")
    r.add_argument("config")
    r.add_argument("--out")
    r.add_argument("--no-timestamp", action="store_true")
    r.add_argument("--bits", action="store_true", help="print an entropy summary in bits to stderr")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="sweep one parameter of a scenario")
    s.add_argument("config")
    s.add_argument("--param", required=True, help="theta, beta, seed or db")
    s.add_argument("--values", required=True, help="comma-separated, e.g. 0,pi/8,pi/4,pi/2")
    s.add_argument("--out")
    s.add_argument("--no-timestamp", action="store_true")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="run the canonical identity matrix")
    v.add_argument("--tolerance", type=float, default=1e-9)
    v.add_argument("--matrix", help="override the scenario matrix (key = JSON lines)")
    v.add_argument("--csv", help="also write all run records here")
    v.add_argument("--no-timestamp", action="store_true")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("emit-state", help="write the final joint state and marginals")
    e.add_argument("config")
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_emit_state)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ThermalOpsError as exc:
        # e.g. partial swap on a non-resonant setup: the scenario itself is invalid
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
