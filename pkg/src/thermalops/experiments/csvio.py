"""CSV rendering of run records.

Floats: 17 significant digits in scientific notation. Comma delimiter, LF
line endings. Empty ``dev_``/``ok_`` cells mean the identity does not apply
to that scenario (e.g. energy conservation for a general unitary).
"""

from __future__ import annotations

import csv
import io
from datetime import datetime, timezone

from ..report import ProcessReport
from .runner import IDENTITIES, RunRecord

SCHEMA_VERSION = 1

CONFIG_COLUMNS = (
    "ds", "db", "spectrum_s", "spectrum_b", "beta", "input", "input_probs", "input_amplitudes",
    "input_seed", "operation", "theta", "op_seed", "bath", "bath_seed", "dephasing", "tolerance",
)


def fmt_float(x: float) -> str:
    return f"{x:.16e}"


def _fmt_vector(v) -> str:
    if v is None:
        return ""
    parts = []
    for x in v:
        if isinstance(x, complex):
            parts.append(f"{fmt_float(x.real)}{'+' if x.imag >= 0 else '-'}{fmt_float(abs(x.imag))}j")
        else:
            parts.append(fmt_float(x))
    return ";".join(parts)


def columns() -> list[str]:
    cols = ["schema_version", "row", *CONFIG_COLUMNS, *ProcessReport.field_names(),
            "all_passed", "convention_mismatch"]
    for name in IDENTITIES:
        cols += [f"dev_{name}", f"ok_{name}"]
    return cols


def record_row(index: int, rec: RunRecord) -> list[str]:
    cfg = rec.config
    row = [str(SCHEMA_VERSION), str(index)]
    for col in CONFIG_COLUMNS:
        v = getattr(cfg, col)
        if isinstance(v, tuple) or v is None:
            row.append(_fmt_vector(v))
        elif isinstance(v, float):
            row.append(fmt_float(v))
        else:
            row.append(str(v))
    row += [fmt_float(v) for v in rec.report.as_dict().values()]
    row += ["1" if rec.passed else "0", "1" if rec.convention_mismatch else "0"]
    for name in IDENTITIES:
        c = rec.checks.get(name)
        row += ["", ""] if c is None else [fmt_float(c.deviation), "pass" if c.passed else "fail"]
    return row


def render_csv(records: list[RunRecord], timestamp: bool = True) -> str:
    buf = io.StringIO()
    if timestamp:
        buf.write(f"# generated {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns())
    for i, rec in enumerate(records):
        w.writerow(record_row(i, rec))
    return buf.getvalue()
