"""Plain-text matrix interchange.

One matrix is a dimension line followed by one line per row; each row holds
whitespace-separated ``re,im`` pairs in ``%.16e`` format. A file may hold
several matrices; lines starting with ``#`` are labels/comments, and a
``# name`` line directly before a matrix names it.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .linalg import as_matrix


def format_matrix(m) -> str:
    arr = as_matrix(m)
    lines = [str(arr.shape[0])]
    for row in arr:
        lines.append(" ".join(f"{z.real:.16e},{z.imag:.16e}" for z in row))
    return "\n".join(lines) + "\n"


def format_matrices(named: dict[str, object]) -> str:
    return "".join(f"# {name}\n{format_matrix(m)}" for name, m in named.items())


def parse_matrices(text: str) -> dict[str, np.ndarray]:
    """Parse every matrix in ``text``; unnamed matrices are keyed ``matrix<k>``."""
    out: dict[str, np.ndarray] = {}
    lines = text.splitlines()
    name = None
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line:
            continue
        if line.startswith("#"):
            name = line[1:].strip() or None
            continue
        try:
            dim = int(line)
        except ValueError:
            raise ValueError(f"line {i}: expected a dimension, got {line!r}") from None
        if dim <= 0 or i + dim > len(lines):
            raise ValueError(f"line {i}: bad or truncated matrix of dimension {dim}")
        rows = []
        for r in range(dim):
            pairs = lines[i + r].split()
            if len(pairs) != dim:
                raise ValueError(f"line {i + r + 1}: expected {dim} entries, got {len(pairs)}")
            row = []
            for p in pairs:
                re_s, im_s = p.split(",")
                row.append(complex(float(re_s), float(im_s)))
            rows.append(row)
        i += dim
        key = name or f"matrix{len(out)}"
        if key in out:
            raise ValueError(f"duplicate matrix name {key!r}")
        out[key] = np.array(rows, dtype=np.complex128)
        name = None
    return out


def parse_matrix(text: str) -> np.ndarray:
    mats = parse_matrices(text)
    if len(mats) != 1:
        raise ValueError(f"expected exactly one matrix, found {len(mats)}")
    return next(iter(mats.values()))


def write_matrices(path, named: dict[str, object]) -> None:
    Path(path).write_text(format_matrices(named), newline="\n")


def read_matrices(path) -> dict[str, np.ndarray]:
    return parse_matrices(Path(path).read_text())
