"""Scenario configuration files.

Grammar (one setting per line)::

    line    := blank | comment | setting
    comment := '#' anything
    setting := key '=' value
    key     := [a-z_][a-z0-9_]*
    value   := a JSON literal (number, string, true/false, or list)

Keys may appear at most once; unknown keys are an error. Example::

    # resonant qubits, quarter swap
    spectrum_s = [0.0, 1.0]
    spectrum_b = [0.0, 1.0]
    beta = 1.0
    input = "diagonal"
    input_probs = [0.9, 0.1]
    operation = "partial_swap"
    theta = 0.7853981633974483

Recognized keys and defaults are the fields of :class:`ScenarioConfig`.
``ds``/``db`` default to the spectra lengths. If ``spectrum_b`` is omitted the
bath spectrum is the system spectrum repeated cyclically up to ``db`` levels,
which keeps the bath resonant with every system transition.
``input_amplitudes`` entries are reals or ``[re, im]`` pairs.
"""

from __future__ import annotations

import dataclasses
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

from ..coherence import DephasingConvention
from ..errors import ConfigError

INPUT_KINDS = ("gibbs", "coherent_gibbs", "diagonal", "pure", "random_mixed")
OPERATION_KINDS = ("identity", "partial_swap", "random_to", "general_unitary")
BATH_KINDS = ("gibbs", "random_mixed")

_KEY_RE = re.compile(r"^[a-z_][a-z0-9_]*$")


@dataclass(frozen=True)
class ScenarioConfig:
    spectrum_s: tuple[float, ...] = (0.0, 1.0)
    spectrum_b: tuple[float, ...] | None = None
    ds: int | None = None
    db: int | None = None
    beta: float = 1.0
    input: str = "diagonal"
    input_probs: tuple[float, ...] | None = None
    input_amplitudes: tuple[complex, ...] | None = None
    input_seed: int = 0
    operation: str = "random_to"
    theta: float = math.pi / 4
    op_seed: int = 0
    bath: str = "gibbs"
    bath_seed: int = 0
    dephasing: str = DephasingConvention.EIGENSPACE.value
    tolerance: float = 1e-9
    covariance_time: float = 0.7

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)
        try:
            set_("spectrum_s", tuple(float(x) for x in self.spectrum_s))
            ds = len(self.spectrum_s) if self.ds is None else int(self.ds)
            set_("ds", ds)
            if ds != len(self.spectrum_s) or ds < 1:
                raise ConfigError(f"ds={ds} does not match spectrum_s of length {len(self.spectrum_s)}")
            if self.spectrum_b is None:
                db = ds if self.db is None else int(self.db)
                set_("spectrum_b", tuple(self.spectrum_s[k % ds] for k in range(db)))
            else:
                set_("spectrum_b", tuple(float(x) for x in self.spectrum_b))
            set_("db", len(self.spectrum_b) if self.db is None else int(self.db))
            set_("beta", float(self.beta))
            set_("theta", float(self.theta))
            set_("tolerance", float(self.tolerance))
            set_("covariance_time", float(self.covariance_time))
            for k in ("input_seed", "op_seed", "bath_seed"):
                v = self.__dict__[k]
                if isinstance(v, bool) or int(v) != v:
                    raise ConfigError(f"{k} must be an integer")
                set_(k, int(v))
            if self.input_probs is not None:
                set_("input_probs", tuple(float(x) for x in self.input_probs))
            if self.input_amplitudes is not None:
                set_("input_amplitudes", tuple(_to_complex(a) for a in self.input_amplitudes))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed configuration value: {exc}") from exc
        self.validate()

    def validate(self) -> None:
        if len(self.spectrum_s) != self.ds or self.ds < 1:
            raise ConfigError(f"ds={self.ds} does not match spectrum_s of length {len(self.spectrum_s)}")
        if len(self.spectrum_b) != self.db or self.db < 1:
            raise ConfigError(f"db={self.db} does not match spectrum_b of length {len(self.spectrum_b)}")
        for name in ("spectrum_s", "spectrum_b"):
            if not all(math.isfinite(x) for x in getattr(self, name)):
                raise ConfigError(f"{name} has non-finite entries")
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ConfigError("beta must be finite and > 0 (free energies are undefined at beta = 0)")
        if self.input not in INPUT_KINDS:
            raise ConfigError(f"input must be one of {INPUT_KINDS}, got {self.input!r}")
        if self.operation not in OPERATION_KINDS:
            raise ConfigError(f"operation must be one of {OPERATION_KINDS}, got {self.operation!r}")
        if self.bath not in BATH_KINDS:
            raise ConfigError(f"bath must be one of {BATH_KINDS}, got {self.bath!r}")
        if self.bath != "gibbs" and self.operation != "general_unitary":
            raise ConfigError("a non-thermal bath is only allowed with operation = general_unitary")
        try:
            DephasingConvention(self.dephasing)
        except ValueError:
            raise ConfigError(f"unknown dephasing convention {self.dephasing!r}") from None
        if not (self.tolerance > 0):
            raise ConfigError("tolerance must be positive")
        if self.input == "diagonal":
            p = self.input_probs
            if p is None or len(p) != self.ds:
                raise ConfigError(f"input_probs must list {self.ds} probabilities")
            if min(p) < 0 or abs(sum(p) - 1.0) > 1e-10:
                raise ConfigError("input_probs must be nonnegative and sum to 1 within 1e-10")
        if self.input == "pure":
            a = self.input_amplitudes
            if a is None or len(a) != self.ds:
                raise ConfigError(f"input_amplitudes must list {self.ds} amplitudes")
            if abs(math.sqrt(sum(abs(z) ** 2 for z in a)) - 1.0) > 1e-10:
                raise ConfigError("input_amplitudes must have unit norm within 1e-10")

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        """Serialize in the config grammar; ``parse_config(cfg.to_text()) == cfg``."""
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if f.name == "input_amplitudes":
                v = [[z.real, z.imag] for z in v]
            elif isinstance(v, tuple):
                v = list(v)
            lines.append(f"{f.name} = {json.dumps(v)}")
        return "\n".join(lines) + "\n"


def _to_complex(a) -> complex:
    if isinstance(a, (list, tuple)):
        if len(a) != 2:
            raise ConfigError(f"complex amplitude must be [re, im], got {a!r}")
        return complex(float(a[0]), float(a[1]))
    if isinstance(a, complex):
        return a
    return complex(float(a), 0.0)


def parse_config(text: str, source: str = "<config>") -> ScenarioConfig:
    return ScenarioConfig(**parse_settings(text, source, {f.name for f in dataclasses.fields(ScenarioConfig)}))


def parse_settings(text: str, source: str, allowed: set[str]) -> dict:
    """Parse ``key = json`` lines into a dict, rejecting unknown or repeated keys."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, rest = line.partition("=")
        key = key.strip()
        if not sep or not _KEY_RE.match(key):
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        if key not in allowed:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = json.loads(rest.strip())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc.msg}") from None
    return values


def load_config(path) -> ScenarioConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {p}: {exc}") from exc
    return parse_config(text, str(p))
