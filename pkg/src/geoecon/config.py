"""
Run configuration for the command-line front end.

Config files hold ``key = value`` lines with ``#`` comments.  Every command
has a fixed schema; unknown keys are rejected, missing keys take their
defaults, and flag overrides win over file values.  A resolved
configuration formats back to the same syntax (the run manifest), and
parsing a manifest reproduces the configuration exactly.
"""
from __future__ import annotations

import math

import numpy as np
from dataclasses import dataclass, field

from .errors import ConfigError


def _float(text):
    try:
        val = float(text)
    except ValueError:
        raise ConfigError(f"malformed number {text!r}") from None
    if not math.isfinite(val):
        raise ConfigError(f"non-finite number {text!r}")
    return val


def _int(text):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"malformed integer {text!r}") from None


def _floats(text):
    text = text.strip()
    if not text:
        return ()
    return tuple(_float(p) for p in text.split(","))


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"malformed boolean {text!r}")


def _str(text):
    return text.strip()


def _fmt(val):
    if isinstance(val, bool):
        return "true" if val else "false"
    if isinstance(val, (float, np.floating)):
        return repr(float(val))
    if isinstance(val, tuple):
        return ",".join(_fmt(v) for v in val)
    return str(val)


@dataclass(frozen=True)
class Key:
    parse: object
    default: object
    check: object = None  # callable(value) -> error message or None
    required: bool = False


def _positive(v):
    return None if v > 0 else "must be positive"


def _non_negative(v):
    return None if v >= 0 else "must be non-negative"


def _all_positive(vs):
    return None if vs and all(v > 0 for v in vs) else "must be a non-empty list of positive numbers"


def _all_non_negative(vs):
    return None if vs and all(v >= 0 for v in vs) else "must be a non-empty list of non-negative numbers"


def _choice(*options):
    return lambda v: None if v in options else f"must be one of {', '.join(options)}"


def _unit_interval(v):
    return None if -1.0 <= v <= 1.0 else "must lie in [-1, 1]"


COMMON = {
    "out": Key(_str, "out"),
    "workers": Key(_int, 1, lambda v: None if v >= 1 else "must be >= 1"),
    "seed": Key(_int, 0),
}

_BLOCH = {
    "r1": Key(_float, 0.3, _unit_interval),
    "r2": Key(_float, 0.4, _unit_interval),
    "r3": Key(_float, 0.0, _unit_interval),
}

_METRIC = {
    "metric.kind": Key(_str, "analytic", _choice("analytic", "from_rate")),
    "metric.alpha": Key(_int, 1, lambda v: None if v >= 1 else "must be >= 1"),
    "metric.expr": Key(_str, "1/lambda_1**2"),
    "beta": Key(_float, 1.0, _positive),
}

SCHEMAS = {
    "evolve": {
        "e_a": Key(_float, 1.1),
        "e_d": Key(_float, 0.9),
        **_BLOCH,
        "time": Key(_float, 10.0, _non_negative),
        "step": Key(_float, 1e-3, _positive),
        "samples": Key(_int, 101, lambda v: None if v >= 2 else "must be >= 2"),
    },
    "entropy-map": {
        "points": Key(_str, ""),
        "direction": Key(_floats, (1.0, 0.0, 0.0)),
        "radius_max": Key(_float, 0.9, lambda v: None if 0 < v <= 0.999 else "must lie in (0, 0.999]"),
        "samples": Key(_int, 10, lambda v: None if v >= 1 else "must be >= 1"),
    },
    "geodesic": {
        "r1": Key(_float, 0.2, _unit_interval),
        "r2": Key(_float, 0.0, _unit_interval),
        "r3": Key(_float, 0.0, _unit_interval),
        "v1": Key(_float, 0.0),
        "v2": Key(_float, 0.1),
        "v3": Key(_float, 0.0),
        "duration": Key(_float, 10.0, _non_negative),
        "step": Key(_float, 1e-3, _positive),
        "record_every": Key(_int, 10, lambda v: None if v >= 1 else "must be >= 1"),
    },
    "sustainability-grid": {
        "delta": Key(_float, 0.1, _positive),
        "times": Key(_floats, (0.0, 0.2, 0.4, 0.6, 0.8), _all_non_negative),
        "grid_step": Key(_float, 0.01, _positive),
        "r3_0": Key(_float, 0.0, lambda v: None if -1 < v < 1 else "must lie in (-1, 1)"),
        "source": Key(_str, "paper", _choice("paper", "exact")),
        "threshold": Key(_float, 0.01, _positive),
        "collapse_deltas": Key(_floats, (0.1, 0.2, 0.5, 1.0), _all_positive),
    },
    "tomography": {
        "counts": Key(_str, ""),
        **_BLOCH,
        "shots": Key(_int, 100000, lambda v: None if v >= 1 else "must be >= 1"),
    },
    "open-geodesic": {
        **_METRIC,
        "lambda0": Key(_floats, (1.0,)),
        "velocity": Key(_floats, (1.0,)),
        "duration": Key(_float, 1.0, _non_negative),
        "step": Key(_float, 1e-3, _positive),
    },
    "dissipation": {
        **_METRIC,
        "path": Key(_str, "", required=True),
    },
    "complexity-cost": {
        "hamiltonian": Key(_str, "", required=True),
        "penalty": Key(_float, 1.0, _positive),
        "normalize_q_term": Key(_bool, False),
    },
    "brandt": {
        "hpath": Key(_str, "", required=True),
        "k0": Key(_str, ""),
        "penalty": Key(_float, 1.0, _positive),
        "duration": Key(_float, 1.0, _non_negative),
        "step": Key(_float, 1e-2, _positive),
        "record_every": Key(_int, 10, lambda v: None if v >= 1 else "must be >= 1"),
    },
}

COMMANDS = tuple(SCHEMAS)


def schema(command):
    if command not in SCHEMAS:
        raise ConfigError(f"unknown command {command!r}")
    return {**SCHEMAS[command], **COMMON}


@dataclass(frozen=True)
class RunConfig:
    command: str
    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        return self.values.get(key, default)

    def to_text(self) -> str:
        """Manifest text; parsing it back yields an identical configuration."""
        lines = [f"# geoecon {self.command}"]
        lines += [f"{k} = {_fmt(v)}" for k, v in self.values.items()]
        return "\n".join(lines) + "\n"


def parse_lines(text: str):
    """``key = value`` pairs from config text, in order."""
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        pairs.append((key.strip(), value.strip()))
    return pairs


def parse_config(text: str, overrides=(), command="sustainability-grid") -> RunConfig:
    """Resolve a configuration for ``command``.

    Parameters
    ----------
    text : str
        Config file contents (may be empty).
    overrides : iterable of (key, value)
        Raw string values from flags; applied after the file.
    """
    keys = schema(command)
    raw = {}
    for key, value in list(parse_lines(text)) + list(overrides):
        if key not in keys:
            raise ConfigError(f"unknown key {key!r} for command {command!r}")
        raw[key] = value
    values = {}
    for key, spec in keys.items():
        if key in raw:
            val = spec.parse(raw[key])
        elif spec.required:
            raise ConfigError(f"missing required key {key!r} for command {command!r}")
        else:
            val = spec.default
        if spec.check is not None:
            msg = spec.check(val)
            if msg:
                raise ConfigError(f"{key} = {_fmt(val)}: {msg}")
        values[key] = val
    _cross_checks(command, values)
    return RunConfig(command, values)


def _cross_checks(command, v):
    if command == "evolve" and not v["e_a"] > v["e_d"]:
        raise ConfigError("e_a must exceed e_d")
    if command in ("evolve", "tomography"):
        if math.sqrt(v["r1"] ** 2 + v["r2"] ** 2 + v["r3"] ** 2) > 1.0:
            raise ConfigError("initial Bloch vector lies outside the unit ball")
    if command == "geodesic" and math.sqrt(v["r1"] ** 2 + v["r2"] ** 2 + v["r3"] ** 2) >= 0.999:
        raise ConfigError("initial point must satisfy |r| < 0.999")
    if command == "entropy-map" and len(v["direction"]) != 3:
        raise ConfigError("direction needs three components")
    if command == "open-geodesic":
        a = v["metric.alpha"]
        if len(v["lambda0"]) != a or len(v["velocity"]) != a:
            raise ConfigError(f"lambda0 and velocity need metric.alpha = {a} components")
