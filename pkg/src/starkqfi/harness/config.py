"""Flat key-value experiment configuration with CLI flag overrides."""
from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from pathlib import Path

KINDS = (
    "eq-sweep",
    "dyn-sweep",
    "transition-scan",
    "dyn-transition-scan",
    "gap-scan",
    "bound-check",
    "fit",
    "reproduce",
)

SELECTORS_HINT = "ground | mid | edge | index:<k>"


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 1)."""


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def _parse_sizes(text: str) -> tuple[int, ...]:
    """Comma list ("8,10,12") or inclusive range ("50:300:10")."""
    if ":" in text:
        parts = [int(tok) for tok in text.split(":")]
        if len(parts) == 2:
            lo, hi, step = parts[0], parts[1], 1
        elif len(parts) == 3:
            lo, hi, step = parts
        else:
            raise ConfigError(f"bad size range {text!r} (use lo:hi or lo:hi:step)")
        if step <= 0 or hi < lo:
            raise ConfigError(f"bad size range {text!r}")
        return tuple(range(lo, hi + 1, step))
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def default_workers() -> int:
    env = os.environ.get("STARKQFI_WORKERS")
    if env:
        try:
            n = int(env)
        except ValueError as err:
            raise ConfigError(f"STARKQFI_WORKERS={env!r} is not an integer") from err
        if n < 1:
            raise ConfigError("STARKQFI_WORKERS must be >= 1")
        return n
    return os.cpu_count() or 1


@dataclass
class ExperimentConfig:
    kind: str
    probe: str = "sp"
    a: tuple[float, ...] = ()
    L: tuple[int, ...] = ()
    h_scale: str = "log"
    h_min: float = 1e-9
    h_max: float = 10.0
    h_count: int = 91
    selector: str = "ground"
    method: str = "eigen-sum"
    t_scale: str = "integer"
    t_min: float = 0.0
    t_max: float = 1000.0
    t_count: int = 60
    emit_series: bool = True
    gap_h: float = 0.0
    out: str = "out"
    tag: str = ""
    workers: int = field(default_factory=default_workers)
    figure: str = ""
    input: str = ""
    fit_kind: str = ""
    fit_x: str = "L"
    fit_y: str = "qfi"
    group_by: str = "a"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.probe not in ("sp", "mb"):
            raise ConfigError(f"probe must be 'sp' or 'mb', got {self.probe!r}")
        if self.method not in ("eigen-sum", "fidelity-fd"):
            raise ConfigError(f"unknown method {self.method!r}")
        if self.h_scale not in ("log", "linear"):
            raise ConfigError(f"h_scale must be 'log' or 'linear', got {self.h_scale!r}")
        if self.t_scale not in ("integer", "log"):
            raise ConfigError(f"t_scale must be 'integer' or 'log', got {self.t_scale!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        grid_kinds = ("eq-sweep", "dyn-sweep")
        if self.kind in grid_kinds:
            if self.h_count < 1 or self.h_min <= 0 or self.h_max < self.h_min:
                raise ConfigError("field grid must be non-empty, positive and ordered")
        if self.kind in grid_kinds + ("transition-scan", "dyn-transition-scan", "gap-scan"):
            if not self.a or not self.L:
                raise ConfigError(f"{self.kind} needs non-empty 'a' and 'L' lists")
        if self.kind == "bound-check" and (not self.a or not self.L):
            raise ConfigError("bound-check needs non-empty 'a' and 'L' lists")
        if self.kind == "dyn-transition-scan" and self.probe != "sp":
            raise ConfigError(
                "dyn-transition-scan is a single-particle protocol (probe = sp)"
            )
        if self.kind == "fit" and (not self.input or not self.fit_kind):
            raise ConfigError("fit needs 'input' (CSV path) and 'fit_kind'")
        if self.kind == "reproduce" and not self.figure:
            raise ConfigError("reproduce needs 'figure'")
        if self.probe == "mb" and any(size % 2 for size in self.L):
            raise ConfigError("many-body sizes must be even (half filling)")

    def h_grid(self):
        import numpy as np

        if self.h_scale == "log":
            return np.logspace(np.log10(self.h_min), np.log10(self.h_max), self.h_count)
        return np.linspace(self.h_min, self.h_max, self.h_count)

    def t_grid(self):
        import numpy as np

        if self.t_scale == "integer":
            return np.arange(self.t_min, self.t_max + 0.5)
        lo = max(self.t_min, 1e-12)
        return np.unique(np.logspace(np.log10(lo), np.log10(self.t_max), self.t_count))


_BOOL_KEYS = {"emit_series"}
_FLOAT_KEYS = {"h_min", "h_max", "t_min", "t_max", "gap_h"}
_INT_KEYS = {"h_count", "t_count", "workers"}
_LIST_FLOAT_KEYS = {"a"}
_SIZE_KEYS = {"L"}


def _coerce(key: str, raw: str):
    if key in _BOOL_KEYS:
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"{key} must be a boolean, got {raw!r}")
    try:
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _INT_KEYS:
            return int(raw)
        if key in _LIST_FLOAT_KEYS:
            return _parse_floats(raw)
        if key in _SIZE_KEYS:
            return _parse_sizes(raw)
    except ValueError as err:
        raise ConfigError(f"bad value for {key}: {raw!r}") from err
    return raw


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Flat `key = value` lines; '#' starts a comment."""
    entries: dict[str, str] = {}
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, value = line.split("=", 1)
        entries[key.strip()] = value.strip()
    return entries


def load_config(
    kind: str | None = None,
    config_file: str | Path | None = None,
    overrides: dict[str, str] | None = None,
) -> ExperimentConfig:
    """Merge config file and CLI overrides (overrides win) into a config."""
    raw: dict[str, str] = {}
    if config_file is not None:
        raw.update(parse_config_file(config_file))
    if overrides:
        raw.update(overrides)
    if kind is not None:
        raw["kind"] = kind
    valid = {f.name for f in fields(ExperimentConfig)}
    unknown = set(raw) - valid
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "kind" not in raw:
        raise ConfigError("missing experiment kind")
    typed = {key: _coerce(key, value) if isinstance(value, str) else value
             for key, value in raw.items()}
    return ExperimentConfig(**typed)
