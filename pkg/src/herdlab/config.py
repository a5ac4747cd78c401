"""Run configuration: dataclass defaults, JSON file merge, validation.

Precedence is defaults < config file < explicit command-line flags.  File
keys must be known field names; anything else is rejected by name so typos
cannot silently fall back to defaults.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from typing import Optional


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    alpha: float = 2.0
    alpha_tilde: float = 2.5
    prior: float = 0.5
    horizon: int = 10_000
    trials: int = 10_000
    seed: int = 42
    depth: int = 12
    state_draw: str = "fixed_high"
    conditioning_state: str = "high"
    herd_action: str = "high"
    herd_n: int = 100_000
    grid_points: int = 10_001
    priors: tuple = (0.5, 0.2, 0.1, 0.05)
    alpha_list: tuple = (2.0,)
    alpha_tilde_list: tuple = (1.5, 2.5, 3.2)
    workers: int = 1
    out: Optional[str] = None
    per_trial_out: Optional[str] = None

    def validate(self) -> None:
        def positive(name):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0):
                raise ConfigError(f"field '{name}' must be positive, got {v!r}")

        positive("alpha")
        positive("alpha_tilde")
        if not (0.0 < self.prior < 1.0):
            raise ConfigError(f"field 'prior' must lie in (0, 1), got {self.prior!r}")
        for name, lo, hi in (("horizon", 1, None), ("trials", 1, None),
                             ("seed", 0, None), ("depth", 1, 25),
                             ("herd_n", 10, None), ("grid_points", 2, None),
                             ("workers", 1, None)):
            v = getattr(self, name)
            if not isinstance(v, int) or v < lo or (hi is not None and v > hi):
                span = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
                raise ConfigError(f"field '{name}' must be an integer {span}, got {v!r}")
        if self.state_draw not in ("fixed_high", "fixed_low", "from_prior"):
            raise ConfigError(f"field 'state_draw' must be one of fixed_high, "
                              f"fixed_low, from_prior, got {self.state_draw!r}")
        for name in ("conditioning_state", "herd_action"):
            if getattr(self, name) not in ("high", "low"):
                raise ConfigError(f"field '{name}' must be 'high' or 'low', "
                                  f"got {getattr(self, name)!r}")
        for p in self.priors:
            if not (0.0 < p < 1.0):
                raise ConfigError(f"field 'priors' entries must lie in (0, 1), got {p!r}")
        for name in ("alpha_list", "alpha_tilde_list"):
            vals = getattr(self, name)
            if not vals:
                raise ConfigError(f"field '{name}' must not be empty")
            for v in vals:
                if not v > 0:
                    raise ConfigError(f"field '{name}' entries must be positive, got {v!r}")

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for key in ("priors", "alpha_list", "alpha_tilde_list"):
            d[key] = list(d[key])
        return d


_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}
_SEQUENCE_FIELDS = {"priors", "alpha_list", "alpha_tilde_list"}


def build_config(file_path: Optional[str], overrides: dict) -> ExperimentConfig:
    """Merge defaults, an optional JSON file, and explicit flag overrides."""
    cfg = ExperimentConfig()
    if file_path is not None:
        try:
            with open(file_path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}")
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = sorted(set(data) - _FIELDS)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        for key, value in data.items():
            if key in _SEQUENCE_FIELDS:
                if not isinstance(value, list):
                    raise ConfigError(f"field '{key}' must be a JSON array")
                value = tuple(value)
            setattr(cfg, key, value)
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    cfg.validate()
    return cfg
