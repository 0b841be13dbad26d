"""Run configuration shared by the CLI and the evaluation harness."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

from .errors import ConfigError

ABLATIONS = ("SC", "SA", "DC", "DA")
MODES = ("transductive", "inductive")


@dataclass
class RunConfig:
    train: Optional[str] = None
    test: Optional[str] = None
    candidates: Optional[str] = None
    descriptions: Optional[str] = None  # detailed-tier file
    short_descriptions: Optional[str] = None
    store: Optional[str] = None
    depth: int = 2
    min_acc: float = 0.5
    min_rec: float = 0.5
    budget_l: int = 3
    margin: float = 0.5
    negatives_per_positive: int = 5
    seed: int = 42
    encoder: str = "builtin"
    ablation: str = "DA"
    mode: str = "transductive"
    workers: int = 1
    candidate_set_size: int = 50

    def validate(self) -> "RunConfig":
        if self.depth < 1:
            raise ConfigError(f"depth must be >= 1, got {self.depth}")
        if not (0.0 <= self.min_acc <= 1.0 and 0.0 <= self.min_rec <= 1.0):
            raise ConfigError("thresholds must lie in [0, 1]")
        if self.budget_l < 1:
            raise ConfigError(f"budget_l must be >= 1, got {self.budget_l}")
        if not -1.0 < self.margin < 1.0:
            raise ConfigError(f"margin must lie in (-1, 1), got {self.margin}")
        if self.negatives_per_positive < 0:
            raise ConfigError("negatives_per_positive must be >= 0")
        if self.ablation not in ABLATIONS:
            raise ConfigError(f"ablation must be one of {ABLATIONS}, got {self.ablation!r}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.candidate_set_size < 2:
            raise ConfigError("candidate_set_size must be >= 2")
        return self

    @property
    def description_mode(self) -> str:
        return "short" if self.ablation.startswith("S") else "detailed"

    @property
    def include_aps(self) -> bool:
        return self.ablation.endswith("A")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_sources(cls, config_file: Optional[str], overrides: dict) -> "RunConfig":
        """Defaults, then config-file values, then explicit flag overrides."""
        values: dict = {}
        if config_file:
            try:
                with open(config_file, encoding="utf-8") as fh:
                    loaded = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config file {config_file}: {exc}") from exc
            if not isinstance(loaded, dict):
                raise ConfigError(f"config file {config_file} must hold a JSON object")
            unknown = set(loaded) - set(cls.__dataclass_fields__)
            if unknown:
                raise ConfigError(f"unknown config keys: {sorted(unknown)}")
            values.update(loaded)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values).validate()
