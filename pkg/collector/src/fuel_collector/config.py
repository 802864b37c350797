"""Collector run configuration."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields

ARRIVAL_MODES = ("poisson", "fixed")


@dataclass(frozen=True)
class CollectorConfig:
    """Everything one profiling run needs.

    ``power_sources`` maps device ids to telemetry backend identifiers
    (see :mod:`fuel_collector.power`). Metadata fields are copied into the
    emitted trace header verbatim.
    """

    endpoint: str
    model: str
    target_qps: float
    duration_s: float
    prompts_path: str
    out_path: str
    power_sources: dict[str, str] = field(default_factory=dict)
    scorer_url: str | None = None
    arrivals: str = "poisson"
    seed: int = 0
    request_timeout_s: float = 30.0
    scorer_timeout_s: float = 10.0

    run_id: str = ""
    config_label: str = "default"
    model_family: str = ""
    model_size_b: float = 1.0
    quantization: str = "unknown"
    platform_id: str = "unknown"
    dataset_id: str = "prompts"

    def __post_init__(self):
        if not self.target_qps > 0:
            raise ValueError(f"target_qps must be > 0, got {self.target_qps}")
        if not self.duration_s > 0:
            raise ValueError(f"duration_s must be > 0, got {self.duration_s}")
        if self.arrivals not in ARRIVAL_MODES:
            raise ValueError(f"arrivals must be one of {ARRIVAL_MODES}, got {self.arrivals!r}")
        if not self.model_size_b > 0:
            raise ValueError(f"model_size_b must be > 0, got {self.model_size_b}")
        if not self.run_id:
            object.__setattr__(
                self, "run_id",
                f"collect-{self.config_label}-qps{self.target_qps:g}-seed{self.seed}")
        if not self.model_family:
            object.__setattr__(self, "model_family", self.model)


def config_from_dict(obj: dict) -> CollectorConfig:
    known = {f.name for f in fields(CollectorConfig)}
    unknown = sorted(set(obj) - known)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    try:
        return CollectorConfig(**obj)
    except TypeError as exc:
        raise ValueError(str(exc)) from None


def load_config(path: str) -> CollectorConfig:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError("config file must hold a JSON object")
    return config_from_dict(obj)


def load_prompts(path: str) -> list[str]:
    """One prompt per line; blank lines skipped."""
    with open(path, encoding="utf-8") as fh:
        prompts = [line.strip() for line in fh if line.strip()]
    if not prompts:
        raise ValueError(f"no prompts in {path}")
    return prompts
