"""Extraction settings and the named per-dataset presets."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

from .errors import ConfigError

ANCHORS = ("last", "middle")

# inputs are encoded at this resolution; everything downstream assumes it
RESIZE = (224, 224)


@dataclass(frozen=True)
class ExtractionConfig:
    """Everything `extract` needs besides the backends themselves.

    `inputs` lists video paths (files or frame directories); `margin` is
    the fraction of the larger box side added on every edge before the
    box is squared; detections under `confidence` are dropped.
    """

    d: int = 4
    anchor: str = "last"
    margin: float = 0.10
    confidence: float = 0.25
    resize: tuple = RESIZE
    inputs: tuple = ()
    detector: str = "brightness"
    encoder: str = "fake"

    def __post_init__(self):
        object.__setattr__(self, "resize", tuple(int(v) for v in self.resize))
        object.__setattr__(self, "inputs", tuple(str(p) for p in self.inputs))

    def validate(self) -> None:
        if self.d < 2:
            raise ConfigError(f"window length d must be at least 2, got {self.d}")
        if self.anchor not in ANCHORS:
            raise ConfigError(f"anchor must be one of {ANCHORS}, got {self.anchor!r}")
        if self.margin < 0.0:
            raise ConfigError(f"margin must be non-negative, got {self.margin}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ConfigError(f"confidence must lie in [0, 1], got {self.confidence}")
        if self.resize != RESIZE:
            raise ConfigError(f"resize is fixed at {RESIZE}, got {self.resize}")

    def anchor_offset(self) -> int:
        return self.d - 1 if self.anchor == "last" else self.d // 2

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["resize"] = list(self.resize)
        out["inputs"] = list(self.inputs)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExtractionConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        config = cls(**data)
        config.validate()
        return config

    def with_overrides(self, **changes) -> "ExtractionConfig":
        config = dataclasses.replace(self, **changes)
        config.validate()
        return config


# window lengths and anchor policies matched to the scoring presets of
# the same names
PRESETS = {
    "avenue": {"d": 10, "anchor": "middle"},
    "shtech": {"d": 4, "anchor": "last"},
    "corridor": {"d": 4, "anchor": "last"},
}


def load_preset(name: str) -> ExtractionConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    return ExtractionConfig.from_dict(PRESETS[name])


def save_config(config: ExtractionConfig, path) -> None:
    config.validate()
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_config(path) -> ExtractionConfig:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return ExtractionConfig.from_dict(data)
