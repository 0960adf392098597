"""Pipeline configuration, presets, and the geometry fingerprint.

The fingerprint hashes exactly the fields that determine patch geometry
and dimensionality.  Banks record it at build time; scoring against a
bank with a different fingerprint is refused unless explicitly overridden,
since the nearest-neighbor distances would be meaningless.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace
from importlib import resources

from .errors import ParameterError

ANCHORS = ("last", "middle")
STRATEGIES = ("per_video_then_concat", "concat_then_subsample")
NORMALIZATIONS = ("testset", "per_video")
NO_OBJECT_POLICIES = ("min_observed", "zero")
CHANNEL_GROUPINGS = ("contiguous", "strided")

_FINGERPRINT_FIELDS = (
    "d", "c_prime", "fusion_kernel", "fusion_stride",
    "spatial_kernel", "spatial_stride", "pyramid_levels", "channel_grouping",
)


@dataclass(frozen=True)
class PipelineConfig:
    d: int = 4
    anchor: str = "last"
    c_prime: int = 64
    fusion_kernel: tuple = (3, 3)
    fusion_stride: tuple = (1, 1)
    spatial_kernel: tuple = (4, 4)
    spatial_stride: tuple = (4, 4)
    pyramid_levels: int = 2
    delta: tuple = (0.5, 0.5)
    gamma: tuple = (0.9, 0.1)
    ratio_spatial: float = 0.01
    ratio_temporal: float = 0.25
    ratio_highlevel: float = 0.10
    strategy: str = "per_video_then_concat"
    seed: int = 0
    smoothing_sigma: float = 3.0
    normalization: str = "testset"
    no_object_policy: str = "min_observed"
    channel_grouping: str = "contiguous"

    def __post_init__(self):
        for name in ("fusion_kernel", "fusion_stride", "spatial_kernel", "spatial_stride",
                     "delta", "gamma"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    def validate(self):
        if self.d < 2:
            raise ParameterError(f"window length d must be >= 2, got {self.d}")
        if self.anchor not in ANCHORS:
            raise ParameterError(f"anchor must be one of {ANCHORS}, got {self.anchor!r}")
        if self.c_prime < 1:
            raise ParameterError(f"c_prime must be positive, got {self.c_prime}")
        for name in ("fusion_kernel", "fusion_stride", "spatial_kernel", "spatial_stride"):
            pair = getattr(self, name)
            if len(pair) != 2 or min(pair) < 1:
                raise ParameterError(f"{name} must be two positive ints, got {pair}")
        if self.pyramid_levels < 0:
            raise ParameterError(f"pyramid_levels must be >= 0, got {self.pyramid_levels}")
        for name in ("delta", "gamma"):
            pair = getattr(self, name)
            if len(pair) != 2 or min(pair) < 0 or abs(sum(pair) - 1.0) > 1e-9:
                raise ParameterError(f"{name} must be two nonnegative weights summing to 1, got {pair}")
        for name in ("ratio_spatial", "ratio_temporal", "ratio_highlevel"):
            r = getattr(self, name)
            if not 0.0 < r <= 1.0:
                raise ParameterError(f"{name} must lie in (0, 1], got {r}")
        if self.strategy not in STRATEGIES:
            raise ParameterError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.smoothing_sigma < 0:
            raise ParameterError(f"smoothing_sigma must be >= 0, got {self.smoothing_sigma}")
        if self.normalization not in NORMALIZATIONS:
            raise ParameterError(f"normalization must be one of {NORMALIZATIONS}")
        if self.no_object_policy not in NO_OBJECT_POLICIES:
            raise ParameterError(f"no_object_policy must be one of {NO_OBJECT_POLICIES}")
        if self.channel_grouping not in CHANNEL_GROUPINGS:
            raise ParameterError(f"channel_grouping must be one of {CHANNEL_GROUPINGS}")
        return self

    def fingerprint(self) -> str:
        payload = {name: getattr(self, name) for name in _FINGERPRINT_FIELDS}
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=list)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def ratio_for(self, kind: str) -> float:
        try:
            return {"spatial": self.ratio_spatial,
                    "temporal": self.ratio_temporal,
                    "highlevel": self.ratio_highlevel}[kind]
        except KeyError:
            raise ParameterError(f"unknown bank kind {kind!r}") from None

    def to_dict(self) -> dict:
        out = asdict(self)
        for name in ("fusion_kernel", "fusion_stride", "spatial_kernel", "spatial_stride",
                     "delta", "gamma"):
            out[name] = list(out[name])
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"unknown config fields: {sorted(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def with_overrides(self, **kwargs) -> "PipelineConfig":
        cfg = replace(self, **kwargs)
        cfg.validate()
        return cfg


def save_config(config: PipelineConfig, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_config(path) -> PipelineConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return PipelineConfig.from_dict(json.load(fh))


def load_preset(name: str) -> PipelineConfig:
    """Load a named built-in preset (avenue, shtech, corridor)."""
    try:
        text = resources.files("vpc.presets").joinpath(f"{name}.json").read_text("utf-8")
    except FileNotFoundError:
        raise ParameterError(f"unknown preset {name!r}") from None
    return PipelineConfig.from_dict(json.loads(text))


def preset_names():
    files = resources.files("vpc.presets")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))
