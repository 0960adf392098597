"""Synthetic backbone features with plantable anomalies.

Videos are generated as smooth per-channel signals (a per-object base
value, an AR(1) wiggle over time shared by all pixels, and iid pixel
noise), so normal content is temporally coherent and a coreset has real
structure to cover.  Three anomaly kinds target the three memories:

* appearance: a constant shift on one object's maps.  Visible to the
  spatial memory; invisible to the temporal memory because adjacent-frame
  differences are unchanged inside the shifted range.
* motion: a zero-mean cosine shift on one object, period equal to the
  window length, so any full window's time average cancels.  Visible to
  the temporal memory; nearly invisible to the spatial one.
* scene: a constant shift on the whole frame's maps, objects untouched.
  Visible only to the high-level memory.

A magnitude of exactly 0 skips the perturbation entirely, producing
bit-identical output to the same spec without the event.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError
from .feature_io import ClipFeatures

ANOMALY_KINDS = ("appearance", "motion", "scene")


@dataclass(frozen=True)
class AnomalyEvent:
    """One planted anomaly on a test video, frames [start, stop)."""

    video: int
    start: int
    stop: int
    kind: str
    magnitude: float


@dataclass(frozen=True)
class SynthSpec:
    seed: int = 0
    videos_train: int = 4
    videos_test: int = 4
    frames_per_video: int = 40
    d: int = 4
    anchor: str = "last"
    min_objects: int = 1
    max_objects: int = 3
    layer2_channels: int = 16
    layer2_size: int = 8
    layer3_channels: int = 32
    layer3_size: int = 4
    object_std: float = 1.0
    temporal_rho: float = 0.9
    wiggle_std: float = 0.1
    pixel_std: float = 0.05
    anomalies: tuple = field(default_factory=tuple)

    def __post_init__(self):
        events = tuple(
            ev if isinstance(ev, AnomalyEvent) else AnomalyEvent(**ev)
            for ev in self.anomalies
        )
        object.__setattr__(self, "anomalies", events)

    def validate(self):
        if self.frames_per_video < self.d:
            raise ParameterError(
                f"frames_per_video {self.frames_per_video} shorter than window d={self.d}"
            )
        if self.d < 2:
            raise ParameterError(f"window length d must be >= 2, got {self.d}")
        if self.anchor not in ("last", "middle"):
            raise ParameterError(f"anchor must be last or middle, got {self.anchor!r}")
        if not 0 <= self.min_objects <= self.max_objects:
            raise ParameterError(
                f"need 0 <= min_objects <= max_objects, got {self.min_objects}, {self.max_objects}"
            )
        if self.videos_train < 1 or self.videos_test < 0:
            raise ParameterError("need at least one training video")
        for knob in ("object_std", "wiggle_std", "pixel_std"):
            if getattr(self, knob) < 0:
                raise ParameterError(f"{knob} must be >= 0")
        if not 0.0 <= self.temporal_rho < 1.0:
            raise ParameterError(f"temporal_rho must lie in [0, 1), got {self.temporal_rho}")
        for ev in self.anomalies:
            if ev.kind not in ANOMALY_KINDS:
                raise ParameterError(f"unknown anomaly kind {ev.kind!r}")
            if not 0 <= ev.video < self.videos_test:
                raise ParameterError(f"anomaly video {ev.video} out of range")
            if not 0 <= ev.start < ev.stop <= self.frames_per_video:
                raise ParameterError(f"anomaly range [{ev.start}, {ev.stop}) invalid")
            if ev.magnitude < 0:
                raise ParameterError(f"anomaly magnitude must be >= 0, got {ev.magnitude}")
            if ev.kind in ("appearance", "motion") and ev.magnitude > 0 and self.min_objects < 1:
                raise ParameterError(
                    f"{ev.kind} anomalies act on an object; set min_objects >= 1"
                )
        return self

    def to_dict(self) -> dict:
        out = {name: getattr(self, name) for name in self.__dataclass_fields__}
        out["anomalies"] = [vars(ev) for ev in self.anomalies]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SynthSpec":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"unknown synth spec fields: {sorted(unknown)}")
        spec = cls(**data)
        spec.validate()
        return spec


@dataclass(frozen=True)
class SynthResult:
    train_clips: list
    test_clips: list
    labels: dict
    frame_counts: dict


def _ar1(rng, shape, frames_axis, rho, std):
    """Stationary AR(1) noise along one axis, marginal stddev = std."""
    eps = rng.standard_normal(shape)
    out = np.empty_like(eps)
    idx = [slice(None)] * eps.ndim
    idx[frames_axis] = 0
    out[tuple(idx)] = eps[tuple(idx)]
    innov = math.sqrt(1.0 - rho * rho)
    for t in range(1, shape[frames_axis]):
        prev = list(idx)
        prev[frames_axis] = t - 1
        cur = list(idx)
        cur[frames_axis] = t
        out[tuple(cur)] = rho * out[tuple(prev)] + innov * eps[tuple(cur)]
    return std * out


def _video_maps(rng, spec: SynthSpec):
    """Full-length maps for one video: objects (n,F,c,h,w), frames (F,c,h,w)."""
    F = spec.frames_per_video
    n = int(rng.integers(spec.min_objects, spec.max_objects + 1))
    layers = ((spec.layer2_channels, spec.layer2_size),
              (spec.layer3_channels, spec.layer3_size))
    objects = []
    for c, s in layers:
        base = rng.normal(0.0, spec.object_std, (n, 1, c, 1, 1))
        wiggle = _ar1(rng, (n, F, c), 1, spec.temporal_rho, spec.wiggle_std)[..., None, None]
        pixel = spec.pixel_std * rng.standard_normal((n, F, c, s, s))
        objects.append((base + wiggle + pixel).astype(np.float64))
    frames = []
    for c, s in layers:
        base = rng.normal(0.0, spec.object_std, (1, c, 1, 1))
        wiggle = _ar1(rng, (F, c), 0, spec.temporal_rho, spec.wiggle_std)[..., None, None]
        pixel = spec.pixel_std * rng.standard_normal((F, c, s, s))
        frames.append((base + wiggle + pixel).astype(np.float64))
    return n, objects, frames


def _apply_event(ev: AnomalyEvent, index, spec: SynthSpec, objects, frames):
    if ev.magnitude == 0.0:
        return
    sl = slice(ev.start, ev.stop)
    amp = ev.magnitude * spec.object_std
    if ev.kind == "appearance":
        for layer in objects:
            layer[0, sl] += amp
    elif ev.kind == "motion":
        rng = np.random.default_rng(np.random.SeedSequence([spec.seed, 7919, index]))
        phase = rng.uniform(0.0, 2.0 * math.pi)
        t = np.arange(ev.start, ev.stop, dtype=np.float64)
        shift = amp * math.sqrt(2.0) * np.cos(2.0 * math.pi * t / spec.d + phase)
        for layer in objects:
            layer[0, sl] += shift[:, None, None, None]
    elif ev.kind == "scene":
        for layer in frames:
            layer[sl] += amp


def _anchor_offset(d, anchor):
    return d - 1 if anchor == "last" else d // 2


def _windows(video_id, spec: SynthSpec, n, objects, frames):
    F, d = spec.frames_per_video, spec.d
    off = _anchor_offset(d, spec.anchor)
    obj2, obj3 = (layer.astype(np.float32) for layer in objects)
    fr2, fr3 = (layer.astype(np.float32) for layer in frames)
    side = 4.0 * spec.layer2_size
    boxes = np.stack([np.arange(n, dtype=np.float32) * side,
                      np.zeros(n, np.float32),
                      np.full(n, side, np.float32)], axis=1)
    clips = []
    for t0 in range(F - d + 1):
        clips.append(ClipFeatures(
            video_id=video_id,
            anchor_frame=t0 + off,
            frame_indices=np.arange(t0, t0 + d, dtype=np.int64),
            frame_layer2=fr2[t0:t0 + d],
            frame_layer3=fr3[t0:t0 + d],
            object_layer2=obj2[:, t0:t0 + d],
            object_layer3=obj3[:, t0:t0 + d],
            object_boxes=boxes,
        ))
    return clips


def generate(spec: SynthSpec) -> SynthResult:
    """Materialize all train and test clips plus frame labels for a spec."""
    spec.validate()
    children = np.random.SeedSequence(spec.seed).spawn(spec.videos_train + spec.videos_test)
    train_clips = []
    test_clips = []
    labels = {}
    frame_counts = {}
    for i in range(spec.videos_train):
        vid = f"train_{i:03d}"
        rng = np.random.default_rng(children[i])
        n, objects, frames = _video_maps(rng, spec)
        train_clips.extend(_windows(vid, spec, n, objects, frames))
        frame_counts[vid] = spec.frames_per_video
    for j in range(spec.videos_test):
        vid = f"test_{j:03d}"
        rng = np.random.default_rng(children[spec.videos_train + j])
        n, objects, frames = _video_maps(rng, spec)
        lab = np.zeros(spec.frames_per_video, np.int64)
        for index, ev in enumerate(spec.anomalies):
            if ev.video != j:
                continue
            _apply_event(ev, index, spec, objects, frames)
            if ev.magnitude > 0:
                lab[ev.start:ev.stop] = 1
        test_clips.extend(_windows(vid, spec, n, objects, frames))
        labels[vid] = lab
        frame_counts[vid] = spec.frames_per_video
    return SynthResult(train_clips, test_clips, labels, frame_counts)


def save_spec(spec: SynthSpec, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spec.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_spec(path) -> SynthSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return SynthSpec.from_dict(json.load(fh))
