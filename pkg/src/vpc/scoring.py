"""Window scoring and score fusion.

A window's score against one bank is the max over its patches of the
nearest-neighbor distance: one patch far from everything remembered is
enough to flag the window.  Local streams fuse by fixed weights into LAS,
the global stream is GAS, both are z-normalized over a score population
and combined, then frame scores come from window anchors with Gaussian
smoothing on top.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .config import PipelineConfig
from .errors import ParameterError, ValidationError
from .memory import MemoryBank
from .partition import KINDS, ClipPatchSets

CSV_COLUMNS = ("video_id", "frame_index", "s_spatial", "s_temporal",
               "s_highlevel", "fused_score", "las", "has_objects")


@dataclass(frozen=True)
class WindowScore:
    """Raw per-window bank distances; None marks a stream with no patches."""

    video_id: str
    anchor_frame: int
    frame_indices: np.ndarray
    s_spatial: float | None
    s_temporal: float | None
    s_highlevel: float

    @property
    def has_objects(self) -> bool:
        return self.s_spatial is not None


def window_bank_score(patch_set, bank: MemoryBank):
    """Max over the window's patches of nearest-bank distance; None if empty."""
    if patch_set.count == 0:
        return None
    dists, _ = bank.nearest(patch_set.patches)
    return float(dists.max())


def score_windows(window_patch_sets, banks) -> list[WindowScore]:
    """Score many windows against the three banks in one batched pass.

    Patches of each kind are concatenated across windows so the bank is
    queried once, then maxima are read back per window.
    """
    maxima = {}
    for kind in KINDS:
        sets = [ps.by_kind(kind) for ps in window_patch_sets]
        counts = [s.count for s in sets]
        nonempty = [s.patches for s in sets if s.count]
        per_window = [None] * len(sets)
        if nonempty:
            dists, _ = banks[kind].nearest(np.concatenate(nonempty, axis=0))
            offset = 0
            for i, c in enumerate(counts):
                if c:
                    per_window[i] = float(dists[offset:offset + c].max())
                    offset += c
        maxima[kind] = per_window
    out = []
    for i, ps in enumerate(window_patch_sets):
        hl = maxima["highlevel"][i]
        if hl is None:
            raise ValidationError(f"window {ps.highlevel.video_id!r}@{ps.highlevel.anchor_frame} "
                                  "produced no high-level patches")
        out.append(WindowScore(
            video_id=ps.highlevel.video_id,
            anchor_frame=ps.highlevel.anchor_frame,
            frame_indices=ps.highlevel.frame_index.copy(),
            s_spatial=maxima["spatial"][i],
            s_temporal=maxima["temporal"][i],
            s_highlevel=hl,
        ))
    return out


@dataclass(frozen=True)
class FusionParams:
    delta: tuple = (0.5, 0.5)
    gamma: tuple = (0.9, 0.1)
    normalization: str = "testset"
    no_object_policy: str = "min_observed"
    smoothing_sigma: float = 3.0

    @classmethod
    def from_config(cls, config: PipelineConfig) -> "FusionParams":
        return cls(delta=config.delta, gamma=config.gamma,
                   normalization=config.normalization,
                   no_object_policy=config.no_object_policy,
                   smoothing_sigma=config.smoothing_sigma)


@dataclass(frozen=True)
class ScoreSeries:
    """Per-frame scores for one video, anchors spread to full frame range."""

    video_id: str
    frame_index: np.ndarray
    s_spatial: np.ndarray
    s_temporal: np.ndarray
    s_highlevel: np.ndarray
    las: np.ndarray
    fused: np.ndarray
    has_objects: np.ndarray

    @property
    def frame_count(self) -> int:
        return int(self.frame_index.shape[0])


def _zscore(values, groups=None):
    """Population z-score; a constant population maps to all zeros."""
    x = np.asarray(values, np.float64)
    out = np.zeros_like(x)
    if groups is None:
        groups = [np.arange(x.shape[0])]
    for idx in groups:
        part = x[idx]
        if part.size == 0 or np.all(part == part[0]):
            continue
        std = part.std()
        if std == 0.0:
            continue
        out[idx] = (part - part.mean()) / std
    return out


def _resolve_sentinels(values, policy):
    """Replace None entries (windows without objects) with a neutral score."""
    observed = [v for v in values if v is not None]
    if policy == "min_observed":
        fill = min(observed) if observed else 0.0
    elif policy == "zero":
        fill = 0.0
    else:
        raise ParameterError(f"unknown no-object policy {policy!r}")
    return np.array([fill if v is None else v for v in values], np.float64)


def smooth_scores(x, sigma):
    """1D Gaussian smoothing, kernel radius ceil(3*sigma), edges renormalized."""
    x = np.asarray(x, np.float64)
    if sigma <= 0 or x.shape[0] < 2:
        return x.copy()
    radius = int(math.ceil(3.0 * sigma))
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(offsets ** 2) / (2.0 * sigma * sigma))
    # full convolution sliced back to len(x): robust when the kernel is longer
    num = np.convolve(x, kernel, mode="full")[radius:radius + x.shape[0]]
    den = np.convolve(np.ones_like(x), kernel, mode="full")[radius:radius + x.shape[0]]
    return num / den


def fuse_scores(windows, params: FusionParams, frame_counts=None) -> list[ScoreSeries]:
    """Fuse per-window stream scores into smoothed per-frame series.

    LAS = delta1 * spatial + delta2 * temporal, GAS = the high-level score;
    both are z-normalized over the whole population ("testset") or within
    each video ("per_video"), then fused = gamma1 * z(LAS) + gamma2 * z(GAS).
    Each frame takes the score of the window anchored at it; frames before
    the first anchor take the first window's score, frames after the last
    take the last window's.
    """
    if not windows:
        raise ValidationError("no windows to fuse")
    video_ids = []
    for w in windows:
        if w.video_id not in video_ids:
            video_ids.append(w.video_id)
    s_sp = _resolve_sentinels([w.s_spatial for w in windows], params.no_object_policy)
    s_tmp = _resolve_sentinels([w.s_temporal for w in windows], params.no_object_policy)
    s_hl = np.array([w.s_highlevel for w in windows], np.float64)
    las = params.delta[0] * s_sp + params.delta[1] * s_tmp
    gas = s_hl
    vid_of = np.array([video_ids.index(w.video_id) for w in windows])
    if params.normalization == "per_video":
        groups = [np.flatnonzero(vid_of == v) for v in range(len(video_ids))]
    elif params.normalization == "testset":
        groups = None
    else:
        raise ParameterError(f"unknown normalization {params.normalization!r}")
    fused = params.gamma[0] * _zscore(las, groups) + params.gamma[1] * _zscore(gas, groups)

    series = []
    for v, vid in enumerate(video_ids):
        rows = np.flatnonzero(vid_of == v)
        anchors = np.array([windows[i].anchor_frame for i in rows], np.int64)
        order = np.argsort(anchors, kind="stable")
        rows = rows[order]
        anchors = anchors[order]
        if np.unique(anchors).shape[0] != anchors.shape[0]:
            raise ValidationError(f"video {vid!r}: duplicate window anchors")
        top = int(max(w.frame_indices.max() for w in (windows[i] for i in rows)))
        count = top + 1
        if frame_counts is not None:
            declared = int(frame_counts[vid])
            if declared < count:
                raise ValidationError(f"video {vid!r}: frame count {declared} below observed {count}")
            count = declared
        frames = np.arange(count, dtype=np.int64)
        pick = np.clip(np.searchsorted(anchors, frames, side="right") - 1, 0, anchors.shape[0] - 1)
        take = rows[pick]
        series.append(ScoreSeries(
            video_id=vid,
            frame_index=frames,
            s_spatial=s_sp[take],
            s_temporal=s_tmp[take],
            s_highlevel=s_hl[take],
            las=las[take],
            fused=smooth_scores(fused[take], params.smoothing_sigma),
            has_objects=np.array([windows[i].has_objects for i in take], bool),
        ))
    return series


def write_scores_csv(series, sink):
    """Write per-frame scores; float cells use repr so runs are byte-stable."""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for s in series:
        for i in range(s.frame_count):
            writer.writerow([
                s.video_id,
                int(s.frame_index[i]),
                repr(float(s.s_spatial[i])),
                repr(float(s.s_temporal[i])),
                repr(float(s.s_highlevel[i])),
                repr(float(s.fused[i])),
                repr(float(s.las[i])),
                int(s.has_objects[i]),
            ])


def read_scores_csv(source) -> list[ScoreSeries]:
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or tuple(header) != CSV_COLUMNS:
        raise ValidationError(f"unexpected CSV columns: {header}")
    by_video = {}
    for row in reader:
        if len(row) != len(CSV_COLUMNS):
            raise ValidationError(f"malformed CSV row: {row}")
        by_video.setdefault(row[0], []).append(row)
    series = []
    for vid, rows in by_video.items():
        frames = np.array([int(r[1]) for r in rows], np.int64)
        if not (np.diff(frames) == 1).all() or frames[0] != 0:
            raise ValidationError(f"video {vid!r}: frame indices are not contiguous from 0")
        series.append(ScoreSeries(
            video_id=vid,
            frame_index=frames,
            s_spatial=np.array([float(r[2]) for r in rows]),
            s_temporal=np.array([float(r[3]) for r in rows]),
            s_highlevel=np.array([float(r[4]) for r in rows]),
            las=np.array([float(r[6]) for r in rows]),
            fused=np.array([float(r[5]) for r in rows]),
            has_objects=np.array([bool(int(r[7])) for r in rows]),
        ))
    return series


def write_scores_csv_path(series, path):
    with open(path, "w", encoding="utf-8", newline="") as sink:
        write_scores_csv(series, sink)


def read_scores_csv_path(path) -> list[ScoreSeries]:
    with open(path, "r", encoding="utf-8", newline="") as source:
        return read_scores_csv(source)
