"""Patch partition: turn fused streams into the three kinds of patch sets.

Spatial patches summarize where things are (time-averaged local maps cut
into cells), temporal patches summarize how they move (adjacent-frame
differences pooled per step), and high-level patches summarize the scene
(a temporal pyramid over the global stream, one patch per frame).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .config import PipelineConfig
from .errors import DimensionError
from .feature_io import ClipFeatures
from .fusion import build_global_features, build_local_features
from .tensor_ops import avg_pool_2d, global_pool_2d, temporal_global_pool, temporal_max_pool

KINDS = ("spatial", "temporal", "highlevel")


class StageMode(enum.Enum):
    MEMORIZE = "memorize"
    INFER = "infer"


@dataclass(frozen=True)
class PatchSet:
    """Patches from one clip: rows of `patches` with per-row provenance."""

    kind: str
    video_id: str
    anchor_frame: int
    patches: np.ndarray         # (m, dim) float32
    frame_index: np.ndarray     # (m,) int64
    object_index: np.ndarray    # (m,) int64, -1 for frame-level patches

    @property
    def count(self) -> int:
        return int(self.patches.shape[0])

    @property
    def dim(self) -> int:
        return int(self.patches.shape[1])


def _empty(kind, clip, dim):
    return PatchSet(kind, clip.video_id, int(clip.anchor_frame),
                    np.zeros((0, dim), np.float32),
                    np.zeros(0, np.int64), np.zeros(0, np.int64))


def spatial_patches(lf, clip: ClipFeatures, config: PipelineConfig) -> PatchSet:
    """Time-average each object's local map and cut it into grid cells.

    lf is (n, c', d, h, w); the result holds n * h_cells * w_cells patches
    of dimension c', object-major, row-major over the cell grid.
    """
    if lf.shape[0] == 0:
        return _empty("spatial", clip, config.c_prime)
    mean_map = temporal_global_pool(lf, axis=2)     # (n, c', h, w)
    h, w = mean_map.shape[-2:]
    kh, kw = config.spatial_kernel
    if h < kh or w < kw:
        raise DimensionError(
            f"clip {clip.video_id!r}: local map ({h}, {w}) smaller than spatial kernel {config.spatial_kernel}"
        )
    cells = avg_pool_2d(mean_map, config.spatial_kernel, config.spatial_stride, padding="valid")
    n, cp, hh, ww = cells.shape
    patches = np.transpose(cells, (0, 2, 3, 1)).reshape(n * hh * ww, cp)
    obj = np.repeat(np.arange(n, dtype=np.int64), hh * ww)
    frame = np.full(n * hh * ww, int(clip.anchor_frame), np.int64)
    return PatchSet("spatial", clip.video_id, int(clip.anchor_frame),
                    np.ascontiguousarray(patches), frame, obj)


def temporal_patches(lf, clip: ClipFeatures, config: PipelineConfig, mode: StageMode) -> PatchSet:
    """Pool each object's adjacent-frame difference maps, one patch per step.

    The map for step t is |lf[t+1] - lf[t]| collapsed over space: average
    pooling while memorizing, max pooling at inference.  Max surfaces the
    sharpest local change, which average pooling would wash out, so a step
    only scores low when the bank holds a motion at least as strong.
    """
    if lf.shape[0] == 0:
        return _empty("temporal", clip, config.c_prime)
    diffs = np.abs(np.diff(lf.astype(np.float64), axis=2)).astype(np.float32)  # (n, c', d-1, h, w)
    pool = "avg" if mode is StageMode.MEMORIZE else "max"
    pooled = global_pool_2d(diffs, pool)            # (n, c', d-1)
    n, cp, steps = pooled.shape
    patches = np.transpose(pooled, (0, 2, 1)).reshape(n * steps, cp)
    obj = np.repeat(np.arange(n, dtype=np.int64), steps)
    frame = np.tile(clip.frame_indices[1:], n)
    return PatchSet("temporal", clip.video_id, int(clip.anchor_frame),
                    np.ascontiguousarray(patches), frame, obj)


def temporal_pyramid(gf, levels: int):
    """Sum of repeated adjacent-max passes over the time axis.

    gf is (c, d); level 0 is gf itself and each further level applies one
    more adjacent-max, so every frame vector absorbs up to `levels` steps
    of its future.
    """
    acc = gf.astype(np.float64)
    cur = gf
    for _ in range(levels):
        cur = temporal_max_pool(cur)
        acc += cur
    return acc.astype(np.float32)


def highlevel_patches(gf, clip: ClipFeatures, config: PipelineConfig) -> PatchSet:
    """One patch per frame from the pyramid-pooled global stream."""
    pooled = temporal_pyramid(gf, config.pyramid_levels)   # (c, d)
    patches = np.ascontiguousarray(pooled.T)               # (d, c)
    frame = clip.frame_indices.copy()
    obj = np.full(clip.d, -1, np.int64)
    return PatchSet("highlevel", clip.video_id, int(clip.anchor_frame), patches, frame, obj)


@dataclass(frozen=True)
class ClipPatchSets:
    spatial: PatchSet
    temporal: PatchSet
    highlevel: PatchSet

    def by_kind(self, kind: str) -> PatchSet:
        return getattr(self, kind)

    @property
    def has_objects(self) -> bool:
        return self.spatial.count > 0


def compute_patch_sets(clip: ClipFeatures, config: PipelineConfig, mode: StageMode) -> ClipPatchSets:
    """Run fusion and all three partitions for one clip."""
    lf = build_local_features(clip, config)
    gf = build_global_features(clip, config)
    return ClipPatchSets(
        spatial=spatial_patches(lf, clip, config),
        temporal=temporal_patches(lf, clip, config, mode),
        highlevel=highlevel_patches(gf, clip, config),
    )
