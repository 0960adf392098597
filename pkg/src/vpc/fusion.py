"""Feature fusion: combine two backbone layers into the two working streams.

The local stream keeps per-object spatial maps at the finer (layer-2)
resolution with channels compressed to c' by grouped averaging; the global
stream summarizes whole frames at the coarser (layer-3) resolution into a
single vector per frame.
"""

from __future__ import annotations

import numpy as np

from .config import PipelineConfig
from .errors import DimensionError, ParameterError
from .feature_io import ClipFeatures
from .tensor_ops import avg_pool_2d, global_pool_2d, resample_2d


def _group_indices(c, c_prime, grouping):
    if c_prime < 1:
        raise ParameterError(f"c_prime must be positive, got {c_prime}")
    if c_prime > c:
        raise ParameterError(f"c_prime {c_prime} exceeds channel count {c}")
    if grouping == "contiguous":
        base, extra = divmod(c, c_prime)
        groups = []
        start = 0
        for j in range(c_prime):
            size = base + (1 if j < extra else 0)
            groups.append(np.arange(start, start + size))
            start += size
        return groups
    if grouping == "strided":
        return [np.arange(j, c, c_prime) for j in range(c_prime)]
    raise ParameterError(f"unknown channel grouping {grouping!r}")


def split_pool(x, c_prime, axis=1, grouping="contiguous"):
    """Average contiguous (or strided) channel groups down to c' channels.

    With c not divisible by c', the larger groups come first: c=5, c'=2
    yields group sizes (3, 2).
    """
    x = np.asarray(x)
    c = x.shape[axis]
    groups = _group_indices(c, c_prime, grouping)
    pieces = [x.take(idx, axis=axis).mean(axis=axis, dtype=np.float64, keepdims=True)
              for idx in groups]
    return np.concatenate(pieces, axis=axis).astype(np.float32)


def _smooth(maps, config: PipelineConfig):
    # maps: (..., c, h, w); the aggregation pool runs per map with same padding
    return avg_pool_2d(maps, config.fusion_kernel, config.fusion_stride, padding="same")


def build_local_features(clip: ClipFeatures, config: PipelineConfig):
    """Per-object fused maps, shaped (n, c', d, h2, w2).

    Both layers are smoothed by the aggregation pool, layer 3 is upsampled
    to layer 2's grid, channels are concatenated layer-2 first, then
    grouped down to c'.  A clip with no objects yields an (0, ...) array.
    """
    d = clip.d
    if clip.n == 0:
        return np.zeros((0, config.c_prime, d, 0, 0), np.float32)
    h2, w2 = clip.object_layer2.shape[-2:]
    sm2 = _smooth(clip.object_layer2, config)
    sm3 = _smooth(clip.object_layer3, config)
    up3 = resample_2d(sm3, sm2.shape[-2], sm2.shape[-1])
    fused = np.concatenate([sm2, up3], axis=2)      # (n, d, c2+c3, h, w)
    fused = np.transpose(fused, (0, 2, 1, 3, 4))    # (n, c, d, h, w)
    return split_pool(fused, config.c_prime, axis=1, grouping=config.channel_grouping)


def build_global_features(clip: ClipFeatures, config: PipelineConfig):
    """Whole-frame fused vectors, shaped (c, d).

    Layer 2 is downsampled to layer 3's grid, channels concatenate layer-3
    first, and each frame map collapses to avg-pool + max-pool summed.
    """
    sm2 = _smooth(clip.frame_layer2, config)
    sm3 = _smooth(clip.frame_layer3, config)
    down2 = resample_2d(sm2, sm3.shape[-2], sm3.shape[-1])
    fused = np.concatenate([sm3, down2], axis=1)    # (d, c3+c2, h, w)
    pooled = global_pool_2d(fused, "avg").astype(np.float64)
    pooled += global_pool_2d(fused, "max").astype(np.float64)
    return np.transpose(pooled.astype(np.float32), (1, 0))  # (c, d)
