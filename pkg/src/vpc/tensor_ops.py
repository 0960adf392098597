"""Pooling and resampling primitives shared across the pipeline.

All operations accumulate in float64 and return float32 arrays; spatial
operators act on the trailing (h, w) axes of an array with any number of
leading axes.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DimensionError, ParameterError


def _check_kernel(kernel, stride):
    kh, kw = kernel
    sh, sw = stride
    if min(kh, kw) < 1 or min(sh, sw) < 1:
        raise ParameterError(f"kernel {kernel} and stride {stride} must be positive")
    return kh, kw, sh, sw


def avg_pool_2d(x, kernel, stride, padding="same"):
    """Average-pool the trailing (h, w) axes.

    padding="same" edge-replicates so the output grid is ceil(h/sh) by
    ceil(w/sw); "valid" uses only fully covered windows.  Replication
    spreads (kernel-1) pads asymmetrically, the smaller share on top/left.
    """
    x = np.asarray(x)
    if x.ndim < 2:
        raise DimensionError(f"need at least 2 dims, got {x.ndim}")
    kh, kw, sh, sw = _check_kernel(kernel, stride)
    h, w = x.shape[-2:]
    if padding == "same":
        out_h = -(-h // sh)
        out_w = -(-w // sw)
        pad_h = max((out_h - 1) * sh + kh - h, 0)
        pad_w = max((out_w - 1) * sw + kw - w, 0)
        pads = [(0, 0)] * (x.ndim - 2)
        pads += [(pad_h // 2, pad_h - pad_h // 2), (pad_w // 2, pad_w - pad_w // 2)]
        x = np.pad(x, pads, mode="edge")
    elif padding == "valid":
        if h < kh or w < kw:
            raise DimensionError(f"input ({h}, {w}) smaller than kernel {kernel}")
    else:
        raise ParameterError(f"unknown padding {padding!r}")
    windows = sliding_window_view(x, (kh, kw), axis=(-2, -1))
    windows = windows[..., ::sh, ::sw, :, :]
    out = windows.mean(axis=(-2, -1), dtype=np.float64)
    return out.astype(np.float32)


def global_pool_2d(x, mode):
    """Collapse the trailing (h, w) axes by mean or max."""
    x = np.asarray(x)
    if x.ndim < 2:
        raise DimensionError(f"need at least 2 dims, got {x.ndim}")
    if x.shape[-1] < 1 or x.shape[-2] < 1:
        raise DimensionError(f"cannot global-pool empty spatial axes {x.shape}")
    if mode == "avg":
        return x.mean(axis=(-2, -1), dtype=np.float64).astype(np.float32)
    if mode == "max":
        return x.max(axis=(-2, -1)).astype(np.float32)
    raise ParameterError(f"unknown pool mode {mode!r}")


def temporal_global_pool(x, axis=2):
    """Mean over the time axis of a (..., d, ...) array."""
    x = np.asarray(x)
    if x.shape[axis] < 1:
        raise DimensionError("cannot pool over an empty time axis")
    return x.mean(axis=axis, dtype=np.float64).astype(np.float32)


def temporal_max_pool(x):
    """Max over each pair of adjacent steps on the last axis, same length.

    out[t] = max(x[t], x[t+1]) with the final step compared to itself, so
    applying the operator L times lets each position see up to L steps ahead.
    """
    x = np.asarray(x)
    if x.shape[-1] < 1:
        raise DimensionError("cannot pool an empty sequence")
    shifted = np.concatenate([x[..., 1:], x[..., -1:]], axis=-1)
    return np.maximum(x, shifted)


def resample_2d(x, out_h, out_w):
    """Bilinear resize of the trailing (h, w) axes to (out_h, out_w).

    Uses half-pixel source coordinates, src = (dst + 0.5) * scale - 0.5,
    clamped to the valid range, so a same-size resample is the identity.
    """
    x = np.asarray(x)
    if x.ndim < 2:
        raise DimensionError(f"need at least 2 dims, got {x.ndim}")
    if out_h < 1 or out_w < 1:
        raise ParameterError(f"output size ({out_h}, {out_w}) must be positive")
    h, w = x.shape[-2:]
    if (h, w) == (out_h, out_w):
        return x.astype(np.float32)

    def axis_coords(n_in, n_out):
        pos = (np.arange(n_out, dtype=np.float64) + 0.5) * (n_in / n_out) - 0.5
        pos = np.clip(pos, 0.0, n_in - 1.0)
        lo = np.floor(pos).astype(np.int64)
        hi = np.minimum(lo + 1, n_in - 1)
        frac = pos - lo
        return lo, hi, frac

    ylo, yhi, yfrac = axis_coords(h, out_h)
    xlo, xhi, xfrac = axis_coords(w, out_w)
    x64 = x.astype(np.float64)
    top = x64[..., ylo, :] * (1.0 - yfrac)[:, None] + x64[..., yhi, :] * yfrac[:, None]
    out = top[..., :, xlo] * (1.0 - xfrac) + top[..., :, xhi] * xfrac
    return out.astype(np.float32)
