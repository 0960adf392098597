"""Box arithmetic and image resampling.

Detections arrive as xyxy rectangles; crops leave as squares. A margin
proportional to the larger side is added first, then the box is squared
around its center, shifted back inside the frame if it overhangs, and
shrunk only when it is larger than the frame itself.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError


def margined_square(box, margin: float, frame_h: int, frame_w: int):
    """(x1, y1, x2, y2) -> (x, y, side), square and inside the frame."""
    x1, y1, x2, y2 = (float(v) for v in box)
    if x2 <= x1 or y2 <= y1:
        raise ConfigError(f"degenerate box {box!r}")
    w = x2 - x1
    h = y2 - y1
    pad = margin * max(w, h)
    side = max(w, h) + 2.0 * pad
    side = min(side, float(frame_h), float(frame_w))
    cx = (x1 + x2) / 2.0
    cy = (y1 + y2) / 2.0
    x = min(max(cx - side / 2.0, 0.0), frame_w - side)
    y = min(max(cy - side / 2.0, 0.0), frame_h - side)
    return x, y, side


def resize_image(image, out_hw):
    """Bilinear resize of an (h, w, c) image, half-pixel aligned."""
    image = np.asarray(image, np.float64)
    h, w = image.shape[0], image.shape[1]
    oh, ow = int(out_hw[0]), int(out_hw[1])
    if (h, w) == (oh, ow):
        return image.astype(np.float32)

    def axis_coords(src, dst):
        pos = (np.arange(dst) + 0.5) * (src / dst) - 0.5
        pos = np.clip(pos, 0.0, src - 1.0)
        lo = np.floor(pos).astype(np.int64)
        hi = np.minimum(lo + 1, src - 1)
        return lo, hi, (pos - lo)

    ylo, yhi, yf = axis_coords(h, oh)
    xlo, xhi, xf = axis_coords(w, ow)
    yf = yf[:, None, None]
    xf = xf[None, :, None]
    top = image[ylo][:, xlo] * (1.0 - xf) + image[ylo][:, xhi] * xf
    bottom = image[yhi][:, xlo] * (1.0 - xf) + image[yhi][:, xhi] * xf
    return (top * (1.0 - yf) + bottom * yf).astype(np.float32)


def crop_resize(frame, x: float, y: float, side: float, out_hw):
    """Cut a square region out of an (h, w, c) frame and resize it."""
    h, w = frame.shape[0], frame.shape[1]
    x1 = int(np.floor(x))
    y1 = int(np.floor(y))
    x2 = min(int(np.ceil(x + side)), w)
    y2 = min(int(np.ceil(y + side)), h)
    x1 = max(min(x1, x2 - 1), 0)
    y1 = max(min(y1, y2 - 1), 0)
    return resize_image(frame[y1:y2, x1:x2], out_hw)
