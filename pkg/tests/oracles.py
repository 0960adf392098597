"""Naive reference implementations used as oracles by the test suite.

Everything here is written as plain loops over definitions, independent of
the library's vectorized code paths, and deliberately slow.
"""

import math

import numpy as np


def avg_pool_2d(x, kernel, stride, padding="same"):
    x = np.asarray(x, np.float64)
    kh, kw = kernel
    sh, sw = stride
    h, w = x.shape[-2:]
    if padding == "same":
        out_h = math.ceil(h / sh)
        out_w = math.ceil(w / sw)
        pad_h = max((out_h - 1) * sh + kh - h, 0)
        pad_w = max((out_w - 1) * sw + kw - w, 0)
        top, left = pad_h // 2, pad_w // 2
        pads = [(0, 0)] * (x.ndim - 2) + [(top, pad_h - top), (left, pad_w - left)]
        x = np.pad(x, pads, mode="edge")
        h, w = x.shape[-2:]
    elif padding == "valid":
        out_h = (h - kh) // sh + 1
        out_w = (w - kw) // sw + 1
    else:
        raise ValueError(padding)
    lead = x.shape[:-2]
    out = np.zeros(lead + (out_h, out_w))
    for idx in np.ndindex(*lead) if lead else [()]:
        for i in range(out_h):
            for j in range(out_w):
                block = x[idx + (slice(i * sh, i * sh + kh), slice(j * sw, j * sw + kw))]
                out[idx + (i, j)] = block.mean()
    return out


def resample_bilinear(x, out_h, out_w):
    x = np.asarray(x, np.float64)
    h, w = x.shape[-2:]
    lead = x.shape[:-2]
    out = np.zeros(lead + (out_h, out_w))
    for idx in np.ndindex(*lead) if lead else [()]:
        for i in range(out_h):
            sy = min(max((i + 0.5) * h / out_h - 0.5, 0.0), h - 1.0)
            y0 = int(math.floor(sy))
            y1 = min(y0 + 1, h - 1)
            fy = sy - y0
            for j in range(out_w):
                sx = min(max((j + 0.5) * w / out_w - 0.5, 0.0), w - 1.0)
                x0 = int(math.floor(sx))
                x1 = min(x0 + 1, w - 1)
                fx = sx - x0
                top = x[idx + (y0, x0)] * (1 - fx) + x[idx + (y0, x1)] * fx
                bot = x[idx + (y1, x0)] * (1 - fx) + x[idx + (y1, x1)] * fx
                out[idx + (i, j)] = top * (1 - fy) + bot * fy
    return out


def split_pool(x, c_prime, axis=1):
    # group sizes: first (c mod c') groups get ceil(c/c'), the rest floor(c/c')
    x = np.asarray(x, np.float64)
    c = x.shape[axis]
    n_large = c % c_prime
    sizes = [c // c_prime + 1] * n_large + [c // c_prime] * (c_prime - n_large)
    out_slices = []
    start = 0
    for size in sizes:
        sl = [slice(None)] * x.ndim
        sl[axis] = slice(start, start + size)
        out_slices.append(x[tuple(sl)].mean(axis=axis, keepdims=True))
        start += size
    return np.concatenate(out_slices, axis=axis)


def temporal_max_pool(seq):
    seq = np.asarray(seq)
    d = seq.shape[-1]
    out = np.empty_like(seq)
    for t in range(d):
        out[..., t] = np.maximum(seq[..., t], seq[..., min(t + 1, d - 1)])
    return out


def temporal_pyramid(gf, levels):
    total = np.asarray(gf, np.float64).copy()
    cur = np.asarray(gf, np.float64)
    for _ in range(levels):
        cur = temporal_max_pool(cur)
        total = total + cur
    return total


def nearest(bank, query):
    best_d, best_i = None, None
    for i, item in enumerate(bank):
        d = math.dist([float(v) for v in item], [float(v) for v in query])
        if best_d is None or d < best_d:
            best_d, best_i = d, i
    return best_d, best_i


def window_score(patches, bank):
    worst = 0.0
    for p in patches:
        d, _ = nearest(bank, p)
        worst = max(worst, d)
    return worst


def greedy_step_is_optimal(points, selected, pick):
    """Check one farthest-point step: pick maximizes min-distance over the
    remaining candidates, lowest index wins ties."""
    points = np.asarray(points, np.float64)
    candidates = [i for i in range(len(points)) if i not in set(selected)]
    def min_dist(i):
        return min(float(((points[i] - points[j]) ** 2).sum()) for j in selected)
    best = max(min_dist(i) for i in candidates)
    winners = [i for i in candidates if min_dist(i) == best]
    return pick == min(winners)


def coverage_radius(points, bank_items):
    points = np.asarray(points, np.float64)
    worst = 0.0
    for p in points:
        d, _ = nearest(bank_items, p)
        worst = max(worst, d)
    return worst


def auroc_pairwise(scores, labels):
    scores = np.asarray(scores, np.float64)
    labels = np.asarray(labels)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    total = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                total += 1.0
            elif p == n:
                total += 0.5
    return total / (len(pos) * len(neg))


def gaussian_smooth(x, sigma):
    x = np.asarray(x, np.float64)
    if sigma <= 0:
        return x.copy()
    radius = math.ceil(3 * sigma)
    out = np.zeros_like(x)
    for t in range(len(x)):
        num = 0.0
        den = 0.0
        for k in range(-radius, radius + 1):
            if 0 <= t + k < len(x):
                w = math.exp(-(k * k) / (2 * sigma * sigma))
                num += w * x[t + k]
                den += w
        out[t] = num / den
    return out
