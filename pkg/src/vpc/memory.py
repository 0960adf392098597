"""Memory banks: greedy coreset subsampling, exact nearest-neighbor lookup,
and the bank file format.

Subsampling is farthest-point greedy: starting from a seed-derived item it
repeatedly adds the point farthest from everything selected so far, which
keeps coverage of the feature space rather than density.  Lookup is exact;
distances go through a float64 inner-product expansion with per-winner
refinement so equal vectors come back at exactly zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigDriftError, CorruptionError, EmptyBankError, FormatError, ParameterError

BANK_MAGIC = b"VPCB"
BANK_VERSION = 1

_QUERY_CHUNK = 512


def subsample_size(count: int, ratio: float) -> int:
    """Target coreset size: round(ratio * count) half-up, at least 1."""
    if not 0.0 < ratio <= 1.0:
        raise ParameterError(f"ratio must lie in (0, 1], got {ratio}")
    return min(count, max(1, int(np.floor(ratio * count + 0.5))))


def coreset_subsample(points, ratio, seed=0, start=None):
    """Greedy farthest-point selection; returns indices in selection order.

    Each step picks the point with the largest distance to the current
    selection (ties resolve to the lowest index).  The start item is
    seed % count unless given explicitly.
    """
    pts = np.asarray(points, dtype=np.float64)
    count = pts.shape[0]
    if count == 0:
        raise EmptyBankError("cannot subsample an empty patch set")
    k = subsample_size(count, ratio)
    if start is None:
        start = int(seed) % count
    elif not 0 <= start < count:
        raise ParameterError(f"start index {start} out of range for {count} points")
    selected = np.empty(k, np.int64)
    selected[0] = start
    if k == 1:
        return selected
    min_d2 = ((pts - pts[start]) ** 2).sum(axis=1)
    # selected entries drop below any real distance so exact duplicates
    # can never re-pick them
    min_d2[start] = -1.0
    for step in range(1, k):
        nxt = int(np.argmax(min_d2))
        selected[step] = nxt
        np.minimum(min_d2, ((pts - pts[nxt]) ** 2).sum(axis=1), out=min_d2)
        min_d2[nxt] = -1.0
    return selected


def nearest_distances(queries, items):
    """Exact Euclidean distance and index of each query's nearest bank item.

    Distances are computed by the expanded inner-product form in float64,
    then the winning pair is recomputed exactly, so identical vectors give
    exactly 0.0.  Ties resolve to the lowest bank index.
    """
    q = np.asarray(queries, dtype=np.float64)
    b = np.asarray(items, dtype=np.float64)
    if b.shape[0] == 0:
        raise EmptyBankError("bank has no items")
    if q.ndim != 2 or b.ndim != 2 or q.shape[1] != b.shape[1]:
        raise ParameterError(f"query dim {q.shape} incompatible with bank {b.shape}")
    m = q.shape[0]
    dists = np.empty(m, np.float64)
    indices = np.empty(m, np.int64)
    b_sq = (b * b).sum(axis=1)
    for lo in range(0, m, _QUERY_CHUNK):
        hi = min(lo + _QUERY_CHUNK, m)
        chunk = q[lo:hi]
        d2 = (chunk * chunk).sum(axis=1)[:, None] - 2.0 * (chunk @ b.T) + b_sq[None, :]
        np.maximum(d2, 0.0, out=d2)
        idx = np.argmin(d2, axis=1)
        diff = chunk - b[idx]
        dists[lo:hi] = np.sqrt((diff * diff).sum(axis=1))
        indices[lo:hi] = idx
    return dists, indices


def nearest_distance(bank, query):
    """Single-query nearest neighbor: (distance, bank index)."""
    items = bank.items if isinstance(bank, MemoryBank) else np.asarray(bank)
    dists, indices = nearest_distances(np.asarray(query, np.float64)[None, :], items)
    return float(dists[0]), int(indices[0])


@dataclass(frozen=True)
class MemoryBank:
    kind: str
    items: np.ndarray           # (k, dim) float32
    ratio: float
    strategy: str
    seed: int
    fingerprint: str
    source_count: int           # patches seen before subsampling

    @property
    def count(self) -> int:
        return int(self.items.shape[0])

    @property
    def dim(self) -> int:
        return int(self.items.shape[1])

    def nearest(self, queries):
        return nearest_distances(queries, self.items)


def build_bank(per_video_patches, kind, ratio, strategy, seed, fingerprint) -> MemoryBank:
    """Subsample per-video patch arrays into one bank.

    per_video_then_concat subsamples each video separately then stacks the
    survivors; concat_then_subsample pools everything first.  Videos with
    no patches are skipped; an entirely empty input is an error.
    """
    arrays = [np.asarray(a, np.float32) for a in per_video_patches if np.asarray(a).shape[0] > 0]
    if not arrays:
        raise EmptyBankError(f"no {kind} patches to memorize")
    dims = {a.shape[1] for a in arrays}
    if len(dims) != 1:
        raise ParameterError(f"{kind} patch dims disagree across videos: {sorted(dims)}")
    total = sum(a.shape[0] for a in arrays)
    if strategy == "per_video_then_concat":
        kept = [a[coreset_subsample(a, ratio, seed=seed)] for a in arrays]
        items = np.concatenate(kept, axis=0)
    elif strategy == "concat_then_subsample":
        pooled = np.concatenate(arrays, axis=0)
        items = pooled[coreset_subsample(pooled, ratio, seed=seed)]
    else:
        raise ParameterError(f"unknown strategy {strategy!r}")
    return MemoryBank(kind=kind, items=np.ascontiguousarray(items, np.float32),
                      ratio=float(ratio), strategy=strategy, seed=int(seed),
                      fingerprint=fingerprint, source_count=total)


def save_bank(bank: MemoryBank, sink) -> int:
    header = json.dumps({
        "count": bank.count,
        "dim": bank.dim,
        "fingerprint": bank.fingerprint,
        "kind": bank.kind,
        "ratio": bank.ratio,
        "seed": bank.seed,
        "source_count": bank.source_count,
        "strategy": bank.strategy,
    }, sort_keys=True, separators=(",", ":")).encode("utf-8")
    sink.write(BANK_MAGIC)
    sink.write(BANK_VERSION.to_bytes(2, "little"))
    sink.write(len(header).to_bytes(4, "little"))
    sink.write(header)
    data = np.ascontiguousarray(bank.items, dtype="<f4")
    sink.write(data.tobytes())
    return 6 + 4 + len(header) + data.nbytes


def load_bank(source, expected_fingerprint=None, allow_mismatch=False) -> MemoryBank:
    head = source.read(6)
    if len(head) < 6 or head[:4] != BANK_MAGIC:
        raise FormatError(f"not a bank file: bad magic {head[:4]!r}")
    version = int.from_bytes(head[4:6], "little")
    if version != BANK_VERSION:
        raise FormatError(f"unsupported bank version {version}")
    raw_len = source.read(4)
    if len(raw_len) < 4:
        raise CorruptionError("truncated bank header length")
    header_len = int.from_bytes(raw_len, "little")
    header_bytes = source.read(header_len)
    if len(header_bytes) != header_len:
        raise CorruptionError("truncated bank header")
    try:
        header = json.loads(header_bytes)
        count, dim = int(header["count"]), int(header["dim"])
        kind = header["kind"]
        fingerprint = header["fingerprint"]
    except (ValueError, KeyError, TypeError) as exc:
        raise CorruptionError(f"unparseable bank header: {exc}") from exc
    payload = source.read(4 * count * dim)
    if len(payload) != 4 * count * dim:
        raise CorruptionError(
            f"bank payload truncated: wanted {4 * count * dim} bytes, got {len(payload)}"
        )
    items = np.frombuffer(payload, dtype="<f4").reshape(count, dim).copy()
    if expected_fingerprint is not None and fingerprint != expected_fingerprint and not allow_mismatch:
        raise ConfigDriftError(
            f"{kind} bank was built under fingerprint {fingerprint[:12]}..., "
            f"current config is {expected_fingerprint[:12]}...; "
            "pass allow_mismatch to score anyway"
        )
    return MemoryBank(kind=kind, items=items, ratio=float(header["ratio"]),
                      strategy=header["strategy"], seed=int(header["seed"]),
                      fingerprint=fingerprint, source_count=int(header["source_count"]))


def save_bank_path(bank: MemoryBank, path) -> int:
    with open(path, "wb") as sink:
        return save_bank(bank, sink)


def load_bank_path(path, expected_fingerprint=None, allow_mismatch=False) -> MemoryBank:
    with open(path, "rb") as source:
        return load_bank(source, expected_fingerprint, allow_mismatch)
