"""Writer for the binary feature-file format the scoring pipeline reads.

The format is the entire contract between this package and the
consumer, so it is implemented here from the format description rather
than imported: magic "VPCF", version 1 little-endian u16, then per clip
a u32 header length, a canonical JSON header, and float32 little-endian
feature payload. Frames come first, layer 2 then layer 3 per frame,
followed by the same interleaving per object.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

MAGIC = b"VPCF"
VERSION = 1


@dataclass(frozen=True)
class ClipRecord:
    """One sliding window ready for serialization."""

    video_id: str
    anchor_frame: int
    frame_indices: np.ndarray    # (d,) int64, strictly increasing
    frame_layer2: np.ndarray     # (d, c2, h2, w2) float32
    frame_layer3: np.ndarray     # (d, c3, h3, w3) float32
    object_layer2: np.ndarray    # (n, d, c2', h2', w2') float32
    object_layer3: np.ndarray    # (n, d, c3', h3', w3') float32
    object_boxes: np.ndarray     # (n, 3) float32: x, y, side

    @property
    def d(self) -> int:
        return int(self.frame_layer2.shape[0])

    @property
    def n(self) -> int:
        return int(self.object_layer2.shape[0])

    def validate(self) -> None:
        if not self.video_id:
            raise ConfigError("clip has an empty video_id")
        d = self.d
        if self.frame_indices.shape != (d,) or d < 2:
            raise ConfigError(f"{self.video_id}: need at least 2 frame indices")
        if np.any(np.diff(self.frame_indices) <= 0):
            raise ConfigError(f"{self.video_id}: frame indices must increase")
        for name in ("frame_layer2", "frame_layer3"):
            arr = getattr(self, name)
            if arr.ndim != 4 or arr.shape[0] != d:
                raise ConfigError(f"{self.video_id}: {name} must be (d, c, h, w)")
        n = self.n
        for name in ("object_layer2", "object_layer3"):
            arr = getattr(self, name)
            if arr.ndim != 5 or arr.shape[0] != n or arr.shape[1] != d:
                raise ConfigError(f"{self.video_id}: {name} must be (n, d, c, h, w)")
        if self.object_boxes.shape != (n, 3):
            raise ConfigError(f"{self.video_id}: object_boxes must be (n, 3)")
        if n and np.any(self.object_boxes[:, 2] <= 0):
            raise ConfigError(f"{self.video_id}: box sides must be positive")
        for name in ("frame_layer2", "frame_layer3", "object_layer2",
                     "object_layer3"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ConfigError(f"{self.video_id}: {name} has non-finite values")


def _header(record: ClipRecord, payload_bytes: int) -> bytes:
    n = record.n
    fields = {
        "anchor_frame": int(record.anchor_frame),
        "frame_indices": [int(v) for v in record.frame_indices],
        "frame_shape2": list(record.frame_layer2.shape[1:]),
        "frame_shape3": list(record.frame_layer3.shape[1:]),
        "object_boxes": [[float(v) for v in box] for box in record.object_boxes],
        "object_count": n,
        "object_shape2": list(record.object_layer2.shape[2:]) if n else None,
        "object_shape3": list(record.object_layer3.shape[2:]) if n else None,
        "payload_bytes": payload_bytes,
        "video_id": record.video_id,
    }
    return json.dumps(fields, sort_keys=True, separators=(",", ":")).encode("utf-8")


def write_records(records, sink) -> int:
    """Stream clip records to a binary sink; returns bytes written."""
    sink.write(MAGIC)
    sink.write(VERSION.to_bytes(2, "little"))
    written = 6
    for record in records:
        record.validate()
        payload_bytes = 4 * (record.frame_layer2.size + record.frame_layer3.size
                             + record.object_layer2.size + record.object_layer3.size)
        header = _header(record, payload_bytes)
        sink.write(len(header).to_bytes(4, "little"))
        sink.write(header)
        for t in range(record.d):
            sink.write(np.ascontiguousarray(record.frame_layer2[t], np.float32).tobytes())
            sink.write(np.ascontiguousarray(record.frame_layer3[t], np.float32).tobytes())
        for i in range(record.n):
            for t in range(record.d):
                sink.write(np.ascontiguousarray(record.object_layer2[i, t], np.float32).tobytes())
                sink.write(np.ascontiguousarray(record.object_layer3[i, t], np.float32).tobytes())
        written += 4 + len(header) + payload_bytes
    return written


def write_records_path(records, path) -> int:
    with open(path, "wb") as fh:
        return write_records(records, fh)
