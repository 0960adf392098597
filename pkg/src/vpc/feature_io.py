"""Binary feature-file reader/writer.

A feature file decouples the numeric pipeline from whatever produced the
backbone activations.  Layout:

    magic "VPCF" | version u16 LE | clip*, where each clip is
    header_len u32 LE | header JSON (utf-8) | raw float32 LE tensor payload

The payload is the concatenation, in a fixed order, of the clip's tensor
blocks: per frame the layer-2 then layer-3 map, followed per object and per
frame by the layer-2 then layer-3 map.  The JSON header declares every
shape, so the payload length is fully determined before it is read.
Round-trips are bit-exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import CorruptionError, FormatError, ValidationError

MAGIC = b"VPCF"
VERSION = 1

_FLOAT = np.dtype("<f4")


@dataclass(frozen=True)
class LayerFeatureMap:
    """One backbone activation map, shaped (channels, height, width)."""

    layer_id: int
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", np.ascontiguousarray(self.data, dtype=np.float32))

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    def validate(self):
        if self.layer_id not in (2, 3):
            raise ValidationError(f"layer_id must be 2 or 3, got {self.layer_id}")
        if self.data.ndim != 3 or min(self.data.shape) < 1:
            raise ValidationError(f"map shape must be (c, h, w) with positive dims, got {self.data.shape}")
        if not np.isfinite(self.data).all():
            raise ValidationError("map contains NaN or Inf")

    def __eq__(self, other):
        if not isinstance(other, LayerFeatureMap):
            return NotImplemented
        return self.layer_id == other.layer_id and np.array_equal(self.data, other.data)


def _as_f32(arr, name):
    out = np.ascontiguousarray(arr, dtype=np.float32)
    return out


@dataclass(frozen=True, eq=False)
class ClipFeatures:
    """Backbone features for one sliding window of d frames.

    Frame-level maps are stacked as (d, c, h, w) arrays, object-level maps
    as (n, d, c, h, w).  A clip with no detected objects has n == 0 and
    zero-size object arrays.  Boxes are squares (x, y, side) in source
    pixels; squareness is guaranteed by construction.
    """

    video_id: str
    anchor_frame: int
    frame_indices: np.ndarray
    frame_layer2: np.ndarray
    frame_layer3: np.ndarray
    object_layer2: np.ndarray = field(default_factory=lambda: np.zeros((0, 0, 0, 0, 0), np.float32))
    object_layer3: np.ndarray = field(default_factory=lambda: np.zeros((0, 0, 0, 0, 0), np.float32))
    object_boxes: np.ndarray = field(default_factory=lambda: np.zeros((0, 3), np.float32))

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "frame_indices", np.ascontiguousarray(self.frame_indices, dtype=np.int64))
        set_(self, "frame_layer2", _as_f32(self.frame_layer2, "frame_layer2"))
        set_(self, "frame_layer3", _as_f32(self.frame_layer3, "frame_layer3"))
        d = self.frame_indices.shape[0] if self.frame_indices.ndim == 1 else 0
        obj2 = _as_f32(self.object_layer2, "object_layer2")
        obj3 = _as_f32(self.object_layer3, "object_layer3")
        boxes = np.ascontiguousarray(self.object_boxes, dtype=np.float32).reshape(-1, 3)
        if obj2.shape[0] == 0:
            obj2 = np.zeros((0, d, 0, 0, 0), np.float32)
            obj3 = np.zeros((0, d, 0, 0, 0), np.float32)
        set_(self, "object_layer2", obj2)
        set_(self, "object_layer3", obj3)
        set_(self, "object_boxes", boxes)

    @property
    def d(self) -> int:
        return int(self.frame_indices.shape[0])

    @property
    def n(self) -> int:
        return int(self.object_boxes.shape[0])

    @property
    def frame_maps(self):
        """The d (layer-2, layer-3) map pairs, one per frame."""
        return tuple(
            (LayerFeatureMap(2, self.frame_layer2[t]), LayerFeatureMap(3, self.frame_layer3[t]))
            for t in range(self.d)
        )

    @property
    def object_maps(self):
        """Per object, the d (layer-2, layer-3) map pairs."""
        return tuple(
            tuple(
                (LayerFeatureMap(2, self.object_layer2[i, t]), LayerFeatureMap(3, self.object_layer3[i, t]))
                for t in range(self.d)
            )
            for i in range(self.n)
        )

    def validate(self):
        vid = self.video_id
        if not isinstance(vid, str) or not vid:
            raise ValidationError("video_id must be a non-empty string")
        idx = self.frame_indices
        if idx.ndim != 1 or idx.shape[0] < 2:
            raise ValidationError(f"clip {vid!r}: needs at least 2 frames, got {idx.shape}")
        if not (np.diff(idx) > 0).all():
            raise ValidationError(f"clip {vid!r}: frame_indices must be strictly increasing")
        d = self.d
        for name, arr in (("frame_layer2", self.frame_layer2), ("frame_layer3", self.frame_layer3)):
            if arr.ndim != 4 or arr.shape[0] != d:
                raise ValidationError(f"clip {vid!r}: {name} must be (d, c, h, w) with d={d}, got {arr.shape}")
            if min(arr.shape[1:]) < 1:
                raise ValidationError(f"clip {vid!r}: {name} has an empty map dimension {arr.shape}")
        n = self.n
        for name, arr in (("object_layer2", self.object_layer2), ("object_layer3", self.object_layer3)):
            if arr.ndim != 5 or arr.shape[0] != n or arr.shape[1] != d:
                raise ValidationError(
                    f"clip {vid!r}: {name} must be (n, d, c, h, w) with n={n}, d={d}, got {arr.shape}"
                )
            if n > 0 and min(arr.shape[2:]) < 1:
                raise ValidationError(f"clip {vid!r}: {name} has an empty map dimension {arr.shape}")
        if n > 0:
            sides = self.object_boxes[:, 2]
            if not (np.isfinite(self.object_boxes).all() and (sides > 0).all()):
                raise ValidationError(f"clip {vid!r}: object boxes must be finite with positive side")
        for name, arr in (
            ("frame_layer2", self.frame_layer2),
            ("frame_layer3", self.frame_layer3),
            ("object_layer2", self.object_layer2),
            ("object_layer3", self.object_layer3),
        ):
            if arr.size and not np.isfinite(arr).all():
                raise ValidationError(f"clip {vid!r}: {name} contains NaN or Inf")

    def __eq__(self, other):
        if not isinstance(other, ClipFeatures):
            return NotImplemented
        return (
            self.video_id == other.video_id
            and self.anchor_frame == other.anchor_frame
            and np.array_equal(self.frame_indices, other.frame_indices)
            and self.frame_layer2.shape == other.frame_layer2.shape
            and self.frame_layer3.shape == other.frame_layer3.shape
            and self.object_layer2.shape == other.object_layer2.shape
            and self.object_layer3.shape == other.object_layer3.shape
            and np.array_equal(self.frame_layer2, other.frame_layer2)
            and np.array_equal(self.frame_layer3, other.frame_layer3)
            and np.array_equal(self.object_layer2, other.object_layer2)
            and np.array_equal(self.object_layer3, other.object_layer3)
            and np.array_equal(self.object_boxes, other.object_boxes)
        )


def _header_dict(clip: ClipFeatures, payload_bytes: int) -> dict:
    n = clip.n
    return {
        "anchor_frame": int(clip.anchor_frame),
        "frame_indices": [int(v) for v in clip.frame_indices],
        "frame_shape2": list(clip.frame_layer2.shape[1:]),
        "frame_shape3": list(clip.frame_layer3.shape[1:]),
        "object_boxes": [[float(v) for v in box] for box in clip.object_boxes],
        "object_count": n,
        "object_shape2": list(clip.object_layer2.shape[2:]) if n else None,
        "object_shape3": list(clip.object_layer3.shape[2:]) if n else None,
        "payload_bytes": payload_bytes,
        "video_id": clip.video_id,
    }


def _payload_blocks(clip: ClipFeatures):
    for t in range(clip.d):
        yield clip.frame_layer2[t]
        yield clip.frame_layer3[t]
    for i in range(clip.n):
        for t in range(clip.d):
            yield clip.object_layer2[i, t]
            yield clip.object_layer3[i, t]


def write_clips(clips, sink) -> int:
    """Write a sequence of clips to a binary sink; returns total bytes written.

    Every clip is validated before any of its bytes go out; a violation is
    reported with the offending clip's video_id.
    """
    written = 0
    sink.write(MAGIC)
    sink.write(VERSION.to_bytes(2, "little"))
    written += 6
    for clip in clips:
        clip.validate()
        payload_bytes = 4 * (clip.frame_layer2.size + clip.frame_layer3.size
                             + clip.object_layer2.size + clip.object_layer3.size)
        header = json.dumps(_header_dict(clip, payload_bytes), sort_keys=True,
                            separators=(",", ":")).encode("utf-8")
        sink.write(len(header).to_bytes(4, "little"))
        sink.write(header)
        written += 4 + len(header)
        for block in _payload_blocks(clip):
            data = np.ascontiguousarray(block, dtype=_FLOAT)
            sink.write(data.tobytes())
        written += payload_bytes
    return written


def _read_exact(source, count, what, clip_index):
    data = source.read(count)
    if len(data) != count:
        raise CorruptionError(
            f"clip {clip_index}: truncated while reading {what} "
            f"(wanted {count} bytes, got {len(data)})"
        )
    return data


def read_clips(source) -> list[ClipFeatures]:
    """Read every clip from a binary source, validating all invariants."""
    head = source.read(6)
    if len(head) < 6 or head[:4] != MAGIC:
        raise FormatError(f"not a feature file: bad magic {head[:4]!r}")
    version = int.from_bytes(head[4:6], "little")
    if version != VERSION:
        raise FormatError(f"unsupported feature-file version {version}")
    clips = []
    index = 0
    while True:
        raw_len = source.read(4)
        if len(raw_len) == 0:
            break
        if len(raw_len) < 4:
            raise CorruptionError(f"clip {index}: truncated header length")
        header_len = int.from_bytes(raw_len, "little")
        header_bytes = _read_exact(source, header_len, "header", index)
        try:
            header = json.loads(header_bytes)
        except ValueError as exc:
            raise CorruptionError(f"clip {index}: unparseable header: {exc}") from exc
        clips.append(_decode_clip(header, source, index))
        index += 1
    return clips


def _decode_clip(header: dict, source, index: int) -> ClipFeatures:
    try:
        d = len(header["frame_indices"])
        n = int(header["object_count"])
        fshape2 = tuple(header["frame_shape2"])
        fshape3 = tuple(header["frame_shape3"])
        oshape2 = tuple(header["object_shape2"]) if n else (0, 0, 0)
        oshape3 = tuple(header["object_shape3"]) if n else (0, 0, 0)
        boxes = header["object_boxes"]
        declared = int(header["payload_bytes"])
    except (KeyError, TypeError) as exc:
        raise CorruptionError(f"clip {index}: header missing field: {exc}") from exc
    if len(boxes) != n:
        raise ValidationError(f"clip {index}: object_count {n} != {len(boxes)} boxes")
    counts = [int(np.prod(fshape2)), int(np.prod(fshape3))]
    expected = d * (counts[0] + counts[1]) + n * d * (int(np.prod(oshape2)) + int(np.prod(oshape3)))
    if declared != expected * 4:
        raise CorruptionError(
            f"clip {index}: declared payload {declared} bytes, shapes imply {expected * 4}"
        )
    payload = _read_exact(source, declared, "tensor payload", index)
    flat = np.frombuffer(payload, dtype=_FLOAT)
    offset = 0

    def take(count, shape):
        nonlocal offset
        block = flat[offset:offset + count].reshape(shape)
        offset += count
        return block

    frame2 = np.empty((d,) + fshape2, np.float32)
    frame3 = np.empty((d,) + fshape3, np.float32)
    for t in range(d):
        frame2[t] = take(counts[0], fshape2)
        frame3[t] = take(counts[1], fshape3)
    if n:
        per2, per3 = int(np.prod(oshape2)), int(np.prod(oshape3))
        obj2 = np.empty((n, d) + oshape2, np.float32)
        obj3 = np.empty((n, d) + oshape3, np.float32)
        for i in range(n):
            for t in range(d):
                obj2[i, t] = take(per2, oshape2)
                obj3[i, t] = take(per3, oshape3)
    else:
        obj2 = np.zeros((0, d, 0, 0, 0), np.float32)
        obj3 = np.zeros((0, d, 0, 0, 0), np.float32)
    clip = ClipFeatures(
        video_id=header.get("video_id", ""),
        anchor_frame=int(header.get("anchor_frame", -1)),
        frame_indices=np.asarray(header["frame_indices"], dtype=np.int64),
        frame_layer2=frame2,
        frame_layer3=frame3,
        object_layer2=obj2,
        object_layer3=obj3,
        object_boxes=np.asarray(boxes, np.float32).reshape(-1, 3),
    )
    clip.validate()
    return clip


def write_clips_path(clips, path) -> int:
    with open(path, "wb") as sink:
        return write_clips(clips, sink)


def read_clips_path(path) -> list[ClipFeatures]:
    with open(path, "rb") as source:
        return read_clips(source)
