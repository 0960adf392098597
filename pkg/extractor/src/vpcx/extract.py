"""Sliding-window extraction: frames in, feature file out.

Detection runs once per window on its anchor frame and the resulting
squared boxes are shared across all frames of the window, so an object
is represented by the same crop location through time. Whole-frame
features are computed once per video and sliced per window.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .backends import make_detector, make_encoder
from .config import ExtractionConfig
from .errors import ConfigError, SourceError
from .geometry import crop_resize, margined_square, resize_image
from .sources import open_source
from .writer import ClipRecord, write_records

log = logging.getLogger("vpcx")


@dataclass(frozen=True)
class ExtractReport:
    videos: int
    clips: int
    skipped: tuple   # (video_id, reason) pairs


def window_clips(frames, video_id, config, detector, encoder):
    """Yield one ClipRecord per stride-1 window of a single video."""
    frames = np.asarray(frames, np.float32)
    total = frames.shape[0]
    if total < config.d:
        raise SourceError(f"{video_id}: {total} frames is shorter than one "
                          f"window of {config.d}")
    height, width = frames.shape[1], frames.shape[2]

    resized = np.stack([resize_image(f, config.resize) for f in frames])
    whole = encoder.encode(resized)
    placeholder2 = whole[2].shape[1:]
    placeholder3 = whole[3].shape[1:]

    for start in range(total - config.d + 1):
        stop = start + config.d
        anchor = start + config.anchor_offset()
        boxes, scores = detector.detect(frames[anchor])
        kept = np.asarray(boxes, np.float32).reshape(-1, 4)[
            np.asarray(scores, np.float32) >= config.confidence]
        squares = [margined_square(box, config.margin, height, width)
                   for box in kept]
        n = len(squares)
        if n:
            crops = np.stack([crop_resize(frames[t], x, y, side, config.resize)
                              for (x, y, side) in squares
                              for t in range(start, stop)])
            encoded = encoder.encode(crops)
            obj2 = encoded[2].reshape((n, config.d) + encoded[2].shape[1:])
            obj3 = encoded[3].reshape((n, config.d) + encoded[3].shape[1:])
            box_rows = np.asarray(squares, np.float32)
        else:
            obj2 = np.zeros((0, config.d) + placeholder2, np.float32)
            obj3 = np.zeros((0, config.d) + placeholder3, np.float32)
            box_rows = np.zeros((0, 3), np.float32)

        yield ClipRecord(
            video_id=video_id,
            anchor_frame=anchor,
            frame_indices=np.arange(start, stop, dtype=np.int64),
            frame_layer2=whole[2][start:stop],
            frame_layer3=whole[3][start:stop],
            object_layer2=obj2,
            object_layer3=obj3,
            object_boxes=box_rows,
        )


def extract(config: ExtractionConfig, out_path, detector=None, encoder=None,
            sources=None) -> ExtractReport:
    """Run the full extraction described by the config into one file.

    Sources default to opening every path in config.inputs; anything
    with a video_id attribute and a frames() method can be passed
    directly. Unreadable or too-short videos are skipped with a logged
    warning; they never poison the output file.
    """
    config.validate()
    detector = detector if detector is not None else make_detector(config.detector)
    encoder = encoder if encoder is not None else make_encoder(config.encoder)
    if sources is None:
        if not config.inputs:
            raise ConfigError("config lists no inputs")
        sources = [open_source(p) for p in config.inputs]

    stats = {"videos": 0, "clips": 0}
    skipped = []

    def stream():
        for source in sources:
            try:
                frames = source.frames()
                clips = 0
                for record in window_clips(frames, source.video_id, config,
                                           detector, encoder):
                    clips += 1
                    yield record
            except SourceError as exc:
                log.warning("skipping %s: %s", source.video_id, exc)
                skipped.append((source.video_id, str(exc)))
                continue
            stats["videos"] += 1
            stats["clips"] += clips

    with open(out_path, "wb") as fh:
        write_records(stream(), fh)
    return ExtractReport(videos=stats["videos"], clips=stats["clips"],
                         skipped=tuple(skipped))
