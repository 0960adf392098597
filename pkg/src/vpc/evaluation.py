"""Frame-level evaluation: AUROC over concatenated per-frame scores.

Micro-averaging concatenates every video's frames into one population
before ranking, so long videos weigh more than short ones and the metric
matches thresholding one global score.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import UndefinedMetricError, ValidationError


@dataclass(frozen=True)
class LabeledScores:
    video_id: str
    scores: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "scores", np.asarray(self.scores, np.float64))
        object.__setattr__(self, "labels", np.asarray(self.labels, np.int64))
        if self.scores.shape != self.labels.shape or self.scores.ndim != 1:
            raise ValidationError(
                f"video {self.video_id!r}: scores {self.scores.shape} and labels "
                f"{self.labels.shape} must be equal-length 1D arrays"
            )
        if not np.isin(self.labels, (0, 1)).all():
            raise ValidationError(f"video {self.video_id!r}: labels must be 0 or 1")


def auroc(scores, labels) -> float:
    """Area under the ROC curve by average ranks (ties share their rank).

    Equivalent to the probability that a random anomalous frame outscores a
    random normal one, counting ties as half.
    """
    scores = np.asarray(scores, np.float64)
    labels = np.asarray(labels, np.int64)
    n_pos = int(labels.sum())
    n_neg = labels.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError(
            f"AUROC needs both classes, got {n_pos} positive / {n_neg} negative frames"
        )
    ranks = rankdata(scores, method="average")
    pos_rank_sum = ranks[labels == 1].sum()
    return float((pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def micro_concat(labeled) -> LabeledScores:
    """Concatenate per-video scores/labels into one population, input order."""
    items = list(labeled)
    if not items:
        raise ValidationError("no labeled videos to evaluate")
    return LabeledScores(
        video_id="+".join(ls.video_id for ls in items),
        scores=np.concatenate([ls.scores for ls in items]),
        labels=np.concatenate([ls.labels for ls in items]),
    )


def micro_auroc(labeled) -> float:
    """AUROC over all videos' frames concatenated into one population."""
    pooled = micro_concat(labeled)
    return auroc(pooled.scores, pooled.labels)


def pair_scores_with_labels(series, labels: dict) -> list[LabeledScores]:
    """Join per-frame score series to a video_id -> 0/1 label-array map."""
    out = []
    for s in series:
        if s.video_id not in labels:
            raise ValidationError(f"no labels for video {s.video_id!r}")
        lab = np.asarray(labels[s.video_id], np.int64)
        if lab.shape[0] != s.frame_count:
            raise ValidationError(
                f"video {s.video_id!r}: {s.frame_count} scored frames but {lab.shape[0]} labels"
            )
        out.append(LabeledScores(s.video_id, s.fused, lab))
    return out


def load_labels(source) -> dict:
    data = json.load(source)
    if not isinstance(data, dict):
        raise ValidationError("label file must map video_id to a 0/1 array")
    out = {}
    for vid, arr in data.items():
        values = np.asarray(arr, np.int64)
        if values.ndim != 1 or not np.isin(values, (0, 1)).all():
            raise ValidationError(f"video {vid!r}: labels must be a flat 0/1 array")
        out[vid] = values
    return out


def load_labels_path(path) -> dict:
    with open(path, "r", encoding="utf-8") as source:
        return load_labels(source)


def save_labels(labels: dict, sink):
    json.dump({vid: [int(v) for v in arr] for vid, arr in labels.items()},
              sink, sort_keys=True, separators=(",", ":"))
    sink.write("\n")


def save_labels_path(labels: dict, path):
    with open(path, "w", encoding="utf-8") as sink:
        save_labels(labels, sink)


ABLATION_STREAMS = ("fused", "spatial_only", "temporal_only", "highlevel_only",
                    "las_only", "gas_only")


def ablation_report(series, labels: dict) -> dict:
    """Micro AUROC of the fused score and of each stream scored alone."""
    columns = {
        "fused": lambda s: s.fused,
        "spatial_only": lambda s: s.s_spatial,
        "temporal_only": lambda s: s.s_temporal,
        "highlevel_only": lambda s: s.s_highlevel,
        "las_only": lambda s: s.las,
        "gas_only": lambda s: s.s_highlevel,
    }
    report = {}
    for name in ABLATION_STREAMS:
        pick = columns[name]
        labeled = []
        for s in series:
            lab = np.asarray(labels[s.video_id], np.int64)
            if lab.shape[0] != s.frame_count:
                raise ValidationError(
                    f"video {s.video_id!r}: {s.frame_count} scored frames but {lab.shape[0]} labels"
                )
            labeled.append(LabeledScores(s.video_id, pick(s), lab))
        report[name] = micro_auroc(labeled)
    return report
