"""End-to-end stages: memorize a clip corpus into banks, score clips
against banks, and carry timing/count bookkeeping for reporting.

Patch-set computation fans out over a thread pool (numpy releases the GIL
in the heavy ops); VPC_THREADS caps the worker count.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import PipelineConfig
from .errors import ParameterError, ValidationError
from .memory import MemoryBank, build_bank, subsample_size
from .partition import KINDS, ClipPatchSets, StageMode, compute_patch_sets
from .scoring import FusionParams, ScoreSeries, WindowScore, fuse_scores, score_windows


def worker_count() -> int:
    raw = os.environ.get("VPC_THREADS", "").strip()
    if not raw:
        return min(8, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        raise ParameterError(f"VPC_THREADS must be an integer, got {raw!r}") from None
    if value < 1:
        raise ParameterError(f"VPC_THREADS must be >= 1, got {value}")
    return value


def compute_all_patch_sets(clips, config: PipelineConfig, mode: StageMode) -> list[ClipPatchSets]:
    """Patch sets for every clip, input order preserved."""
    clips = list(clips)
    workers = worker_count()
    if workers == 1 or len(clips) < 2:
        return [compute_patch_sets(clip, config, mode) for clip in clips]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: compute_patch_sets(c, config, mode), clips))


@dataclass
class MemorizeReport:
    banks: dict
    patch_counts: dict = field(default_factory=dict)   # kind -> patches before subsampling
    bank_sizes: dict = field(default_factory=dict)     # kind -> items kept
    seconds: dict = field(default_factory=dict)        # stage -> wall time


def memorize(clips, config: PipelineConfig) -> MemorizeReport:
    """Build the three banks from a training corpus of clips."""
    config.validate()
    t0 = time.perf_counter()
    patch_sets = compute_all_patch_sets(clips, config, StageMode.MEMORIZE)
    t1 = time.perf_counter()
    if not patch_sets:
        raise ValidationError("no clips to memorize")
    by_video: dict = {}
    for ps in patch_sets:
        by_video.setdefault(ps.highlevel.video_id, []).append(ps)
    fingerprint = config.fingerprint()
    report = MemorizeReport(banks={})
    for kind in KINDS:
        per_video = [
            np.concatenate([ps.by_kind(kind).patches for ps in group], axis=0)
            if group else np.zeros((0, 1), np.float32)
            for group in by_video.values()
        ]
        report.patch_counts[kind] = int(sum(a.shape[0] for a in per_video))
        bank = build_bank(per_video, kind, config.ratio_for(kind),
                          config.strategy, config.seed, fingerprint)
        report.banks[kind] = bank
        report.bank_sizes[kind] = bank.count
    t2 = time.perf_counter()
    report.seconds = {"features": t1 - t0, "subsample": t2 - t1, "total": t2 - t0}
    return report


@dataclass
class ScoreReport:
    windows: list
    series: list
    seconds: dict = field(default_factory=dict)


def score(clips, banks: dict, config: PipelineConfig, frame_counts=None) -> ScoreReport:
    """Score a clip corpus against banks and fuse into per-frame series."""
    config.validate()
    missing = [kind for kind in KINDS if kind not in banks]
    if missing:
        raise ValidationError(f"missing banks: {missing}")
    t0 = time.perf_counter()
    patch_sets = compute_all_patch_sets(clips, config, StageMode.INFER)
    t1 = time.perf_counter()
    if not patch_sets:
        raise ValidationError("no clips to score")
    windows = score_windows(patch_sets, banks)
    t2 = time.perf_counter()
    series = fuse_scores(windows, FusionParams.from_config(config), frame_counts)
    t3 = time.perf_counter()
    return ScoreReport(windows=windows, series=series, seconds={
        "features": t1 - t0, "query": t2 - t1, "fuse": t3 - t2, "total": t3 - t0,
    })


def expected_bank_size(patch_count: int, ratio: float, strategy: str,
                       per_video_counts=None) -> int:
    """Bank size implied by the subsampling rule, for reporting and checks."""
    if strategy == "concat_then_subsample":
        return subsample_size(patch_count, ratio)
    if strategy == "per_video_then_concat":
        if per_video_counts is None:
            raise ParameterError("per-video counts needed for per_video_then_concat")
        return sum(subsample_size(c, ratio) for c in per_video_counts if c > 0)
    raise ParameterError(f"unknown strategy {strategy!r}")
