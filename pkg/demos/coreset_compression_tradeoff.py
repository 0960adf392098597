"""
Coreset compression: accuracy versus speed
==========================================

Sweeps the subsampling ratio and shows what greedy farthest-point
selection buys: banks shrink by an order of magnitude while frame-level
AUROC stays put and scoring gets proportionally faster.
"""

import time

import vpc
from vpc.partition import StageMode
from vpc.pipeline import compute_all_patch_sets
from vpc.scoring import score_windows

# a mid-sized corpus with one appearance and one motion anomaly
events = (vpc.AnomalyEvent(0, 0, 50, "appearance", 5.0),
          vpc.AnomalyEvent(1, 0, 50, "motion", 5.0))
spec = vpc.SynthSpec(seed=1, videos_train=8, videos_test=4,
                     frames_per_video=50, d=4, min_objects=3,
                     max_objects=3, anomalies=events)
data = vpc.generate(spec)

# both planted anomalies are object-level, so fusion leans on the
# local streams
base = vpc.PipelineConfig(d=4, c_prime=8, delta=(0.5, 0.5),
                          gamma=(0.9, 0.1), smoothing_sigma=2.0)

# partition the test windows once; only the banks change per ratio
test_sets = compute_all_patch_sets(data.test_clips, base, StageMode.INFER)

print("ratio   bank(spatial)   query ms   windows/s   fused AUROC")
for ratio in (1.0, 0.5, 0.25, 0.1, 0.05):
    config = base.with_overrides(ratio_spatial=ratio, ratio_temporal=ratio,
                                 ratio_highlevel=ratio)
    report = vpc.memorize(data.train_clips, config)

    # time only the nearest-neighbor stage, best of three runs
    best = None
    for _ in range(3):
        t0 = time.perf_counter()
        windows = score_windows(test_sets, report.banks)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)

    series = vpc.fuse_scores(windows, vpc.FusionParams.from_config(config),
                             data.frame_counts)
    auroc = vpc.ablation_report(series, data.labels)["fused"]
    print(f"{ratio:5.2f}   {report.banks['spatial'].count:13d}   "
          f"{best * 1000:8.1f}   {len(test_sets) / best:9.0f}   {auroc:.4f}")
