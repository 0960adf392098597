"""Training-free video anomaly detection over pre-extracted backbone features.

The pipeline fuses two backbone layers into per-object and whole-frame
streams, partitions them into spatial, temporal, and high-level patch
sets, remembers a greedy coreset of normal patches per kind, and scores
new windows by their largest nearest-neighbor distance to each bank.
"""

from .config import PipelineConfig, load_config, load_preset, preset_names, save_config
from .errors import (
    ConfigDriftError,
    CorruptionError,
    DimensionError,
    EmptyBankError,
    EmptyObjectError,
    FormatError,
    ParameterError,
    UndefinedMetricError,
    ValidationError,
    VpcError,
)
from .evaluation import (
    LabeledScores,
    ablation_report,
    auroc,
    load_labels_path,
    micro_auroc,
    micro_concat,
    pair_scores_with_labels,
    save_labels_path,
)
from .feature_io import ClipFeatures, LayerFeatureMap, read_clips, read_clips_path, write_clips, write_clips_path
from .fusion import build_global_features, build_local_features, split_pool
from .memory import (
    MemoryBank,
    build_bank,
    coreset_subsample,
    load_bank_path,
    nearest_distance,
    nearest_distances,
    save_bank_path,
    subsample_size,
)
from .partition import (
    ClipPatchSets,
    PatchSet,
    StageMode,
    compute_patch_sets,
    highlevel_patches,
    spatial_patches,
    temporal_patches,
    temporal_pyramid,
)
from .pipeline import MemorizeReport, ScoreReport, memorize, score
from .scoring import (
    FusionParams,
    ScoreSeries,
    WindowScore,
    fuse_scores,
    read_scores_csv_path,
    score_windows,
    smooth_scores,
    window_bank_score,
    write_scores_csv_path,
)
from .synthetic import (
    AnomalyEvent,
    SynthResult,
    SynthSpec,
    generate,
    load_spec,
    save_spec,
)

__version__ = "0.1.0"
