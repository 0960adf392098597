"""Feature extraction front end for the vpc anomaly-detection pipeline."""

from .backends import (
    BrightnessDetector,
    FakeEncoder,
    ResNetEncoder,
    StaticBoxDetector,
    YoloDetector,
    make_detector,
    make_encoder,
)
from .config import (
    ANCHORS,
    PRESETS,
    RESIZE,
    ExtractionConfig,
    load_config,
    load_preset,
    save_config,
)
from .errors import BackendUnavailable, ConfigError, ExtractorError, SourceError
from .extract import ExtractReport, extract, window_clips
from .geometry import crop_resize, margined_square, resize_image
from .sources import ImageFrames, NpyFrames, VideoFrames, open_source
from .writer import ClipRecord, write_records, write_records_path

__version__ = "0.1.0"
