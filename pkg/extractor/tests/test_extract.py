import logging

import numpy as np
import pytest

import vpc
from vpcx import (
    ExtractionConfig,
    FakeEncoder,
    StaticBoxDetector,
    extract,
    load_preset,
    make_detector,
    window_clips,
)
from vpcx.errors import ConfigError, SourceError


def blob_video(frames=10, size=64, seed=0):
    rng = np.random.default_rng(seed)
    video = rng.uniform(0, 60, size=(frames, size, size, 3)).astype(np.float32)
    video[:, 20:36, 24:40] += 180.0
    return video


class ArraySource:
    def __init__(self, video_id, frames):
        self.video_id = video_id
        self._frames = frames

    def frames(self):
        if isinstance(self._frames, Exception):
            raise self._frames
        return self._frames


def small_setup(d=4, anchor="last", confidence=0.25):
    config = ExtractionConfig(d=d, anchor=anchor, confidence=confidence)
    detector = StaticBoxDetector([[8, 8, 24, 24], [30, 30, 50, 54]])
    encoder = FakeEncoder(c2=4, s2=8, c3=8, s3=4)
    return config, detector, encoder


def test_window_count_is_frames_minus_d_plus_one():
    config, detector, encoder = small_setup(d=4)
    clips = list(window_clips(blob_video(10), "v", config, detector, encoder))
    assert len(clips) == 7
    assert [c.anchor_frame for c in clips] == list(range(3, 10))
    assert [tuple(c.frame_indices[[0, -1]]) for c in clips] == \
        [(s, s + 3) for s in range(7)]


def test_middle_anchor_lands_mid_window():
    config, detector, encoder = small_setup(d=4, anchor="middle")
    clips = list(window_clips(blob_video(6), "v", config, detector, encoder))
    assert [c.anchor_frame for c in clips] == [2, 3, 4]


def test_boxes_are_shared_and_squared_across_the_window():
    config, detector, encoder = small_setup()
    clips = list(window_clips(blob_video(5), "v", config, detector, encoder))
    for clip in clips:
        assert clip.n == 2
        sides = clip.object_boxes[:, 2]
        assert np.all(sides > 0)
        # second detection is 20x24; margined square side = 24 * 1.2
        assert sides[1] == pytest.approx(28.8)
        # one crop per object per frame, encoded at the fake dims
        assert clip.object_layer2.shape == (2, 4, 4, 8, 8)
        assert clip.object_layer3.shape == (2, 4, 8, 4, 4)
    # the same boxes appear in every window (detections are static)
    assert np.array_equal(clips[0].object_boxes, clips[-1].object_boxes)


def test_confidence_threshold_filters_detections():
    config = ExtractionConfig(d=2, confidence=0.5)
    detector = StaticBoxDetector([[8, 8, 24, 24], [30, 30, 50, 54]],
                                 scores=[0.9, 0.2])
    encoder = FakeEncoder()
    clips = list(window_clips(blob_video(4), "v", config, detector, encoder))
    assert all(c.n == 1 for c in clips)


def test_solid_color_video_yields_object_free_clips():
    config = ExtractionConfig(d=3, detector="brightness", encoder="fake")
    video = np.full((6, 48, 48, 3), 90.0, np.float32)
    clips = list(window_clips(video, "flat", config,
                              detector=make_detector("brightness"),
                              encoder=FakeEncoder()))
    assert len(clips) == 4
    for clip in clips:
        assert clip.n == 0
        assert clip.object_layer2.shape[0] == 0
        # constant input stays spatially constant per channel
        spread = np.ptp(clip.frame_layer2, axis=(2, 3)).max()
        assert spread <= 1e-4


def test_too_short_video_raises_source_error():
    config, detector, encoder = small_setup(d=8)
    with pytest.raises(SourceError):
        list(window_clips(blob_video(5), "v", config, detector, encoder))


def test_extract_writes_a_file_the_pipeline_accepts(tmp_path):
    config, detector, encoder = small_setup()
    sources = [ArraySource("v0", blob_video(8, seed=1)),
               ArraySource("v1", blob_video(9, seed=2))]
    out = tmp_path / "features.vpcf"
    report = extract(config, out, detector=detector, encoder=encoder,
                     sources=sources)
    assert report.videos == 2
    assert report.clips == (8 - 4 + 1) + (9 - 4 + 1)
    assert report.skipped == ()

    clips = vpc.read_clips_path(str(out))
    assert len(clips) == report.clips
    for clip in clips:
        clip.validate()

    # and the consumer pipeline runs on it end to end
    pipeline_config = vpc.PipelineConfig(d=4, c_prime=4, ratio_spatial=1.0,
                                         ratio_temporal=1.0,
                                         ratio_highlevel=1.0,
                                         smoothing_sigma=1.0)
    banks = vpc.memorize(clips, pipeline_config).banks
    scored = vpc.score(clips, banks, pipeline_config)
    for series in scored.series:
        assert np.all(np.isfinite(series.fused))


def test_extract_skips_unreadable_and_short_videos(tmp_path, caplog):
    config, detector, encoder = small_setup()
    sources = [ArraySource("ok", blob_video(6, seed=3)),
               ArraySource("broken", SourceError("disk on fire")),
               ArraySource("short", blob_video(2, seed=4))]
    out = tmp_path / "features.vpcf"
    with caplog.at_level(logging.WARNING, logger="vpcx"):
        report = extract(config, out, detector=detector, encoder=encoder,
                         sources=sources)
    assert report.videos == 1
    assert [v for v, _ in report.skipped] == ["broken", "short"]
    assert "disk on fire" in caplog.text
    assert len(vpc.read_clips_path(str(out))) == 3


def test_presets_set_window_and_anchor():
    avenue = load_preset("avenue")
    assert (avenue.d, avenue.anchor) == (10, "middle")
    for name in ("shtech", "corridor"):
        preset = load_preset(name)
        assert (preset.d, preset.anchor) == (4, "last")
    with pytest.raises(ConfigError):
        load_preset("nowhere")


def test_config_validation():
    with pytest.raises(ConfigError):
        ExtractionConfig(d=1).validate()
    with pytest.raises(ConfigError):
        ExtractionConfig(anchor="first").validate()
    with pytest.raises(ConfigError):
        ExtractionConfig(margin=-0.1).validate()
    with pytest.raises(ConfigError):
        ExtractionConfig(confidence=1.5).validate()
    with pytest.raises(ConfigError):
        ExtractionConfig(resize=(128, 128)).validate()
    with pytest.raises(ConfigError):
        ExtractionConfig.from_dict({"d": 4, "bogus": 1})
