import builtins

import numpy as np
import pytest

from vpcx import (
    BrightnessDetector,
    FakeEncoder,
    StaticBoxDetector,
    make_detector,
    make_encoder,
)
from vpcx.errors import BackendUnavailable, ConfigError


def test_static_detector_repeats_its_boxes():
    det = StaticBoxDetector([[1, 2, 9, 10]], scores=[0.8])
    for frame in (np.zeros((16, 16, 3)), np.ones((16, 16, 3))):
        boxes, scores = det.detect(frame)
        assert boxes.tolist() == [[1, 2, 9, 10]]
        assert scores.tolist() == pytest.approx([0.8])


def test_brightness_detector_finds_the_blob():
    frame = np.full((64, 64, 3), 20.0, np.float32)
    frame[10:26, 30:46] = 200.0
    boxes, scores = BrightnessDetector().detect(frame)
    assert boxes.shape == (1, 4)
    x1, y1, x2, y2 = boxes[0]
    assert (x1, y1, x2, y2) == (30, 10, 46, 26)
    assert 0.0 < scores[0] <= 1.0


def test_brightness_detector_blank_frame_yields_nothing():
    boxes, scores = BrightnessDetector().detect(np.full((32, 32, 3), 7.0))
    assert boxes.shape == (0, 4) and scores.shape == (0,)


def test_fake_encoder_shapes_and_determinism():
    enc = FakeEncoder(c2=4, s2=8, c3=8, s3=4, seed=3)
    images = np.random.default_rng(0).uniform(0, 255, size=(5, 32, 32, 3))
    first = enc.encode(images)
    again = FakeEncoder(c2=4, s2=8, c3=8, s3=4, seed=3).encode(images)
    assert first[2].shape == (5, 4, 8, 8)
    assert first[3].shape == (5, 8, 4, 4)
    assert np.array_equal(first[2], again[2])
    assert np.array_equal(first[3], again[3])
    # different content must land somewhere else
    other = enc.encode(images + 40.0)
    assert not np.array_equal(first[2], other[2])


def test_backend_registry_and_unknown_names():
    assert isinstance(make_detector("brightness"), BrightnessDetector)
    assert isinstance(make_encoder("fake"), FakeEncoder)
    with pytest.raises(ConfigError):
        make_detector("nope")
    with pytest.raises(ConfigError):
        make_encoder("nope")


def test_torch_backends_fail_cleanly_without_torch(monkeypatch):
    real_import = builtins.__import__

    def no_torch(name, *args, **kwargs):
        if name == "torch" or name.startswith("torchvision"):
            raise ImportError(f"no module named {name}")
        return real_import(name, *args, **kwargs)

    monkeypatch.setattr(builtins, "__import__", no_torch)
    with pytest.raises(BackendUnavailable):
        make_encoder("resnet101")
    with pytest.raises(BackendUnavailable):
        make_detector("yolov5")


def test_resnet_encoder_layer_dims():
    torch = pytest.importorskip("torch")
    from vpcx import ResNetEncoder

    enc = ResNetEncoder()   # random weights; shapes are what we check
    images = np.random.default_rng(0).uniform(0, 255, size=(1, 224, 224, 3))
    out = enc.encode(images)
    assert out[2].shape == (1, 512, 28, 28)
    assert out[3].shape == (1, 1024, 14, 14)
