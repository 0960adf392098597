"""Detector and encoder backends.

A detector maps one frame to (boxes, scores); an encoder maps a batch of
(h, w, 3) images to two feature maps per image. The numpy backends run
anywhere and keep the pipeline testable; the torch backends wrap real
pretrained models and construct only where their dependencies exist.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .errors import BackendUnavailable, ConfigError
from .geometry import resize_image


class StaticBoxDetector:
    """Returns the same detections on every frame; test scaffolding."""

    def __init__(self, boxes, scores=None):
        self.boxes = np.asarray(boxes, np.float32).reshape(-1, 4)
        if scores is None:
            scores = np.ones(self.boxes.shape[0], np.float32)
        self.scores = np.asarray(scores, np.float32)
        if self.scores.shape[0] != self.boxes.shape[0]:
            raise ConfigError("one score per box required")

    def detect(self, frame):
        return self.boxes.copy(), self.scores.copy()


class BrightnessDetector:
    """Boxes around regions brighter than the frame's mean by z sigmas.

    A crude but fully deterministic stand-in for an object detector:
    each connected bright component yields one box whose score grows
    with its area. A flat frame yields nothing.
    """

    def __init__(self, z: float = 2.0, min_area: int = 4):
        self.z = float(z)
        self.min_area = int(min_area)

    def detect(self, frame):
        lum = np.asarray(frame, np.float64).mean(axis=2)
        std = lum.std()
        if std == 0.0:
            return np.zeros((0, 4), np.float32), np.zeros(0, np.float32)
        mask = lum > lum.mean() + self.z * std
        labels, count = ndimage.label(mask)
        boxes, scores = [], []
        for region in ndimage.find_objects(labels):
            ys, xs = region
            area = (ys.stop - ys.start) * (xs.stop - xs.start)
            if area < self.min_area:
                continue
            boxes.append([xs.start, ys.start, xs.stop, ys.stop])
            scores.append(min(1.0, np.sqrt(area / mask.size) * 4.0))
        if not boxes:
            return np.zeros((0, 4), np.float32), np.zeros(0, np.float32)
        return (np.asarray(boxes, np.float32),
                np.asarray(scores, np.float32))


class FakeEncoder:
    """Deterministic numpy encoder: resize, then a fixed channel mix.

    Content-sensitive and seed-stable, with the same two-scale layout as
    the real backbone (the second map half the size of the first), so
    everything downstream exercises realistic shapes at toy cost.
    """

    def __init__(self, c2=4, s2=8, c3=8, s3=4, seed=0):
        self.dims = {2: (int(c2), int(s2)), 3: (int(c3), int(s3))}
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), 3, 101]))
        self.mix = {layer: rng.normal(size=(c, 3)).astype(np.float32)
                    for layer, (c, _) in self.dims.items()}

    def encode(self, images):
        images = np.asarray(images, np.float32) / 255.0
        out = {}
        for layer, (channels, size) in self.dims.items():
            small = np.stack([resize_image(img, (size, size)) for img in images])
            # (b, s, s, 3) x (c, 3) -> (b, c, s, s)
            out[layer] = np.einsum("bhwk,ck->bchw", small,
                                   self.mix[layer]).astype(np.float32)
        return out


class ResNetEncoder:
    """Layer-2/3 feature hooks on a ResNet-101 trunk.

    For 224x224 inputs the maps come out (512, 28, 28) and (1024, 14,
    14). Pass a weights path for meaningful features; without one the
    trunk is randomly initialized, which is only good for smoke tests.
    """

    def __init__(self, weights_path=None, device="cpu"):
        try:
            import torch
            from torchvision.models import resnet101
        except ImportError as exc:
            raise BackendUnavailable("the resnet101 encoder needs torch and "
                                     "torchvision (pip install vpcx[real])") from exc
        self._torch = torch
        model = resnet101(weights=None)
        if weights_path is not None:
            state = torch.load(weights_path, map_location=device)
            model.load_state_dict(state)
        model.eval().to(device)
        self.device = device
        self.model = model
        self._grabbed = {}
        model.layer2.register_forward_hook(self._grab(2))
        model.layer3.register_forward_hook(self._grab(3))

    def _grab(self, layer):
        def hook(module, inputs, output):
            self._grabbed[layer] = output.detach().cpu().numpy().astype(np.float32)
        return hook

    def encode(self, images):
        torch = self._torch
        batch = np.asarray(images, np.float32) / 255.0
        batch = np.transpose(batch, (0, 3, 1, 2))
        mean = np.array([0.485, 0.456, 0.406], np.float32).reshape(1, 3, 1, 1)
        std = np.array([0.229, 0.224, 0.225], np.float32).reshape(1, 3, 1, 1)
        tensor = torch.from_numpy((batch - mean) / std).to(self.device)
        with torch.no_grad():
            self.model(tensor)
        return {2: self._grabbed[2], 3: self._grabbed[3]}


class YoloDetector:
    """A YOLOv5 checkpoint behind the common detect() interface.

    Needs torch plus either a local checkpoint path or network access
    for torch.hub; both are wrapped in one clear failure.
    """

    def __init__(self, weights_path=None, device="cpu"):
        try:
            import torch
        except ImportError as exc:
            raise BackendUnavailable("the yolov5 detector needs torch "
                                     "(pip install vpcx[real])") from exc
        try:
            if weights_path is not None:
                self.model = torch.hub.load("ultralytics/yolov5", "custom",
                                            path=weights_path, device=device)
            else:
                self.model = torch.hub.load("ultralytics/yolov5", "yolov5s",
                                            device=device)
        except Exception as exc:
            raise BackendUnavailable(f"could not load yolov5 weights: {exc}") from exc

    def detect(self, frame):
        results = self.model(np.asarray(frame, np.uint8))
        table = results.xyxy[0].cpu().numpy()
        return (table[:, 0:4].astype(np.float32),
                table[:, 4].astype(np.float32))


_DETECTORS = {"brightness": BrightnessDetector,
              "static": StaticBoxDetector,
              "yolov5": YoloDetector}
_ENCODERS = {"fake": FakeEncoder,
             "resnet101": ResNetEncoder}


def make_detector(name: str, **kwargs):
    if name not in _DETECTORS:
        raise ConfigError(f"unknown detector {name!r}; available: {sorted(_DETECTORS)}")
    return _DETECTORS[name](**kwargs)


def make_encoder(name: str, **kwargs):
    if name not in _ENCODERS:
        raise ConfigError(f"unknown encoder {name!r}; available: {sorted(_ENCODERS)}")
    return _ENCODERS[name](**kwargs)
