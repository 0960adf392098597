"""Frame sources: anything that can hand over (frames, video_id).

Three layouts are understood: a directory of per-frame .npy arrays or a
single stacked .npy (always available), a directory of images (needs
Pillow), and a video container (needs OpenCV). `open_source` dispatches
on the path.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import BackendUnavailable, SourceError

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp")
VIDEO_SUFFIXES = (".mp4", ".avi", ".mov", ".mkv")


def _check_frames(frames, origin) -> np.ndarray:
    frames = np.asarray(frames, np.float32)
    if frames.ndim != 4 or frames.shape[3] != 3 or frames.shape[0] == 0:
        raise SourceError(f"{origin}: expected frames shaped (count, h, w, 3), "
                          f"got {frames.shape}")
    if not np.all(np.isfinite(frames)):
        raise SourceError(f"{origin}: frames contain non-finite values")
    return frames


class NpyFrames:
    """Frames stored as .npy: one stacked file or one file per frame."""

    def __init__(self, path):
        self.path = str(path)
        self.video_id = os.path.splitext(os.path.basename(self.path.rstrip("/")))[0]

    def frames(self) -> np.ndarray:
        try:
            if os.path.isdir(self.path):
                names = sorted(n for n in os.listdir(self.path) if n.endswith(".npy"))
                if not names:
                    raise SourceError(f"{self.path}: no .npy frames found")
                stack = [np.load(os.path.join(self.path, n)) for n in names]
                return _check_frames(np.stack(stack), self.path)
            return _check_frames(np.load(self.path), self.path)
        except (OSError, ValueError) as exc:
            raise SourceError(f"{self.path}: {exc}") from exc


class ImageFrames:
    def __init__(self, path):
        self.path = str(path)
        self.video_id = os.path.basename(self.path.rstrip("/"))

    def frames(self) -> np.ndarray:
        try:
            from PIL import Image
        except ImportError as exc:
            raise BackendUnavailable("reading image directories needs Pillow "
                                     "(pip install vpcx[images])") from exc
        names = sorted(n for n in os.listdir(self.path)
                       if n.lower().endswith(IMAGE_SUFFIXES))
        if not names:
            raise SourceError(f"{self.path}: no image frames found")
        stack = []
        for name in names:
            with Image.open(os.path.join(self.path, name)) as img:
                stack.append(np.asarray(img.convert("RGB"), np.float32))
        return _check_frames(np.stack(stack), self.path)


class VideoFrames:
    def __init__(self, path):
        self.path = str(path)
        self.video_id = os.path.splitext(os.path.basename(self.path))[0]

    def frames(self) -> np.ndarray:
        try:
            import cv2
        except ImportError as exc:
            raise BackendUnavailable("reading video containers needs OpenCV "
                                     "(pip install vpcx[video])") from exc
        capture = cv2.VideoCapture(self.path)
        if not capture.isOpened():
            raise SourceError(f"{self.path}: cannot open video")
        stack = []
        while True:
            ok, frame = capture.read()
            if not ok:
                break
            stack.append(frame[:, :, ::-1].astype(np.float32))  # BGR -> RGB
        capture.release()
        if not stack:
            raise SourceError(f"{self.path}: no decodable frames")
        return _check_frames(np.stack(stack), self.path)


def open_source(path):
    path = str(path)
    lower = path.lower()
    if lower.endswith(".npy"):
        return NpyFrames(path)
    if lower.endswith(VIDEO_SUFFIXES):
        return VideoFrames(path)
    if os.path.isdir(path):
        names = os.listdir(path)
        if any(n.endswith(".npy") for n in names):
            return NpyFrames(path)
        if any(n.lower().endswith(IMAGE_SUFFIXES) for n in names):
            return ImageFrames(path)
        raise SourceError(f"{path}: directory holds neither .npy nor image frames")
    raise SourceError(f"{path}: not a video, frame directory, or .npy file")
