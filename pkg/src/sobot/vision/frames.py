"""Frame plumbing: stride handling, ndarray conversion, landmark overlay."""

from __future__ import annotations

import numpy as np

from sobot.codec import ImageFrame, NdArrayMessage, from_numpy, to_numpy
from sobot.errors import SobotError
from sobot.vision.landmarks import LandmarkSet


class BadStride(SobotError):
    pass


class BadShape(SobotError):
    pass


def image_to_array(width: int, height: int, stride: int, data: bytes) -> np.ndarray:
    """Strip row padding; returns [height, width, 3] u8."""
    if stride < 3 * width:
        raise BadStride(f"stride {stride} < 3*width {3 * width}")
    if len(data) != height * stride:
        raise BadStride(f"{len(data)} data bytes, expected height*stride {height * stride}")
    rows = np.frombuffer(data, dtype=np.uint8).reshape(height, stride)
    return rows[:, : 3 * width].reshape(height, width, 3).copy()


def frame_to_array(frame: ImageFrame) -> np.ndarray:
    return image_to_array(frame.width, frame.height, frame.stride, frame.data)


def array_to_frame(arr: np.ndarray) -> ImageFrame:
    if arr.dtype != np.uint8 or arr.ndim != 3 or arr.shape[2] != 3:
        raise BadShape(f"expected [h,w,3] u8, got {arr.dtype} {arr.shape}")
    h, w = arr.shape[:2]
    return ImageFrame(width=w, height=h, stride=3 * w,
                      data=np.ascontiguousarray(arr).tobytes())


def frame_to_ndarray_message(frame: ImageFrame) -> NdArrayMessage:
    return from_numpy(frame_to_array(frame), "u8")


def ndarray_message_to_array(msg: NdArrayMessage) -> np.ndarray:
    if msg.dtype != "u8" or len(msg.shape) != 3 or msg.shape[2] != 3:
        raise BadShape(f"expected u8 [h,w,3], got {msg.dtype} {msg.shape}")
    return to_numpy(msg)


MARKER_COLOR = (0, 255, 0)


def render_overlay(frame: ImageFrame, landmarks: LandmarkSet) -> ImageFrame:
    """Stamp a 3x3 marker at each landmark; passthrough when no face."""
    if not landmarks.points:
        return ImageFrame(frame.width, frame.height, frame.stride,
                          frame.data, frame.encoding)
    arr = frame_to_array(frame)
    h, w = arr.shape[:2]
    for x, y in landmarks.points.values():
        cx = int(round(x * (w - 1)))
        cy = int(round(y * (h - 1)))
        x0, x1 = max(0, cx - 1), min(w, cx + 2)
        y0, y1 = max(0, cy - 1), min(h, cy + 2)
        arr[y0:y1, x0:x1] = MARKER_COLOR
    return array_to_frame(arr)
