"""Pluggable landmark detection backends.

A backend maps an rgb8 array to a :class:`LandmarkSet`.  The reference
backend decodes the synthetic renderer's fiducial pixels exactly; heavier
model-based detectors can register under their own name and be selected
per node with the ``backend`` launch parameter, without touching topic
contracts.
"""

from __future__ import annotations

import numpy as np

from sobot.codec import NdArrayMessage
from sobot.vision.frames import BadShape, ndarray_message_to_array
from sobot.vision.landmarks import REQUIRED_FACE_POINTS, LandmarkSet
from sobot.vision.scene import FIDUCIAL_G, FIDUCIAL_ORDER, FIDUCIAL_R


class FiducialBackend:
    """Exact decoder for renderer-marked faces."""

    name = "reference"

    def detect(self, arr: np.ndarray) -> LandmarkSet:
        h, w = arr.shape[:2]
        mask = (arr[:, :, 0] == FIDUCIAL_R) & (arr[:, :, 1] == FIDUCIAL_G)
        ys, xs = np.nonzero(mask)
        points: dict[str, tuple[float, float]] = {}
        for y, x in zip(ys.tolist(), xs.tolist()):
            idx = int(arr[y, x, 2])
            if idx >= len(FIDUCIAL_ORDER):
                continue
            name = FIDUCIAL_ORDER[idx]
            points[name] = (
                x / (w - 1) if w > 1 else 0.0,
                y / (h - 1) if h > 1 else 0.0,
            )
        detected = all(n in points for n in REQUIRED_FACE_POINTS)
        if not detected:
            return LandmarkSet(False, {})
        return LandmarkSet(True, points)


_BACKENDS = {"reference": FiducialBackend}


def register_backend(name: str, factory) -> None:
    _BACKENDS[name] = factory


def make_backend(name: str):
    try:
        return _BACKENDS[name]()
    except KeyError:
        raise KeyError(f"unknown landmark backend {name!r}; "
                       f"have {sorted(_BACKENDS)}") from None


def detect_landmarks(frame: NdArrayMessage, backend=None) -> LandmarkSet:
    """Run a backend over an u8 [h,w,3] ndarray message."""
    arr = ndarray_message_to_array(frame)  # raises BadShape
    if backend is None:
        backend = FiducialBackend()
    return backend.detect(arr)
