"""Rule-based facial expression classification from landmark geometry.

All measurements are normalized by the eye-to-mouth span so they are
invariant to face scale.  The brow-eye gap is z-scored against the
neutral-face calibration of the synthetic renderer (mean 0.2 span,
sigma 0.2/6).  Rules are checked in a fixed order (angry, surprised,
happy, sad) so the result is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

from sobot.codec import MessageValue, SchemaRegistry
from sobot.errors import SobotError
from sobot.vision.landmarks import LandmarkSet

EMOTION_LABELS = ("neutral", "happy", "sad", "surprised", "angry")

_BROW_GAP_MEAN = 0.2  # of span
_BROW_GAP_SIGMA = 0.2 / 6.0
_T_HAPPY = 0.04  # corner elevation above mouth center, of span
_T_SAD = -0.02
_T_BROW_Z = 2.0
_T_MOUTH_COMPRESSED = 0.155  # mouth height, of span


class NoFace(SobotError):
    pass


@dataclass
class EmotionEstimate:
    label: str
    confidence: float

    def to_value(self, registry: SchemaRegistry) -> MessageValue:
        return MessageValue(
            registry.get("std/EmotionEstimate"),
            {"label": self.label, "confidence": float(self.confidence)},
        )

    @staticmethod
    def from_value(value: MessageValue) -> "EmotionEstimate":
        return EmotionEstimate(value["label"], value["confidence"])


def _clamp01(v: float) -> float:
    return 0.0 if v < 0.0 else 1.0 if v > 1.0 else v


def classify_emotion(landmarks: LandmarkSet) -> EmotionEstimate:
    if not landmarks.face_detected:
        raise NoFace("no face in landmark set")
    missing = landmarks.missing_required()
    if missing:
        raise NoFace(f"landmarks incomplete: {missing}")
    p = landmarks.points

    y_eyeline = (
        p["eye_outer_L"][1] + p["eye_inner_L"][1]
        + p["eye_outer_R"][1] + p["eye_inner_R"][1]
    ) / 4.0
    corner_mean = (p["mouth_L"][1] + p["mouth_R"][1]) / 2.0
    span = corner_mean - y_eyeline
    if span <= 1e-9:
        raise NoFace("degenerate face geometry")

    mouth_center = (p["mouth_top"][1] + p["mouth_bottom"][1]) / 2.0
    corner_elev = (mouth_center - corner_mean) / span
    mouth_height = (p["mouth_bottom"][1] - p["mouth_top"][1]) / span
    brow_gap = (y_eyeline - (p["brow_L"][1] + p["brow_R"][1]) / 2.0) / span
    brow_z = (brow_gap - _BROW_GAP_MEAN) / _BROW_GAP_SIGMA

    if brow_z <= -_T_BROW_Z and mouth_height <= _T_MOUTH_COMPRESSED:
        return EmotionEstimate("angry", _clamp01(0.5 + (-brow_z - _T_BROW_Z) / 4.0))
    if brow_z >= _T_BROW_Z:
        return EmotionEstimate("surprised", _clamp01(0.5 + (brow_z - _T_BROW_Z) / 4.0))
    if corner_elev >= _T_HAPPY:
        return EmotionEstimate("happy", _clamp01(0.5 + (corner_elev - _T_HAPPY) / (2 * _T_HAPPY)))
    if corner_elev <= _T_SAD:
        return EmotionEstimate("sad", _clamp01(0.5 + (_T_SAD - corner_elev) / (2 * -_T_SAD)))
    strain = max(corner_elev / _T_HAPPY, corner_elev / _T_SAD, abs(brow_z) / _T_BROW_Z)
    return EmotionEstimate("neutral", max(0.5, _clamp01(1.0 - strain)))
