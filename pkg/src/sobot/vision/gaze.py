"""Closed-form gaze estimation from facial landmarks.

Angles use screen conventions throughout: yaw positive toward image
right, pitch positive toward image bottom ("down").  Head yaw comes from
the nose offset between the outer eye corners, head pitch from where the
nose sits between the eye line and the mouth line, and eye-in-head gaze
from pupil offsets normalized by the eye-corner box:

    head_yaw   = k_yaw  * (dL - dR) / (dL + dR)
    head_pitch = k_pitch * (r - r0),  r = (y_nose - y_eyes) / (y_mouth - y_eyes)
    gaze_yaw   = head_yaw   + k_eye * mean(pupil_dx)
    gaze_pitch = head_pitch + k_eye * mean(pupil_dy)

The discrete label combines a horizontal word (left/right, omitted when
centered) and a vertical word (up/down, omitted when centered), falling
back to "center" when both are, plus a head qualifier when |head_pitch|
crosses its own threshold:

    "center" | "left" | "left up" | "up" | ...
    optionally + " with head being up" / " with head being down"
"""

from __future__ import annotations

from dataclasses import dataclass

from sobot.codec import MessageValue, SchemaRegistry
from sobot.errors import SobotError
from sobot.vision.landmarks import LandmarkSet


class MissingLandmark(SobotError):
    def __init__(self, names: list[str]):
        self.names = list(names)
        super().__init__(f"required landmarks missing: {', '.join(names)}")


@dataclass(frozen=True)
class GazeParams:
    k_yaw: float = 60.0
    k_pitch: float = 90.0
    r0: float = 0.45
    k_eye: float = 30.0
    theta_gaze_deg: float = 10.0
    theta_head_deg: float = 15.0


DEFAULT_PARAMS = GazeParams()


@dataclass
class GazeEstimate:
    head_pitch_deg: float
    head_yaw_deg: float
    gaze_pitch_deg: float
    gaze_yaw_deg: float
    label: str

    def to_value(self, registry: SchemaRegistry) -> MessageValue:
        return MessageValue(
            registry.get("std/GazeEstimate"),
            {
                "head_pitch_deg": float(self.head_pitch_deg),
                "head_yaw_deg": float(self.head_yaw_deg),
                "gaze_pitch_deg": float(self.gaze_pitch_deg),
                "gaze_yaw_deg": float(self.gaze_yaw_deg),
                "label": self.label,
            },
        )

    @staticmethod
    def from_value(value: MessageValue) -> "GazeEstimate":
        d = value.data
        return GazeEstimate(
            d["head_pitch_deg"],
            d["head_yaw_deg"],
            d["gaze_pitch_deg"],
            d["gaze_yaw_deg"],
            d["label"],
        )


def gaze_label(gaze_yaw: float, gaze_pitch: float, head_pitch: float,
               params: GazeParams = DEFAULT_PARAMS) -> str:
    horizontal = ""
    if gaze_yaw <= -params.theta_gaze_deg:
        horizontal = "left"
    elif gaze_yaw >= params.theta_gaze_deg:
        horizontal = "right"
    vertical = ""
    if gaze_pitch <= -params.theta_gaze_deg:
        vertical = "up"
    elif gaze_pitch >= params.theta_gaze_deg:
        vertical = "down"
    label = f"{horizontal} {vertical}".strip() or "center"
    if head_pitch <= -params.theta_head_deg:
        label += " with head being up"
    elif head_pitch >= params.theta_head_deg:
        label += " with head being down"
    return label


def estimate_gaze(landmarks: LandmarkSet,
                  params: GazeParams = DEFAULT_PARAMS) -> GazeEstimate:
    missing = landmarks.missing_required()
    if missing:
        raise MissingLandmark(missing)
    p = landmarks.points

    nose_x, nose_y = p["nose_tip"]
    d_left = abs(nose_x - p["eye_outer_L"][0])
    d_right = abs(p["eye_outer_R"][0] - nose_x)
    span = d_left + d_right
    head_yaw = params.k_yaw * (d_left - d_right) / span if span > 1e-9 else 0.0

    eye_l_cx = (p["eye_outer_L"][0] + p["eye_inner_L"][0]) / 2.0
    eye_l_cy = (p["eye_outer_L"][1] + p["eye_inner_L"][1]) / 2.0
    eye_r_cx = (p["eye_outer_R"][0] + p["eye_inner_R"][0]) / 2.0
    eye_r_cy = (p["eye_outer_R"][1] + p["eye_inner_R"][1]) / 2.0
    y_eyeline = (eye_l_cy + eye_r_cy) / 2.0
    y_mouthline = (p["mouth_L"][1] + p["mouth_R"][1]) / 2.0
    face_span = y_mouthline - y_eyeline
    if abs(face_span) > 1e-9:
        ratio = (nose_y - y_eyeline) / face_span
    else:
        ratio = params.r0
    head_pitch = params.k_pitch * (ratio - params.r0)

    half_w_l = abs(p["eye_inner_L"][0] - p["eye_outer_L"][0]) / 2.0
    half_w_r = abs(p["eye_inner_R"][0] - p["eye_outer_R"][0]) / 2.0
    dx_l = (p["pupil_L"][0] - eye_l_cx) / half_w_l if half_w_l > 1e-9 else 0.0
    dy_l = (p["pupil_L"][1] - eye_l_cy) / half_w_l if half_w_l > 1e-9 else 0.0
    dx_r = (p["pupil_R"][0] - eye_r_cx) / half_w_r if half_w_r > 1e-9 else 0.0
    dy_r = (p["pupil_R"][1] - eye_r_cy) / half_w_r if half_w_r > 1e-9 else 0.0

    gaze_yaw = head_yaw + params.k_eye * (dx_l + dx_r) / 2.0
    gaze_pitch = head_pitch + params.k_eye * (dy_l + dy_r) / 2.0

    return GazeEstimate(
        head_pitch_deg=head_pitch,
        head_yaw_deg=head_yaw,
        gaze_pitch_deg=gaze_pitch,
        gaze_yaw_deg=gaze_yaw,
        label=gaze_label(gaze_yaw, gaze_pitch, head_pitch, params),
    )
