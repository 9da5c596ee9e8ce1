"""Parametric synthetic face: ground truth for the vision pipeline.

The face is a flat cartoon whose landmark geometry is the exact inverse
of the gaze estimator's closed forms: picking a head pose and pupil
offsets places the nose and pupils so the estimator recovers those same
numbers.  Every landmark position is available analytically, so detector
accuracy and gaze labels can be scored against exact ground truth.

Each rendered frame additionally carries one fiducial pixel per landmark
in a reserved color family (R=255, G=1, B=landmark index) that the
reference detector decodes; nothing else in the palette uses that family.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import yaml

from sobot.vision.gaze import DEFAULT_PARAMS, GazeEstimate, GazeParams, gaze_label
from sobot.vision.landmarks import REQUIRED_FACE_POINTS, LandmarkSet

# eye x-constants are dyadic so a symmetric face yields bit-exact zero yaw
EYELINE_Y = 0.40
MOUTH_Y = 0.70
EYE_CX_L = 0.375
EYE_CX_R = 0.625
EYE_CORNER_HW = 0.0625
EYE_HALF_H = 0.022
OUTER_SPAN = 0.5 - (EYE_CX_L - EYE_CORNER_HW)  # nose-to-outer-corner reach at yaw 0
BROW_GAP0 = 0.06
BROW_GAIN = 0.03
CHIN = (0.5, 0.82)
MOUTH_CORNER_DX = 0.08
MOUTH_CURVE_GAIN = 0.04
MOUTH_HALF_GAP = 0.02


@dataclass(frozen=True)
class SyntheticScene:
    """True pose and expression; angles in the screen convention
    (yaw positive = image right, pitch positive = image down)."""

    head_pitch_deg: float = 0.0
    head_yaw_deg: float = 0.0
    pupil_dx: float = 0.0  # [-1, 1] of the eye-corner half width
    pupil_dy: float = 0.0
    mouth_curve: float = 0.0  # positive = corners raised (smile)
    mouth_open: float = 0.2  # [0, 1]
    brow_raise: float = 0.0  # [-1, 1]
    seed: int = 0


def analytic_landmarks(scene: SyntheticScene,
                       params: GazeParams = DEFAULT_PARAMS) -> LandmarkSet:
    """Exact landmark positions for a scene (no rendering involved)."""
    corner_y = MOUTH_Y - MOUTH_CURVE_GAIN * scene.mouth_curve
    span = corner_y - EYELINE_Y
    ratio = params.r0 + scene.head_pitch_deg / params.k_pitch
    nose = (
        0.5 + OUTER_SPAN * scene.head_yaw_deg / params.k_yaw,
        EYELINE_Y + ratio * span,
    )
    pupil_off_x = scene.pupil_dx * EYE_CORNER_HW
    pupil_off_y = scene.pupil_dy * EYE_CORNER_HW
    brow_y = EYELINE_Y - BROW_GAP0 - BROW_GAIN * scene.brow_raise
    mouth_top_y = MOUTH_Y - MOUTH_HALF_GAP - 0.02 * scene.mouth_open
    mouth_bot_y = MOUTH_Y + MOUTH_HALF_GAP + 0.04 * scene.mouth_open
    points = {
        "eye_outer_L": (EYE_CX_L - EYE_CORNER_HW, EYELINE_Y),
        "eye_inner_L": (EYE_CX_L + EYE_CORNER_HW, EYELINE_Y),
        "eye_outer_R": (EYE_CX_R + EYE_CORNER_HW, EYELINE_Y),
        "eye_inner_R": (EYE_CX_R - EYE_CORNER_HW, EYELINE_Y),
        "pupil_L": (EYE_CX_L + pupil_off_x, EYELINE_Y + pupil_off_y),
        "pupil_R": (EYE_CX_R + pupil_off_x, EYELINE_Y + pupil_off_y),
        "nose_tip": nose,
        "mouth_L": (0.5 - MOUTH_CORNER_DX, corner_y),
        "mouth_R": (0.5 + MOUTH_CORNER_DX, corner_y),
        "mouth_top": (0.5, mouth_top_y),
        "mouth_bottom": (0.5, mouth_bot_y),
        "brow_L": (EYE_CX_L, brow_y),
        "brow_R": (EYE_CX_R, brow_y),
        "chin": CHIN,
    }
    return LandmarkSet(face_detected=True, points=points)


def true_gaze(scene: SyntheticScene,
              params: GazeParams = DEFAULT_PARAMS) -> GazeEstimate:
    """Ground-truth gaze from scene parameters alone."""
    gaze_yaw = scene.head_yaw_deg + params.k_eye * scene.pupil_dx
    gaze_pitch = scene.head_pitch_deg + params.k_eye * scene.pupil_dy
    return GazeEstimate(
        head_pitch_deg=scene.head_pitch_deg,
        head_yaw_deg=scene.head_yaw_deg,
        gaze_pitch_deg=gaze_pitch,
        gaze_yaw_deg=gaze_yaw,
        label=gaze_label(gaze_yaw, gaze_pitch, scene.head_pitch_deg, params),
    )


# -- rendering ----------------------------------------------------------

FIDUCIAL_R = 255
FIDUCIAL_G = 1
FIDUCIAL_ORDER = REQUIRED_FACE_POINTS  # index in this tuple = blue channel

_SKIN = (210, 180, 150)
_EYE_WHITE = (245, 245, 245)
_PUPIL = (15, 15, 15)
_BROW = (60, 40, 20)
_MOUTH = (150, 50, 50)
_NOSE = (180, 140, 110)


def _px(v: float, extent: int) -> int:
    return int(round(v * (extent - 1)))


def _disc(img: np.ndarray, cx: float, cy: float, radius: float, color) -> None:
    h, w = img.shape[:2]
    x = np.arange(w)[None, :] / (w - 1)
    y = np.arange(h)[:, None] / (h - 1)
    mask = (x - cx) ** 2 + (y - cy) ** 2 <= radius**2
    img[mask] = color


def _box(img: np.ndarray, x0: float, x1: float, y0: float, y1: float, color) -> None:
    h, w = img.shape[:2]
    img[_px(y0, h) : _px(y1, h) + 1, _px(x0, w) : _px(x1, w) + 1] = color


def render_scene(scene: SyntheticScene, width: int = 320, height: int = 240,
                 params: GazeParams = DEFAULT_PARAMS) -> np.ndarray:
    """Deterministic rgb8 frame [height, width, 3] for a scene."""
    rng = np.random.default_rng(scene.seed)
    img = rng.integers(35, 46, size=(height, width, 3), dtype=np.uint8)
    marks = analytic_landmarks(scene, params).points

    # head
    x = np.arange(width)[None, :] / (width - 1)
    y = np.arange(height)[:, None] / (height - 1)
    head = ((x - 0.5) / 0.28) ** 2 + ((y - 0.55) / 0.33) ** 2 <= 1.0
    img[head] = _SKIN

    # eyes and pupils
    for cx in (EYE_CX_L, EYE_CX_R):
        _box(img, cx - EYE_CORNER_HW, cx + EYE_CORNER_HW,
             EYELINE_Y - EYE_HALF_H, EYELINE_Y + EYE_HALF_H, _EYE_WHITE)
    _disc(img, *marks["pupil_L"], 0.012, _PUPIL)
    _disc(img, *marks["pupil_R"], 0.012, _PUPIL)

    # brows
    brow_y = marks["brow_L"][1]
    for cx in (EYE_CX_L, EYE_CX_R):
        _box(img, cx - 0.06, cx + 0.06, brow_y - 0.006, brow_y + 0.006, _BROW)

    # nose and mouth
    _disc(img, *marks["nose_tip"], 0.015, _NOSE)
    _box(img, 0.5 - MOUTH_CORNER_DX, 0.5 + MOUTH_CORNER_DX,
         marks["mouth_top"][1], marks["mouth_bottom"][1], _MOUTH)

    # chin shading
    _disc(img, *marks["chin"], 0.01, (190, 160, 130))

    # fiducials last so nothing overdraws them
    for idx, name in enumerate(FIDUCIAL_ORDER):
        mx, my = marks[name]
        img[_px(my, height), _px(mx, width)] = (FIDUCIAL_R, FIDUCIAL_G, idx)
    return img


def render_blank(width: int = 320, height: int = 240, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.integers(35, 46, size=(height, width, 3), dtype=np.uint8)


# -- pose schedules -------------------------------------------------------


@dataclass
class SceneSchedule:
    """Step function over time: the scene of the last keyframe at or
    before t applies."""

    keyframes: list[tuple[float, SyntheticScene]]

    def __post_init__(self) -> None:
        self.keyframes = sorted(self.keyframes, key=lambda kv: kv[0])
        if not self.keyframes or self.keyframes[0][0] > 0.0:
            self.keyframes.insert(0, (0.0, SyntheticScene()))

    def at(self, t: float) -> SyntheticScene:
        current = self.keyframes[0][1]
        for start, scene in self.keyframes:
            if t >= start:
                current = scene
            else:
                break
        return current

    @staticmethod
    def from_yaml(text: str) -> "SceneSchedule":
        raw = yaml.safe_load(text) or []
        frames = []
        for item in raw:
            t = float(item.pop("t", 0.0))
            frames.append((t, SyntheticScene(**item)))
        return SceneSchedule(frames)


def builtin_schedule(name: str) -> SceneSchedule:
    if name == "neutral":
        return SceneSchedule([(0.0, SyntheticScene())])
    if name == "gaze_demo":
        # scripted pose walk: center, left-up by pupils alone, the same
        # with the head pitched up, right-down, back to center
        return SceneSchedule(
            [
                (0.0, SyntheticScene()),
                (2.0, SyntheticScene(pupil_dx=-0.5, pupil_dy=-0.5)),
                (4.0, SyntheticScene(pupil_dx=-0.5, pupil_dy=-0.5,
                                     head_pitch_deg=-20.0)),
                (6.0, SyntheticScene(pupil_dx=0.5, pupil_dy=0.5)),
                (8.0, SyntheticScene()),
            ]
        )
    if name == "smile_demo":
        return SceneSchedule([(0.0, SyntheticScene(mouth_curve=0.8, mouth_open=0.3))])
    raise KeyError(f"unknown schedule {name!r}")
