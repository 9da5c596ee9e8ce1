"""Perception skills: synthetic camera, landmarks, emotion, gaze."""

from sobot.vision.detect import FiducialBackend, detect_landmarks, make_backend, register_backend
from sobot.vision.emotion import EMOTION_LABELS, EmotionEstimate, NoFace, classify_emotion
from sobot.vision.frames import (
    BadShape,
    BadStride,
    array_to_frame,
    frame_to_array,
    image_to_array,
    render_overlay,
)
from sobot.vision.gaze import (
    DEFAULT_PARAMS,
    GazeEstimate,
    GazeParams,
    MissingLandmark,
    estimate_gaze,
    gaze_label,
)
from sobot.vision.landmarks import REQUIRED_FACE_POINTS, LandmarkSet
from sobot.vision.scene import (
    SceneSchedule,
    SyntheticScene,
    analytic_landmarks,
    builtin_schedule,
    render_blank,
    render_scene,
    true_gaze,
)

__all__ = [
    "FiducialBackend",
    "detect_landmarks",
    "make_backend",
    "register_backend",
    "EMOTION_LABELS",
    "EmotionEstimate",
    "NoFace",
    "classify_emotion",
    "BadShape",
    "BadStride",
    "array_to_frame",
    "frame_to_array",
    "image_to_array",
    "render_overlay",
    "DEFAULT_PARAMS",
    "GazeEstimate",
    "GazeParams",
    "MissingLandmark",
    "estimate_gaze",
    "gaze_label",
    "REQUIRED_FACE_POINTS",
    "LandmarkSet",
    "SceneSchedule",
    "SyntheticScene",
    "analytic_landmarks",
    "builtin_schedule",
    "render_blank",
    "render_scene",
    "true_gaze",
]
