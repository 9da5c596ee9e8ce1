import pytest

from sobot.vision import NoFace, SyntheticScene, analytic_landmarks, classify_emotion
from sobot.vision.landmarks import LandmarkSet


def classify(scene):
    return classify_emotion(analytic_landmarks(scene))


def test_neutral_scene_is_neutral():
    est = classify(SyntheticScene())
    assert est.label == "neutral"
    assert 0.0 <= est.confidence <= 1.0


def test_smile_sweep_is_happy_with_confidence():
    for curve in (0.5, 0.8, 1.0):
        est = classify(SyntheticScene(mouth_curve=curve, mouth_open=0.3))
        assert est.label == "happy", curve
        assert est.confidence >= 0.6


def test_frown_is_sad():
    assert classify(SyntheticScene(mouth_curve=-0.6)).label == "sad"


def test_raised_brows_are_surprised():
    assert classify(SyntheticScene(brow_raise=1.0)).label == "surprised"


def test_brow_drop_with_compressed_mouth_is_angry():
    est = classify(SyntheticScene(brow_raise=-1.0, mouth_open=0.0))
    assert est.label == "angry"


def test_brow_drop_alone_is_not_angry():
    # open mouth defeats the compression requirement
    est = classify(SyntheticScene(brow_raise=-1.0, mouth_open=0.6))
    assert est.label != "angry"


def test_no_face_raises():
    with pytest.raises(NoFace):
        classify_emotion(LandmarkSet(False, {}))


def test_determinism():
    scene = SyntheticScene(mouth_curve=0.7, brow_raise=0.2)
    a = classify(scene)
    b = classify(scene)
    assert (a.label, a.confidence) == (b.label, b.confidence)
