import numpy as np
import pytest

from sobot.codec import ImageFrame
from sobot.vision import LandmarkSet, image_to_array, render_overlay
from sobot.vision.frames import BadStride, array_to_frame, frame_to_array


def test_known_2x2_conversion():
    data = bytes(range(12))
    arr = image_to_array(2, 2, 6, data)
    assert arr.tolist() == [
        [[0, 1, 2], [3, 4, 5]],
        [[6, 7, 8], [9, 10, 11]],
    ]


def test_stride_padding_stripped():
    # 2x2 frame, stride 8: two padding bytes per row
    row0 = bytes([1, 2, 3, 4, 5, 6, 0xAA, 0xBB])
    row1 = bytes([7, 8, 9, 10, 11, 12, 0xCC, 0xDD])
    arr = image_to_array(2, 2, 8, row0 + row1)
    assert arr.tolist() == [
        [[1, 2, 3], [4, 5, 6]],
        [[7, 8, 9], [10, 11, 12]],
    ]


def test_bad_stride_rejected():
    with pytest.raises(BadStride):
        image_to_array(2, 2, 5, bytes(10))
    with pytest.raises(BadStride):
        image_to_array(2, 2, 6, bytes(11))


def test_overlay_passthrough_without_landmarks():
    frame = array_to_frame(np.zeros((10, 10, 3), dtype=np.uint8))
    out = render_overlay(frame, LandmarkSet(False, {}))
    assert out.data == frame.data


def test_overlay_marker_centered():
    h = w = 21
    frame = array_to_frame(np.zeros((h, w, 3), dtype=np.uint8))
    out = render_overlay(frame, LandmarkSet(False, {"p": (0.5, 0.5)}))
    arr = frame_to_array(out)
    cx = cy = 10  # 0.5 * (21 - 1)
    assert arr[cy, cx].tolist() == [0, 255, 0]
    assert arr[cy - 1 : cy + 2, cx - 1 : cx + 2].reshape(-1, 3).tolist() == [[0, 255, 0]] * 9
    # everything farther than one pixel from the marker is untouched
    untouched = arr.copy()
    untouched[cy - 1 : cy + 2, cx - 1 : cx + 2] = 0
    assert not untouched.any()


def test_overlay_idempotent():
    rng = np.random.default_rng(3)
    frame = array_to_frame(rng.integers(0, 255, size=(32, 40, 3), dtype=np.uint8))
    marks = LandmarkSet(False, {"a": (0.2, 0.3), "b": (0.9, 0.8)})
    once = render_overlay(frame, marks)
    twice = render_overlay(once, marks)
    assert once.data == twice.data


def test_frame_array_roundtrip():
    rng = np.random.default_rng(5)
    arr = rng.integers(0, 255, size=(24, 30, 3), dtype=np.uint8)
    back = frame_to_array(array_to_frame(arr))
    assert np.array_equal(arr, back)
