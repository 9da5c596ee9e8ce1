"""Vision graph integration: launch, counts, conservation."""

import time

import pytest

from sobot.bus import Bus, LaunchConfig, builtin_packages, load_launch

TOPIC_SCHEMAS = {
    "/image_raw": "std/Image",
    "/camera_info": "std/CameraInfo",
    "/image_cv2": "std/NdArray",
    "/landmarks": "std/LandmarkSet",
    "/image_raw/landmarked": "std/Image",
    "/face_emotion": "std/EmotionEstimate",
    "/gaze_position/gaze_dir": "std/String",
}


@pytest.fixture
def bus():
    b = Bus()
    yield b
    b.shutdown()


def vision_config(**video_params):
    params = {"source": "synthetic", "fps": 30, "width": 160, "height": 120,
              "realtime": False, "duration_s": 0.5, "schedule": "neutral"}
    params.update(video_params)
    return LaunchConfig.from_dict(
        {
            "nodes": [
                {"package": "vision", "node": "opencv_client"},
                {"package": "vision", "node": "landmark_detection"},
                {"package": "vision", "node": "face_emotion"},
                {"package": "vision", "node": "gaze_detector"},
                {"package": "vision", "node": "gaze_position"},
                # source last so every consumer is already subscribed
                {"package": "vision", "node": "video_stream", "params": params},
            ]
        }
    )


def counters(bus, topics):
    """Probe subscribers; call before load_launch so nothing is missed."""
    node = bus.create_node("probe")
    counts = {t: [] for t in topics}
    for t in topics:
        node.subscribe(t, TOPIC_SCHEMAS[t], counts[t].append,
                       queue_capacity=100_000)
    return counts


def wait_for(predicate, timeout=10.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        if predicate():
            return True
        time.sleep(0.01)
    return False


def test_full_graph_topics_and_nodes(bus):
    with load_launch(bus, vision_config(duration_s=0.2), builtin_packages()):
        info = bus.graph_info()
        for name in ("video_stream", "opencv_client", "landmark_detection",
                     "face_emotion", "gaze_detector", "gaze_position"):
            assert name in info.nodes
        for topic in ("/image_raw", "/camera_info", "/image_cv2",
                      "/image_raw/landmarked", "/landmarks", "/face_emotion",
                      "/gaze_position/gaze_dir"):
            assert topic in info.topics
        assert "gaze_detector" in info.services


def test_pipeline_conservation(bus):
    counts = counters(bus, ["/image_raw", "/image_cv2", "/landmarks",
                            "/face_emotion", "/gaze_position/gaze_dir",
                            "/image_raw/landmarked"])
    # 30 frames as fast as the pipeline can chew them
    graph = load_launch(bus, vision_config(fps=30, duration_s=1.0),
                        builtin_packages())
    assert wait_for(lambda: len(counts["/image_raw"]) >= 30)
    assert bus.drain(20)
    graph.shutdown()
    n = len(counts["/image_raw"])
    assert n == 30
    for topic in ("/image_cv2", "/landmarks", "/image_raw/landmarked",
                  "/face_emotion", "/gaze_position/gaze_dir"):
        assert len(counts[topic]) == n, topic


def test_frame_counting_at_rate(bus):
    counts = counters(bus, ["/image_raw"])
    config = vision_config(fps=15, duration_s=2.0, realtime=True)
    graph = load_launch(bus, config, builtin_packages())
    time.sleep(2.5)
    graph.shutdown()
    bus.drain()
    # 30 +- 1 frames in 2 s at 15 fps
    assert 29 <= len(counts["/image_raw"]) <= 31


def test_camera_info_matches_frame_dimensions(bus):
    counts = counters(bus, ["/image_raw", "/camera_info"])
    graph = load_launch(bus, vision_config(duration_s=0.2), builtin_packages())
    assert wait_for(lambda: counts["/camera_info"] and counts["/image_raw"])
    graph.shutdown()
    bus.drain()
    info = counts["/camera_info"][0]
    frame = counts["/image_raw"][0]
    assert info["width"] == frame["width"]
    assert info["height"] == frame["height"]


def test_disabling_emotion_keeps_landmark_branch(bus):
    raw = {
        "nodes": [
            {"package": "vision", "node": "video_stream",
             "params": {"source": "synthetic", "fps": 30, "width": 160,
                        "height": 120, "realtime": False, "duration_s": 0.2}},
            {"package": "vision", "node": "opencv_client"},
            {"package": "vision", "node": "landmark_detection"},
            {"package": "vision", "node": "face_emotion", "enabled": False},
            {"package": "vision", "node": "gaze_detector"},
            {"package": "vision", "node": "gaze_position"},
        ]
    }
    with load_launch(bus, LaunchConfig.from_dict(raw), builtin_packages()):
        info = bus.graph_info()
        assert "face_emotion" not in info.nodes
        assert "/face_emotion" not in info.topics
        assert "/landmarks" in info.topics


def test_backend_swap_keeps_graph_shape(bus):
    from sobot.vision import FiducialBackend, register_backend

    class AltBackend(FiducialBackend):
        name = "alt"

    register_backend("alt", AltBackend)
    base = vision_config(duration_s=0.1)
    with load_launch(bus, base, builtin_packages()):
        first = bus.graph_info().signature()
    alt_bus = Bus()
    try:
        raw = {"nodes": [dict(package=e.package, node=e.node, enabled=e.enabled,
                              params=dict(e.params), remappings=dict(e.remappings))
                         for e in base.entries]}
        raw["nodes"][2]["params"]["backend"] = "alt"
        raw["nodes"][3]["params"]["backend"] = "alt"
        with load_launch(alt_bus, LaunchConfig.from_dict(raw), builtin_packages()):
            second = alt_bus.graph_info().signature()
    finally:
        alt_bus.shutdown()
    assert first == second
