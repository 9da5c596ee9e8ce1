"""Vision pipeline nodes.

Topic contract:
    image_raw             std/Image        (video_stream)
    camera_info           std/CameraInfo   (video_stream, 1 Hz)
    image_cv2             std/NdArray      (opencv_client, u8 [h,w,3])
    landmarks             std/LandmarkSet  (landmark_detection)
    image_raw/landmarked  std/Image        (landmark_detection)
    face_emotion          std/EmotionEstimate (face_emotion, face frames only)
    /gaze_position/gaze_dir  std/String    (gaze_position, face frames only)

Service: gaze_detector (std/LandmarkSet -> std/GazeEstimate).
"""

from __future__ import annotations

import logging
import threading
import time

from sobot.bus import NodeContext
from sobot.codec import (
    CameraInfo,
    ImageFrame,
    MessageValue,
    decode,
    from_message_fields,
    from_numpy,
    to_message_fields,
)
from sobot.errors import SobotError
from sobot.vision import scene as scene_mod
from sobot.vision.detect import detect_landmarks, make_backend
from sobot.vision.emotion import NoFace, classify_emotion
from sobot.vision.frames import (
    BadShape,
    BadStride,
    array_to_frame,
    image_to_array,
    ndarray_message_to_array,
    render_overlay,
)
from sobot.vision.gaze import GazeParams, MissingLandmark, estimate_gaze
from sobot.vision.landmarks import LandmarkSet

log = logging.getLogger(__name__)

PIPELINE_QUEUE = 1024


class SourceUnavailable(SobotError):
    pass


def _load_schedule(ctx: NodeContext) -> scene_mod.SceneSchedule:
    name = ctx.param("schedule", "neutral")
    try:
        return scene_mod.builtin_schedule(name)
    except KeyError:
        pass
    try:
        with open(name, "r", encoding="utf-8") as fh:
            return scene_mod.SceneSchedule.from_yaml(fh.read())
    except OSError as exc:
        raise SourceUnavailable(f"schedule {name!r}: {exc}") from None


def video_stream(ctx: NodeContext):
    source = ctx.param("source", "synthetic")
    fps = ctx.param("fps", 15.0, kind=float)
    width = ctx.param("width", 320, kind=int)
    height = ctx.param("height", 240, kind=int)
    duration = ctx.param("duration_s", 0.0, kind=float)  # 0 = run until stopped
    realtime = bool(ctx.param("realtime", True))
    if fps <= 0:
        raise SourceUnavailable(f"fps must be positive, got {fps}")

    pub_img = ctx.advertise("image_raw", "std/Image")
    pub_info = ctx.advertise("camera_info", "std/CameraInfo")
    stop_flag = threading.Event()
    registry = ctx.bus.registry

    if source == "synthetic":
        schedule = _load_schedule(ctx)

        def run() -> None:
            info = CameraInfo(width, height, float(width), float(width),
                              width / 2.0, height / 2.0)
            info_value = info.to_value(registry)
            start = time.monotonic()
            i = 0
            info_every = max(1, int(round(fps)))
            while not stop_flag.is_set():
                t = i / fps
                if duration and t >= duration:
                    break
                if i % info_every == 0:
                    pub_info.publish(info_value)
                frame_scene = schedule.at(t)
                arr = scene_mod.render_scene(frame_scene, width, height)
                pub_img.publish(array_to_frame(arr).to_value(registry))
                i += 1
                if realtime:
                    next_at = start + i / fps
                    delay = next_at - time.monotonic()
                    if delay > 0:
                        stop_flag.wait(delay)

    elif source == "playback":
        from sobot.bag import BagCorrupt, BagReader

        path = ctx.param("bag", "", kind=str)
        try:
            reader = BagReader(path)
        except (OSError, BagCorrupt) as exc:
            raise SourceUnavailable(f"bag {path!r}: {exc}") from None
        reader.load_schemas(registry)

        def run() -> None:
            img_key = ctx.resolve("image_raw")
            info_key = ctx.resolve("camera_info")
            records = [
                r for r in reader.records
                if r.topic.lstrip("/") in (img_key.lstrip("/"), info_key.lstrip("/"))
            ]
            if not records:
                return
            t0 = records[0].timestamp_ns
            start = time.monotonic()
            for rec in records:
                if stop_flag.is_set():
                    return
                if realtime:
                    due = start + (rec.timestamp_ns - t0) / 1e9
                    delay = due - time.monotonic()
                    if delay > 0:
                        stop_flag.wait(delay)
                schema = registry.get(reader.topics[rec.topic])
                value = decode(rec.payload, schema, registry)
                if rec.topic.lstrip("/") == img_key.lstrip("/"):
                    pub_img.publish(value)
                else:
                    pub_info.publish(value)

    else:
        raise SourceUnavailable(f"unknown source {source!r}")

    worker = threading.Thread(target=run, daemon=True, name="video_stream")
    worker.start()

    def stop() -> None:
        stop_flag.set()
        worker.join(timeout=5)

    return stop


def opencv_client(ctx: NodeContext):
    registry = ctx.bus.registry
    pub = ctx.advertise("image_cv2", "std/NdArray")
    latest_info: dict = {}

    ctx.subscribe("camera_info", "std/CameraInfo",
                  lambda v: latest_info.update(v.data), queue_capacity=8)

    def on_frame(value: MessageValue) -> None:
        d = value.data
        try:
            arr = image_to_array(d["width"], d["height"], d["stride"], d["data"])
        except BadStride as exc:
            log.warning("opencv_client: dropping frame: %s", exc)
            return
        nd = from_numpy(arr, "u8")
        pub.publish(MessageValue(registry.get("std/NdArray"), to_message_fields(nd)))

    ctx.subscribe("image_raw", "std/Image", on_frame, queue_capacity=PIPELINE_QUEUE)
    return None


def landmark_detection(ctx: NodeContext):
    registry = ctx.bus.registry
    backend = make_backend(ctx.param("backend", "reference"))
    pub_marks = ctx.advertise("landmarks", "std/LandmarkSet")
    pub_overlay = ctx.advertise("image_raw/landmarked", "std/Image")

    def on_array(value: MessageValue) -> None:
        try:
            nd = from_message_fields(value.data)
            landmarks = detect_landmarks(nd, backend)
        except (BadShape, SobotError) as exc:
            log.warning("landmark_detection: %s", exc)
            return
        pub_marks.publish(landmarks.to_value(registry))
        frame = array_to_frame(ndarray_message_to_array(nd))
        pub_overlay.publish(render_overlay(frame, landmarks).to_value(registry))

    ctx.subscribe("image_cv2", "std/NdArray", on_array, queue_capacity=PIPELINE_QUEUE)
    return None


def face_emotion(ctx: NodeContext):
    registry = ctx.bus.registry
    backend = make_backend(ctx.param("backend", "reference"))
    pub = ctx.advertise("face_emotion", "std/EmotionEstimate")

    def on_array(value: MessageValue) -> None:
        try:
            landmarks = detect_landmarks(from_message_fields(value.data), backend)
        except (BadShape, SobotError) as exc:
            log.warning("face_emotion: %s", exc)
            return
        if not landmarks.face_detected:
            return
        try:
            estimate = classify_emotion(landmarks)
        except NoFace:
            return
        pub.publish(estimate.to_value(registry))

    ctx.subscribe("image_cv2", "std/NdArray", on_array, queue_capacity=PIPELINE_QUEUE)
    return None


def gaze_detector(ctx: NodeContext):
    params = GazeParams(
        k_yaw=ctx.param("k_yaw", GazeParams.k_yaw, kind=float),
        k_pitch=ctx.param("k_pitch", GazeParams.k_pitch, kind=float),
        r0=ctx.param("r0", GazeParams.r0, kind=float),
        k_eye=ctx.param("k_eye", GazeParams.k_eye, kind=float),
        theta_gaze_deg=ctx.param("theta_gaze_deg", GazeParams.theta_gaze_deg, kind=float),
        theta_head_deg=ctx.param("theta_head_deg", GazeParams.theta_head_deg, kind=float),
    )
    registry = ctx.bus.registry

    def handle(request: MessageValue) -> MessageValue:
        landmarks = LandmarkSet.from_value(request)
        return estimate_gaze(landmarks, params).to_value(registry)

    ctx.register_service("gaze_detector", "std/LandmarkSet", "std/GazeEstimate", handle)
    return None


def gaze_position(ctx: NodeContext):
    registry = ctx.bus.registry
    pub = ctx.advertise("/gaze_position/gaze_dir", "std/String")
    timeout_ms = ctx.param("timeout_ms", 2000, kind=int)

    def on_landmarks(value: MessageValue) -> None:
        if not value["face_detected"]:
            return
        try:
            response = ctx.call("gaze_detector", value, timeout_ms=timeout_ms)
        except SobotError as exc:
            log.warning("gaze_position: %s", exc)
            return
        pub.publish(MessageValue(registry.get("std/String"),
                                 {"data": response["label"]}))

    ctx.subscribe("landmarks", "std/LandmarkSet", on_landmarks,
                  queue_capacity=PIPELINE_QUEUE)
    return None
