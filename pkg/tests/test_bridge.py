import json
import time

import pytest
from fastapi.testclient import TestClient

from sobot.bridge import json_to_message, message_to_json
from sobot.bridge.jsoncodec import FieldMissing, TypeMismatch
from sobot.bridge.server import _SessionQueue, create_bridge_app
from sobot.bus import Bus
from sobot.codec import ImageFrame, MessageValue, TwistCommand, string_value


@pytest.fixture
def bus():
    b = Bus()
    yield b
    b.shutdown()


@pytest.fixture
def api(bus):
    return TestClient(create_bridge_app(bus))


# -- json codec -----------------------------------------------------------


def test_twist_json_roundtrip(registry):
    payload = {f"{a}_{c}": float(i) for i, (a, c) in enumerate(
        (a, c) for a in ("linear", "angular") for c in "xyz")}
    value = json_to_message(payload, registry.get("std/Twist"), registry)
    assert message_to_json(value, registry) == payload


def test_image_bytes_base64_roundtrip(registry):
    frame = ImageFrame(2, 2, 6, bytes(range(12)))
    value = frame.to_value(registry)
    as_json = message_to_json(value, registry)
    assert isinstance(as_json["data"], str)
    back = json_to_message(as_json, registry.get("std/Image"), registry)
    assert back == value


def test_missing_field_names_path(registry):
    with pytest.raises(FieldMissing) as err:
        json_to_message({"width": 1}, registry.get("std/Image"), registry)
    assert err.value.path in ("height", "encoding", "stride", "data")


def test_type_mismatch_names_path(registry):
    with pytest.raises(TypeMismatch) as err:
        json_to_message({"data": 7}, registry.get("std/String"), registry)
    assert err.value.path == "data"


# -- websocket ops ----------------------------------------------------------


def test_subscribe_then_bus_publish_reaches_client(api, bus):
    node = bus.create_node("gazer")
    pub = node.advertise("/gaze_position/gaze_dir", "std/String")
    with api.websocket_connect("/ws") as ws:
        ws.send_text(json.dumps({"op": "subscribe",
                                 "topic": "/gaze_position/gaze_dir"}))
        time.sleep(0.1)
        pub.publish(string_value(bus.registry, "left up"))
        envelope = ws.receive_json()
        assert envelope == {
            "op": "publish",
            "topic": "/gaze_position/gaze_dir",
            "payload": {"data": "left up"},
        }


def test_client_publish_reaches_bus(api, bus):
    node = bus.create_node("sink")
    node.advertise("/cmd_vel_wheel", "std/Twist")
    got = []
    node.subscribe("/cmd_vel_wheel", "std/Twist", got.append)
    zeros = {f"{a}_{c}": 0.0 for a in ("linear", "angular") for c in "xyz"}
    with api.websocket_connect("/ws") as ws:
        ws.send_text(json.dumps({"op": "publish", "topic": "cmd_vel_wheel",
                                 "payload": zeros}))
        deadline = time.monotonic() + 3
        while time.monotonic() < deadline and not got:
            time.sleep(0.01)
    assert got
    assert TwistCommand.from_value(got[0]) == TwistCommand()


def test_malformed_json_keeps_session_alive(api, bus):
    node = bus.create_node("gazer")
    node.advertise("/t", "std/String")
    with api.websocket_connect("/ws") as ws:
        ws.send_text("{not json")
        status = ws.receive_json()
        assert status["op"] == "status" and status["level"] == "error"
        # session still works
        ws.send_text(json.dumps({"op": "subscribe", "topic": "/t"}))
        time.sleep(0.1)
        assert "/t" in [
            t for t in bus.graph_info().topics
            if bus.graph_info().topics[t].subscribers
        ]


def test_unknown_topic_subscribe_is_status_error(api, bus):
    with api.websocket_connect("/ws") as ws:
        ws.send_text(json.dumps({"op": "subscribe", "topic": "/ghost"}))
        status = ws.receive_json()
        assert status["op"] == "status"
        assert status["level"] == "error"
        assert "NotFound" in status["message"]


def test_schema_violation_is_status_error(api, bus):
    node = bus.create_node("sink")
    node.advertise("/t", "std/String")
    with api.websocket_connect("/ws") as ws:
        ws.send_text(json.dumps({"op": "publish", "topic": "/t",
                                 "payload": {"data": 3}}))
        status = ws.receive_json()
        assert status["op"] == "status" and "TypeMismatch" in status["message"]


def test_service_call_correlation(api, bus):
    node = bus.create_node("svc")
    node.register_service("echo", "std/String", "std/String", lambda r: r)
    with api.websocket_connect("/ws") as ws:
        for i in range(3):
            ws.send_text(json.dumps({"op": "call_service", "service": "echo",
                                     "payload": {"data": f"m{i}"}, "id": f"c{i}"}))
        replies = [ws.receive_json() for _ in range(3)]
        by_id = {r["id"]: r for r in replies}
        assert set(by_id) == {"c0", "c1", "c2"}
        for i in range(3):
            reply = by_id[f"c{i}"]
            assert reply["op"] == "service_response"
            assert reply["ok"] is True
            assert reply["payload"] == {"data": f"m{i}"}


def test_service_error_still_correlates(api, bus):
    with api.websocket_connect("/ws") as ws:
        ws.send_text(json.dumps({"op": "call_service", "service": "ghost",
                                 "payload": {}, "id": "x1"}))
        reply = ws.receive_json()
        assert reply["op"] == "service_response"
        assert reply["id"] == "x1"
        assert reply["ok"] is False
        assert "NotFound" in reply["error"]


def test_session_cleanup_on_disconnect(api, bus):
    node = bus.create_node("gazer")
    node.advertise("/t", "std/String")
    with api.websocket_connect("/ws") as ws:
        ws.send_text(json.dumps({"op": "subscribe", "topic": "/t"}))
        time.sleep(0.1)
        info = bus.graph_info()
        assert any(n.startswith("bridge/") for n in info.nodes)
        assert len(info.topics["/t"].subscribers) == 1
    deadline = time.monotonic() + 3
    while time.monotonic() < deadline:
        info = bus.graph_info()
        if not any(n.startswith("bridge/") for n in info.nodes):
            break
        time.sleep(0.02)
    info = bus.graph_info()
    assert not any(n.startswith("bridge/") for n in info.nodes)
    assert info.topics["/t"].subscribers == ()


def test_schema_listing_endpoint(api):
    listing = api.get("/schemas").json()
    assert "std/Twist" in listing
    assert ["linear_x", "f64"] in listing["std/Twist"]


def test_token_gate(bus):
    api = TestClient(create_bridge_app(bus, token="sesame"))
    with pytest.raises(Exception):
        with api.websocket_connect("/ws") as ws:
            ws.receive_json()
    with api.websocket_connect("/ws?token=sesame") as ws:
        ws.send_text(json.dumps({"op": "subscribe", "topic": "/none"}))
        assert ws.receive_json()["op"] == "status"


def test_session_queue_drop_oldest():
    q = _SessionQueue(capacity=3)
    for i in range(10):
        q.push(str(i))
    assert q.drops == 7
    drained = []
    while True:
        item = q.pop()
        if item is None:
            break
        drained.append(item)
    assert drained == ["7", "8", "9"]


def test_conformance_transcript_stable(bus):
    """The same scripted client session produces the same transcript."""

    def run_session():
        b = Bus()
        try:
            node = b.create_node("svc")
            node.advertise("/greeting", "std/String")
            node.register_service("echo", "std/String", "std/String", lambda r: r)
            api = TestClient(create_bridge_app(b))
            transcript = []
            with api.websocket_connect("/ws") as ws:
                ws.send_text(json.dumps({"op": "subscribe", "topic": "/greeting"}))
                ws.send_text(json.dumps({"op": "subscribe", "topic": "/ghost"}))
                transcript.append(ws.receive_text())
                ws.send_text(json.dumps({"op": "publish", "topic": "/greeting",
                                         "payload": {"data": "hello"}}))
                transcript.append(ws.receive_text())
                ws.send_text(json.dumps({"op": "call_service", "service": "echo",
                                         "payload": {"data": "ping"}, "id": "a"}))
                transcript.append(ws.receive_text())
                ws.send_text("~~~garbage~~~")
                transcript.append(ws.receive_text())
            return transcript
        finally:
            b.shutdown()

    first = run_session()
    second = run_session()
    assert first == second
    assert len(first) == 4
