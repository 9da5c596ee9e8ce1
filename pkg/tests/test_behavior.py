import threading
import time

import pytest
from fastapi.testclient import TestClient

from sobot.behavior import (
    BehaviorRuntime,
    BehaviorStore,
    create_app,
)
from sobot.behavior.actuator import actuator_sim
from sobot.bus import Bus, LaunchConfig, builtin_packages, load_launch


@pytest.fixture
def store(tmp_path):
    s = BehaviorStore(str(tmp_path / "data"))
    s.assets.put("f1.png", b"\x89PNGfake")
    s.assets.put("s1.wav", b"RIFFfake")
    return s


@pytest.fixture
def bus():
    b = Bus()
    yield b
    b.shutdown()


def profile(pid="happy01", affect="happy"):
    return {"id": pid, "affect_label": affect, "face_asset": "f1.png",
            "sound_asset": "s1.wav", "description": "smile + chirp"}


def client_for(store, runtime=None):
    return TestClient(create_app(store, runtime))


# -- CRUD ---------------------------------------------------------------


def test_profile_crud_roundtrip(store):
    api = client_for(store)
    assert api.post("/api/profiles", json=profile()).status_code == 201
    got = api.get("/api/profiles/happy01")
    assert got.status_code == 200
    assert got.json()["face_asset"] == "f1.png"
    listed = api.get("/api/profiles").json()
    assert [p["id"] for p in listed] == ["happy01"]
    updated = api.put("/api/profiles/happy01",
                      json={**profile(), "description": "v2"})
    assert updated.status_code == 200
    assert api.get("/api/profiles/happy01").json()["description"] == "v2"
    assert api.delete("/api/profiles/happy01").status_code == 204
    assert api.get("/api/profiles/happy01").status_code == 404


def test_profile_bad_affect_rejected(store):
    api = client_for(store)
    response = api.post("/api/profiles", json=profile(affect="joyful"))
    assert response.status_code == 400
    body = response.json()
    assert body["error"] == "ValidationError"
    assert body["path"] == "affect_label"


def test_profile_missing_asset_rejected(store):
    api = client_for(store)
    bad = {**profile(), "face_asset": "ghost.png"}
    response = api.post("/api/profiles", json=bad)
    assert response.status_code == 400
    assert response.json()["error"] == "AssetMissing"


def test_robot_definition_roundtrip(store):
    api = client_for(store)
    definition = {
        "robot_name": "cart",
        "actuators": [
            {"name": "wheels", "kind": "wheel_pair", "params": {"max_mps": 0.5}},
            {"name": "beeper", "kind": "speaker", "params": {}},
        ],
        "sensors": [{"name": "cam", "kind": "camera", "params": {}}],
    }
    assert api.get("/api/robot").status_code == 404
    assert api.put("/api/robot", json=definition).status_code == 200
    assert api.get("/api/robot").json() == definition


def test_robot_duplicate_actuator_names_rejected(store):
    api = client_for(store)
    definition = {
        "robot_name": "cart",
        "actuators": [
            {"name": "m", "kind": "servo", "params": {}},
            {"name": "m", "kind": "dc_motor", "params": {}},
        ],
        "sensors": [],
    }
    response = api.put("/api/robot", json=definition)
    assert response.status_code == 400
    assert "name" in response.json()["path"]


# -- persistence ----------------------------------------------------------


def test_restart_preserves_dump_bytes(tmp_path):
    data_dir = str(tmp_path / "data")
    first = BehaviorStore(data_dir)
    first.assets.put("f1.png", b"face bytes")
    first.assets.put("s1.wav", b"sound bytes")
    first.create_profile(profile())
    first.put_robot({"robot_name": "r", "actuators": [], "sensors": []})
    before = first.export_dump()

    reopened = BehaviorStore(data_dir)  # simulated process restart
    assert reopened.export_dump() == before


def test_import_dump_restores_content(tmp_path, store):
    store.create_profile(profile())
    dump = store.export_dump()
    other = BehaviorStore(str(tmp_path / "other"))
    other.import_dump(dump)
    assert other.get_profile("happy01")["sound_asset"] == "s1.wav"
    assert other.export_dump() == dump


# -- trigger pipeline -----------------------------------------------------


def launch_actuator(bus):
    return load_launch(
        bus,
        LaunchConfig.from_dict({"nodes": [{"package": "behavior",
                                           "node": "actuator_sim"}]}),
        builtin_packages(),
    )


def test_trigger_completes_with_actuator(store, bus):
    runtime = BehaviorRuntime(bus, store, ack_timeout_ms=2000)
    graph = launch_actuator(bus)
    store.create_profile(profile())

    probe = bus.create_node("probe")
    face_msgs, sound_msgs = [], []
    probe.subscribe("behavior/face", "std/BehaviorCommand", face_msgs.append)
    probe.subscribe("behavior/sound", "std/BehaviorCommand", sound_msgs.append)

    request = runtime.trigger("happy01")
    assert request["status"] in ("accepted", "dispatched", "completed")
    deadline = time.monotonic() + 3
    while time.monotonic() < deadline:
        if runtime.get_request(request["id"])["status"] == "completed":
            break
        time.sleep(0.01)
    assert runtime.get_request(request["id"])["status"] == "completed"
    bus.drain()
    assert len(face_msgs) == 1 and len(sound_msgs) == 1
    assert face_msgs[0]["asset_id"] == "f1.png"
    assert sound_msgs[0]["asset_id"] == "s1.wav"
    graph.shutdown()
    runtime.close()


def test_trigger_unknown_profile_404(store, bus):
    runtime = BehaviorRuntime(bus, store)
    api = client_for(store, runtime)
    response = api.post("/api/exp/ghost")
    assert response.status_code == 404
    runtime.close()


def test_trigger_without_actuator_fails_within_timeout(store, bus):
    runtime = BehaviorRuntime(bus, store, ack_timeout_ms=500)
    store.create_profile(profile())
    t0 = time.monotonic()
    request = runtime.trigger("happy01")
    while time.monotonic() - t0 < 2.0:
        if runtime.get_request(request["id"])["status"] == "failed":
            break
        time.sleep(0.01)
    elapsed = time.monotonic() - t0
    assert runtime.get_request(request["id"])["status"] == "failed"
    assert 0.4 <= elapsed <= 1.0
    runtime.close()


def test_one_dispatch_each_under_concurrent_triggers(store, bus):
    runtime = BehaviorRuntime(bus, store, ack_timeout_ms=2000)
    graph = launch_actuator(bus)
    store.create_profile(profile())
    probe = bus.create_node("probe")
    face_msgs = []
    probe.subscribe("behavior/face", "std/BehaviorCommand", face_msgs.append,
                    queue_capacity=1024)

    requests = []
    threads = [threading.Thread(target=lambda: requests.append(runtime.trigger("happy01")))
               for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    bus.drain()
    assert len(face_msgs) == 8
    assert sorted(v["request_id"] for v in face_msgs) == sorted(r["id"] for r in requests)
    graph.shutdown()
    runtime.close()


def test_exp_status_via_rest(store, bus):
    runtime = BehaviorRuntime(bus, store, ack_timeout_ms=2000)
    graph = launch_actuator(bus)
    store.create_profile(profile())
    api = client_for(store, runtime)
    request = api.post("/api/exp/happy01").json()
    deadline = time.monotonic() + 3
    while time.monotonic() < deadline:
        status = api.get(f"/api/exp/{request['id']}").json()["status"]
        if status == "completed":
            break
        time.sleep(0.01)
    assert api.get(f"/api/exp/{request['id']}").json()["status"] == "completed"
    graph.shutdown()
    runtime.close()


def test_status_never_regresses(store, bus):
    from sobot.behavior.exp import ExpRequest

    request = ExpRequest("exp-1", "p", 0.0)
    assert request.advance("dispatched")
    assert request.advance("completed")
    assert not request.advance("dispatched")
    assert not request.advance("failed")  # completed is terminal
    other = ExpRequest("exp-2", "p", 0.0)
    assert other.advance("failed")
    assert not other.advance("dispatched")
