"""WebSocket JSON gateway between browsers and the bus.

Envelope grammar (one JSON object per WebSocket text frame):

    client -> server
      {"op": "subscribe",   "topic": T}
      {"op": "unsubscribe", "topic": T}
      {"op": "publish",     "topic": T, "payload": {...}}
      {"op": "call_service", "service": S, "payload": {...}, "id": ID}

    server -> client
      {"op": "publish", "topic": T, "payload": {...}}
      {"op": "service_response", "service": S, "id": ID,
       "ok": true,  "payload": {...}}            on success
      {"op": "service_response", "service": S, "id": ID,
       "ok": false, "error": "NotFound: ..."}     on failure
      {"op": "status", "level": "error"|"info", "message": M}

Every call_service yields exactly one service_response with the caller's
id.  Protocol-level problems (malformed JSON, unknown topic, payload
schema violations) come back as status envelopes and never close the
session.  Outbound traffic flows through a bounded drop-oldest queue per
session, and std/Image topics are additionally rate-limited (default 15
frames/s), so a slow client cannot grow server memory.
"""

from __future__ import annotations

import asyncio
import itertools
import json
import logging
import threading
import time
from collections import deque

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from sobot.bridge.jsoncodec import (
    FieldMissing,
    TypeMismatch,
    json_to_message,
    message_to_json,
)
from sobot.bus import Bus, HandlerError, NotFound, Timeout, topic_key
from sobot.codec import MessageValue
from sobot.errors import SobotError

log = logging.getLogger(__name__)

DEFAULT_IMAGE_MAX_FPS = 15.0
DEFAULT_OUTBOUND_CAPACITY = 256


class _SessionQueue:
    """Bounded drop-oldest buffer bridging bus threads to the WS loop."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.drops = 0
        self._items: deque[str] = deque()
        self._lock = threading.Lock()

    def push(self, item: str) -> None:
        with self._lock:
            if len(self._items) >= self.capacity:
                self._items.popleft()
                self.drops += 1
            self._items.append(item)

    def pop(self) -> str | None:
        with self._lock:
            return self._items.popleft() if self._items else None

    def __len__(self) -> int:
        with self._lock:
            return len(self._items)


class BridgeSession:
    def __init__(self, bus: Bus, session_id: str, image_max_fps: float,
                 outbound_capacity: int):
        self.bus = bus
        self.session_id = session_id
        self.node = bus.create_node(f"bridge/{session_id}", tier="external")
        self.subscriptions: dict[str, object] = {}
        self.publishers: dict[str, object] = {}
        self.outbound = _SessionQueue(outbound_capacity)
        self.image_min_period = 1.0 / image_max_fps if image_max_fps > 0 else 0.0
        self._last_image_sent: dict[str, float] = {}
        self._loop: asyncio.AbstractEventLoop | None = None
        self._wakeup: asyncio.Event | None = None

    def attach_loop(self, loop: asyncio.AbstractEventLoop) -> None:
        self._loop = loop
        self._wakeup = asyncio.Event()

    def send_json(self, doc: dict) -> None:
        self.outbound.push(json.dumps(doc, sort_keys=True, ensure_ascii=False))
        loop, wakeup = self._loop, self._wakeup
        if loop is not None and wakeup is not None:
            try:
                loop.call_soon_threadsafe(wakeup.set)
            except RuntimeError:
                pass  # loop already closed; session is tearing down

    def forwarder(self, key: str, schema_name: str):
        is_image = schema_name == "std/Image"

        def forward(value: MessageValue) -> None:
            if is_image and self.image_min_period > 0.0:
                now = time.monotonic()
                last = self._last_image_sent.get(key, 0.0)
                if now - last < self.image_min_period:
                    return
                self._last_image_sent[key] = now
            self.send_json({
                "op": "publish",
                "topic": key,
                "payload": message_to_json(value, self.bus.registry),
            })

        return forward

    async def drain(self, websocket: WebSocket) -> None:
        assert self._wakeup is not None
        while True:
            await self._wakeup.wait()
            self._wakeup.clear()
            while True:
                item = self.outbound.pop()
                if item is None:
                    break
                await websocket.send_text(item)

    def close(self) -> None:
        self.node.shutdown()
        self.subscriptions.clear()
        self.publishers.clear()


def create_bridge_app(bus: Bus, image_max_fps: float = DEFAULT_IMAGE_MAX_FPS,
                      outbound_capacity: int = DEFAULT_OUTBOUND_CAPACITY,
                      token: str | None = None) -> FastAPI:
    app = FastAPI(title="bus bridge")
    counter = itertools.count(1)

    @app.get("/schemas")
    def schemas():
        registry = bus.registry
        return {
            name: [[fname, str(ftype)] for fname, ftype in registry.get(name).fields]
            for name in registry.names()
        }

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        if token is not None and websocket.query_params.get("token") != token:
            await websocket.close(code=4401)
            return
        await websocket.accept()
        session = BridgeSession(bus, str(next(counter)), image_max_fps,
                                outbound_capacity)
        session.attach_loop(asyncio.get_running_loop())
        sender = asyncio.create_task(session.drain(websocket))
        try:
            while True:
                raw = await websocket.receive_text()
                await _handle_envelope(bus, session, raw)
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            session.close()

    return app


def _status(session: BridgeSession, message: str, level: str = "error") -> None:
    session.send_json({"op": "status", "level": level, "message": message})


async def _handle_envelope(bus: Bus, session: BridgeSession, raw: str) -> None:
    try:
        envelope = json.loads(raw)
        if not isinstance(envelope, dict) or "op" not in envelope:
            raise ValueError("envelope must be an object with an 'op'")
    except (json.JSONDecodeError, ValueError) as exc:
        _status(session, f"malformed envelope: {exc}")
        return
    op = envelope.get("op")
    try:
        if op == "subscribe":
            _do_subscribe(bus, session, envelope)
        elif op == "unsubscribe":
            key = topic_key(str(envelope.get("topic", "")))
            sub = session.subscriptions.pop(key, None)
            if sub is not None:
                sub.close()
        elif op == "publish":
            _do_publish(bus, session, envelope)
        elif op == "call_service":
            await _do_call(bus, session, envelope)
        else:
            _status(session, f"unknown op {op!r}")
    except (SobotError, ValueError) as exc:
        _status(session, f"{type(exc).__name__}: {exc}")


def _do_subscribe(bus: Bus, session: BridgeSession, envelope: dict) -> None:
    key = topic_key(str(envelope.get("topic", "")))
    if key in session.subscriptions:
        return
    schema_name = bus.topic_schema(key)  # NotFound if the topic is unknown
    if schema_name is None:
        raise NotFound(f"topic {key} has no schema binding yet")
    session.subscriptions[key] = session.node.subscribe(
        key, None, session.forwarder(key, schema_name),
        queue_capacity=session.outbound.capacity,
    )


def _do_publish(bus: Bus, session: BridgeSession, envelope: dict) -> None:
    key = topic_key(str(envelope.get("topic", "")))
    schema_name = bus.topic_schema(key)
    if schema_name is None:
        raise NotFound(f"topic {key} has no schema binding yet")
    try:
        value = json_to_message(envelope.get("payload"),
                                bus.registry.get(schema_name), bus.registry)
    except (FieldMissing, TypeMismatch) as exc:
        _status(session, f"{type(exc).__name__}: {exc}")
        return
    publisher = session.publishers.get(key)
    if publisher is None:
        publisher = session.node.advertise(key, schema_name)
        session.publishers[key] = publisher
    publisher.publish(value)


async def _do_call(bus: Bus, session: BridgeSession, envelope: dict) -> None:
    service = str(envelope.get("service", ""))
    call_id = envelope.get("id", "")

    def respond(ok: bool, payload=None, error: str = "") -> None:
        doc = {"op": "service_response", "service": service, "id": call_id, "ok": ok}
        if ok:
            doc["payload"] = payload
        else:
            doc["error"] = error
        session.send_json(doc)

    try:
        info = bus.service_info(service)
        request = json_to_message(envelope.get("payload"),
                                  bus.registry.get(info.request_schema),
                                  bus.registry)
        response = await asyncio.to_thread(bus.call_service, service, request)
        respond(True, payload=message_to_json(response, bus.registry))
    except (NotFound, Timeout, HandlerError, FieldMissing, TypeMismatch,
            SobotError) as exc:
        respond(False, error=f"{type(exc).__name__}: {exc}")


class BridgeServer:
    def __init__(self, app: FastAPI, port: int):
        import uvicorn

        self._config = uvicorn.Config(app, host="127.0.0.1", port=port,
                                      log_level="warning")
        self._server = uvicorn.Server(self._config)
        self._thread = threading.Thread(target=self._server.run, daemon=True,
                                        name="bridge-http")
        self._thread.start()
        while not self._server.started and self._thread.is_alive():
            threading.Event().wait(0.01)
        self.port = self._server.servers[0].sockets[0].getsockname()[1]

    def close(self) -> None:
        self._server.should_exit = True
        self._thread.join(timeout=5)


def serve_bridge(bus: Bus, port: int = 9090,
                 image_max_fps: float = DEFAULT_IMAGE_MAX_FPS,
                 token: str | None = None) -> BridgeServer:
    return BridgeServer(create_bridge_app(bus, image_max_fps, token=token), port)
