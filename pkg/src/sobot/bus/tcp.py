"""TCP transport for cross-process nodes.

Envelope (little-endian, bit-exact):

    u32 length      # byte count of everything after this field
    u16 topic_len
    topic           # UTF-8 topic name, topic_len bytes
    payload         # one wire-format message (u32 header + payload)

Topic names starting with ``!`` are transport control channels:

    !subscribe    client -> server   payload std/String  (topic to join)
    !unsubscribe  client -> server   payload std/String
    !advertise    client -> server   payload std/TopicBind
    !call         client -> server   payload std/ServiceRequest
    !reply        server -> client   payload std/ServiceReply
    !error        server -> client   payload std/String

Anything else is a topic publication in whichever direction it travels.
The pseudo-service ``!graph`` answers a graph snapshot as JSON text in a
std/String payload.  A slow client is backpressured by its bus-side
subscription queue (drop-oldest, counted), never by server memory.
"""

from __future__ import annotations

import itertools
import json
import logging
import socket
import struct
import threading

from sobot.bus.core import Bus, HandlerError, NotFound, Timeout, topic_key
from sobot.codec import MessageValue, SchemaRegistry, decode, encode
from sobot.errors import CodecError, SchemaMismatch, SobotError

log = logging.getLogger(__name__)

MAX_ENVELOPE = 64 * 1024 * 1024
DEFAULT_PORT = 7741


class TransportError(SobotError):
    pass


def _read_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ConnectionError("connection closed")
        buf += chunk
    return bytes(buf)


def read_envelope(sock: socket.socket) -> tuple[str, bytes]:
    (length,) = struct.unpack("<I", _read_exact(sock, 4))
    if length > MAX_ENVELOPE or length < 2:
        raise TransportError(f"bad envelope length {length}")
    body = _read_exact(sock, length)
    (topic_len,) = struct.unpack_from("<H", body, 0)
    if 2 + topic_len > length:
        raise TransportError("topic length exceeds envelope")
    topic = body[2 : 2 + topic_len].decode("utf-8")
    return topic, body[2 + topic_len :]


def write_envelope(sock: socket.socket, lock: threading.Lock, topic: str,
                   payload: bytes) -> None:
    name = topic.encode("utf-8")
    frame = struct.pack("<IH", 2 + len(name) + len(payload), len(name)) + name + payload
    with lock:
        sock.sendall(frame)


class _ServerConnection:
    def __init__(self, server: "TcpServer", sock: socket.socket, peer: str, index: int):
        self.server = server
        self.bus = server.bus
        self.sock = sock
        self.peer = peer
        self.node = self.bus.create_node(f"remote/{peer}-{index}", tier="external")
        self.subs: dict[str, object] = {}
        self.write_lock = threading.Lock()
        self.pubs: dict[str, object] = {}
        self._closed = False
        self.thread = threading.Thread(target=self._run, daemon=True,
                                       name=f"tcp-conn:{peer}")
        self.thread.start()

    def _send(self, topic: str, payload: bytes) -> None:
        try:
            write_envelope(self.sock, self.write_lock, topic, payload)
        except OSError:
            self.close()

    def _send_error(self, message: str) -> None:
        reg = self.bus.registry
        value = MessageValue(reg.get("std/String"), {"data": message})
        self._send("!error", encode(value, reg))

    def _run(self) -> None:
        try:
            while True:
                topic, payload = read_envelope(self.sock)
                try:
                    self._dispatch(topic, payload)
                except (SobotError, CodecError) as exc:
                    self._send_error(f"{type(exc).__name__}: {exc}")
        except (ConnectionError, OSError, TransportError):
            pass
        finally:
            self.close()

    def _dispatch(self, topic: str, payload: bytes) -> None:
        reg = self.bus.registry
        if topic == "!subscribe":
            name = decode(payload, reg.get("std/String"), reg)["data"]
            key = topic_key(name)
            if key in self.subs:
                return
            if not self.bus.has_topic(key):
                raise NotFound(f"unknown topic {key}")
            self.subs[key] = self.node.subscribe(
                key, None, self._forwarder(key),
                queue_capacity=self.server.client_queue_capacity,
            )
        elif topic == "!unsubscribe":
            name = decode(payload, reg.get("std/String"), reg)["data"]
            sub = self.subs.pop(topic_key(name), None)
            if sub is not None:
                sub.close()
        elif topic == "!advertise":
            bind = decode(payload, reg.get("std/TopicBind"), reg)
            key = topic_key(bind["topic"])
            if key not in self.pubs:
                self.pubs[key] = self.node.advertise(key, bind["schema"])
        elif topic == "!call":
            req = decode(payload, reg.get("std/ServiceRequest"), reg)
            threading.Thread(
                target=self._serve_call, args=(req,), daemon=True,
                name=f"tcp-call:{req['service']}",
            ).start()
        elif topic.startswith("!"):
            raise TransportError(f"unknown control channel {topic}")
        else:
            key = topic_key(topic)
            schema_name = self.bus.topic_schema(key)  # NotFound if absent
            if schema_name is None:
                raise SchemaMismatch(f"topic {key} has no schema binding yet")
            value = decode(payload, reg.get(schema_name), reg)
            pub = self.pubs.get(key)
            if pub is None:
                pub = self.node.advertise(key, schema_name)
                self.pubs[key] = pub
            pub.publish(value)

    def _forwarder(self, key: str):
        def forward(value: MessageValue) -> None:
            self._send(key, encode(value, self.bus.registry))

        return forward

    def _serve_call(self, req: MessageValue) -> None:
        reg = self.bus.registry
        call_id = req["call_id"]
        service = req["service"]
        ok, error, payload = False, "", b""
        try:
            if service == "!graph":
                ok = True
                graph_json = self.bus.graph_info().to_json()
                payload = encode(MessageValue(reg.get("std/String"),
                                              {"data": graph_json}), reg)
            else:
                info = self.bus.service_info(service)
                request = decode(req["payload"], reg.get(info.request_schema), reg)
                response = self.bus.call_service(service, request)
                ok = True
                payload = encode(response, reg)
        except (SobotError, CodecError) as exc:
            error = f"{type(exc).__name__}: {exc}"
        reply = MessageValue(
            reg.get("std/ServiceReply"),
            {"call_id": call_id, "ok": ok, "error": error, "payload": payload},
        )
        self._send("!reply", encode(reply, reg))

    def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self.sock.close()
        self.node.shutdown()
        self.server._forget(self)


class TcpServer:
    """Accepts remote nodes and bridges them onto an in-process bus."""

    def __init__(self, bus: Bus, host: str = "127.0.0.1", port: int = DEFAULT_PORT,
                 client_queue_capacity: int = 256):
        self.bus = bus
        self.client_queue_capacity = client_queue_capacity
        self._listener = socket.create_server((host, port))
        self.host, self.port = self._listener.getsockname()[:2]
        self._conns: list[_ServerConnection] = []
        self._lock = threading.Lock()
        self._counter = itertools.count(1)
        self._closed = False
        self._thread = threading.Thread(target=self._accept_loop, daemon=True,
                                        name="tcp-accept")
        self._thread.start()

    def _accept_loop(self) -> None:
        while not self._closed:
            try:
                sock, addr = self._listener.accept()
            except OSError:
                return
            conn = _ServerConnection(self, sock, f"{addr[0]}:{addr[1]}",
                                     next(self._counter))
            with self._lock:
                self._conns.append(conn)

    def _forget(self, conn: _ServerConnection) -> None:
        with self._lock:
            if conn in self._conns:
                self._conns.remove(conn)

    def close(self) -> None:
        self._closed = True
        try:
            self._listener.close()
        except OSError:
            pass
        with self._lock:
            conns = list(self._conns)
        for conn in conns:
            conn.close()


class BusClient:
    """Remote counterpart: publish, subscribe, call over one socket."""

    def __init__(self, host: str = "127.0.0.1", port: int = DEFAULT_PORT,
                 registry: SchemaRegistry | None = None, timeout: float = 5.0):
        from sobot.codec import default_registry

        self.registry = registry if registry is not None else default_registry()
        self.sock = socket.create_connection((host, port), timeout=timeout)
        self.sock.settimeout(None)
        self._write_lock = threading.Lock()
        self._subs: dict[str, tuple[str, object]] = {}
        self._calls: dict[int, dict] = {}
        self._call_lock = threading.Lock()
        self._call_ids = itertools.count(1)
        self._errors: list[str] = []
        self._closed = False
        self._reader = threading.Thread(target=self._read_loop, daemon=True,
                                        name="tcp-client-read")
        self._reader.start()

    # -- outbound ------------------------------------------------------

    def _send(self, topic: str, payload: bytes) -> None:
        write_envelope(self.sock, self._write_lock, topic, payload)

    def _send_string(self, control: str, text: str) -> None:
        value = MessageValue(self.registry.get("std/String"), {"data": text})
        self._send(control, encode(value, self.registry))

    def advertise(self, topic: str, schema_name: str) -> None:
        value = MessageValue(self.registry.get("std/TopicBind"),
                             {"topic": topic, "schema": schema_name})
        self._send("!advertise", encode(value, self.registry))

    def publish(self, topic: str, value: MessageValue) -> None:
        self._send(topic_key(topic), encode(value, self.registry))

    def publish_raw(self, topic: str, payload: bytes) -> None:
        self._send(topic_key(topic), payload)

    def subscribe(self, topic: str, schema_name: str, callback) -> None:
        key = topic_key(topic)
        self._subs[key] = (schema_name, callback)
        self._send_string("!subscribe", key)

    def unsubscribe(self, topic: str) -> None:
        key = topic_key(topic)
        self._subs.pop(key, None)
        self._send_string("!unsubscribe", key)

    def call(self, service: str, request: MessageValue | None,
             timeout_ms: int = 5000) -> MessageValue:
        reg = self.registry
        call_id = next(self._call_ids)
        payload = encode(request, reg) if request is not None else b""
        slot = {"event": threading.Event(), "reply": None}
        with self._call_lock:
            self._calls[call_id] = slot
        req = MessageValue(
            reg.get("std/ServiceRequest"),
            {"call_id": call_id, "service": service, "payload": payload},
        )
        self._send("!call", encode(req, reg))
        if not slot["event"].wait(timeout_ms / 1000.0):
            with self._call_lock:
                self._calls.pop(call_id, None)
            raise Timeout(f"no reply from {service} within {timeout_ms} ms")
        reply = slot["reply"]
        if not reply["ok"]:
            kind, _, detail = reply["error"].partition(": ")
            if kind == "NotFound":
                raise NotFound(detail or kind)
            if kind == "Timeout":
                raise Timeout(detail or kind)
            if kind == "SchemaMismatch":
                raise SchemaMismatch(detail or kind)
            raise HandlerError(reply["error"])
        return reply["payload"]

    def call_decoded(self, service: str, request: MessageValue | None,
                     response_schema: str, timeout_ms: int = 5000) -> MessageValue:
        raw = self.call(service, request, timeout_ms)
        return decode(raw, self.registry.get(response_schema), self.registry)

    def graph(self, timeout_ms: int = 5000) -> dict:
        raw = self.call("!graph", None, timeout_ms)
        value = decode(raw, self.registry.get("std/String"), self.registry)
        return json.loads(value["data"])

    # -- inbound -------------------------------------------------------

    def _read_loop(self) -> None:
        reg = self.registry
        try:
            while True:
                topic, payload = read_envelope(self.sock)
                if topic == "!reply":
                    reply = decode(payload, reg.get("std/ServiceReply"), reg)
                    with self._call_lock:
                        slot = self._calls.pop(reply["call_id"], None)
                    if slot is not None:
                        slot["reply"] = {
                            "ok": reply["ok"],
                            "error": reply["error"],
                            "payload": reply["payload"],
                        }
                        slot["event"].set()
                elif topic == "!error":
                    message = decode(payload, reg.get("std/String"), reg)["data"]
                    self._errors.append(message)
                    log.warning("bus error from server: %s", message)
                else:
                    entry = self._subs.get(topic)
                    if entry is None:
                        continue
                    schema_name, callback = entry
                    try:
                        callback(decode(payload, reg.get(schema_name), reg))
                    except Exception:
                        log.exception("subscription callback failed for %s", topic)
        except (ConnectionError, OSError, TransportError):
            pass

    def errors(self) -> list[str]:
        return list(self._errors)

    def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self.sock.close()
