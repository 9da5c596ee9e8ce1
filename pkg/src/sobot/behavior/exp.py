"""The behavior-trigger pipeline: REST request in, bus commands out.

A trigger publishes one face-display command on ``behavior/face`` and one
audio-play command on ``behavior/sound`` (std/BehaviorCommand), then the
request advances accepted -> dispatched and finally completed once the
actuator acknowledges both channels on ``behavior/ack``, or failed when
the acks do not arrive within the timeout.  Status only ever moves
forward; failed is reachable from any non-terminal state.
"""

from __future__ import annotations

import itertools
import threading
import time
from dataclasses import dataclass, field

from sobot.behavior.store import BehaviorStore, NotFound
from sobot.bus import Bus
from sobot.codec import MessageValue

STATUS_ORDER = ("accepted", "dispatched", "completed")
ACK_CHANNELS = ("face", "sound")
DEFAULT_ACK_TIMEOUT_MS = 2000


@dataclass
class ExpRequest:
    id: str
    profile_id: str
    requested_at: float
    status: str = "accepted"
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    _acked: set = field(default_factory=set, repr=False)

    def advance(self, new_status: str) -> bool:
        with self._lock:
            if self.status in ("completed", "failed"):
                return False
            if new_status == "failed":
                self.status = "failed"
                return True
            if STATUS_ORDER.index(new_status) <= STATUS_ORDER.index(self.status):
                return False
            self.status = new_status
            return True

    def snapshot(self) -> dict:
        with self._lock:
            return {
                "id": self.id,
                "profile_id": self.profile_id,
                "requested_at": self.requested_at,
                "status": self.status,
            }


class BehaviorRuntime:
    """Bus-facing half of the behavior service."""

    def __init__(self, bus: Bus, store: BehaviorStore,
                 ack_timeout_ms: int = DEFAULT_ACK_TIMEOUT_MS):
        self.bus = bus
        self.store = store
        self.ack_timeout_ms = ack_timeout_ms
        self.node = bus.create_node("behavior_service", tier="service")
        self._pub_face = self.node.advertise("behavior/face", "std/BehaviorCommand")
        self._pub_sound = self.node.advertise("behavior/sound", "std/BehaviorCommand")
        self.node.subscribe("behavior/ack", "std/BehaviorAck", self._on_ack,
                            queue_capacity=256)
        self._requests: dict[str, ExpRequest] = {}
        self._ids = itertools.count(1)
        self._lock = threading.Lock()

    def trigger(self, profile_id: str) -> dict:
        profile = self.store.get_profile(profile_id)  # NotFound propagates
        with self._lock:
            request = ExpRequest(f"exp-{next(self._ids)}", profile_id, time.time())
            self._requests[request.id] = request
            registry = self.bus.registry
            schema = registry.get("std/BehaviorCommand")
            self._pub_face.publish(MessageValue(schema, {
                "request_id": request.id, "asset_id": profile["face_asset"]}))
            self._pub_sound.publish(MessageValue(schema, {
                "request_id": request.id, "asset_id": profile["sound_asset"]}))
            request.advance("dispatched")
        timer = threading.Timer(self.ack_timeout_ms / 1000.0,
                                lambda: request.advance("failed"))
        timer.daemon = True
        timer.start()
        return request.snapshot()

    def _on_ack(self, value: MessageValue) -> None:
        request = self._requests.get(value["request_id"])
        if request is None or value["channel"] not in ACK_CHANNELS:
            return
        with request._lock:
            request._acked.add(value["channel"])
            complete = set(ACK_CHANNELS) <= request._acked
        if complete:
            request.advance("completed")

    def get_request(self, request_id: str) -> dict:
        request = self._requests.get(request_id)
        if request is None:
            raise NotFound(f"request {request_id!r}")
        return request.snapshot()

    def close(self) -> None:
        self.node.shutdown()
