"""In-process middleware: nodes, topics, pub/sub, request/reply services.

Delivery model: each subscription owns a bounded FIFO queue and a worker
thread that invokes its callback serially.  When the queue is full the
oldest message is dropped and the subscription's drop counter increments.
Publishers append under the topic lock, so a single publisher's order is
always preserved end to end.  A failing callback is caught and counted;
it never unwinds into the bus.
"""

from __future__ import annotations

import itertools
import json
import logging
import threading
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from dataclasses import dataclass, field

from sobot.codec import MessageValue, SchemaRegistry, default_registry
from sobot.codec.wire import validate
from sobot.errors import SchemaMismatch, SobotError

log = logging.getLogger(__name__)

TIERS = ("basic", "middleware", "service", "external")

DEFAULT_SERVICE_TIMEOUT_MS = 2000
DEFAULT_QUEUE_CAPACITY = 64


class BusError(SobotError):
    pass


class NameInUse(BusError):
    pass


class SchemaConflict(BusError):
    pass


class PublisherClosed(BusError):
    pass


class NotFound(BusError):
    pass


class Timeout(BusError):
    pass


class HandlerError(BusError):
    def __init__(self, payload: str):
        self.payload = payload
        super().__init__(f"service handler failed: {payload}")


def topic_key(name: str) -> str:
    """Canonical topic name: always slash-prefixed."""
    if not name or name != name.strip():
        raise BusError(f"invalid topic name {name!r}")
    return name if name.startswith("/") else f"/{name}"


@dataclass(frozen=True)
class TopicInfo:
    name: str
    schema: str | None
    publishers: tuple[str, ...]
    subscribers: tuple[str, ...]


@dataclass(frozen=True)
class ServiceInfo:
    name: str
    provider: str
    request_schema: str
    response_schema: str


@dataclass(frozen=True)
class GraphInfo:
    nodes: dict[str, str]
    topics: dict[str, TopicInfo]
    services: dict[str, ServiceInfo]

    def signature(self) -> dict:
        """Order-independent structure for graph diffing."""
        return {
            "nodes": dict(sorted(self.nodes.items())),
            "topics": {
                name: {
                    "schema": t.schema,
                    "publishers": sorted(t.publishers),
                    "subscribers": sorted(t.subscribers),
                }
                for name, t in sorted(self.topics.items())
            },
            "services": {
                name: {
                    "provider": s.provider,
                    "request": s.request_schema,
                    "response": s.response_schema,
                }
                for name, s in sorted(self.services.items())
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.signature(), sort_keys=True)


class Subscription:
    def __init__(self, bus: "Bus", node: "NodeHandle", topic: "_Topic",
                 capacity: int, callback):
        if capacity < 1:
            raise BusError("queue capacity must be >= 1")
        self.bus = bus
        self.node = node
        self.topic = topic
        self.capacity = capacity
        self.callback = callback
        self.drops = 0
        self.delivered = 0
        self.errors = 0
        self._queue: deque[MessageValue] = deque()
        self._cond = threading.Condition()
        self._closed = False
        self._busy = False
        self._worker = threading.Thread(
            target=self._run, name=f"sub:{node.name}:{topic.name}", daemon=True
        )
        self._worker.start()

    def _offer(self, value: MessageValue) -> None:
        with self._cond:
            if self._closed:
                return
            if len(self._queue) >= self.capacity:
                self._queue.popleft()
                self.drops += 1
            self._queue.append(value)
            self._cond.notify()

    def _run(self) -> None:
        while True:
            with self._cond:
                while not self._queue and not self._closed:
                    self._cond.wait()
                if self._closed:
                    return
                value = self._queue.popleft()
                self._busy = True
            try:
                self.callback(value)
                self.delivered += 1
            except Exception:
                self.errors += 1
                log.exception("subscriber callback failed (%s on %s)",
                              self.node.name, self.topic.name)
            finally:
                with self._cond:
                    self._busy = False
                    self._cond.notify_all()

    def idle(self) -> bool:
        with self._cond:
            return not self._queue and not self._busy

    def close(self) -> None:
        with self._cond:
            if self._closed:
                return
            self._closed = True
            self._queue.clear()
            self._cond.notify_all()
        self.topic._remove_subscription(self)
        self.node._forget(self)
        if threading.current_thread() is not self._worker:
            self._worker.join(timeout=5)


class Publisher:
    def __init__(self, bus: "Bus", node: "NodeHandle", topic: "_Topic"):
        self.bus = bus
        self.node = node
        self.topic = topic
        self._closed = False

    def publish(self, value: MessageValue) -> None:
        if self._closed:
            raise PublisherClosed(f"publisher on {self.topic.name} is closed")
        self.topic._publish(value)

    def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        self.topic._remove_publisher(self)
        self.node._forget(self)


class _Topic:
    def __init__(self, bus: "Bus", name: str):
        self.bus = bus
        self.name = name
        self.schema_name: str | None = None
        self._lock = threading.Lock()
        self._publishers: list[Publisher] = []
        self._subscriptions: list[Subscription] = []

    def _bind(self, schema_name: str | None) -> None:
        if schema_name is None:
            return
        if self.schema_name is None:
            self.schema_name = schema_name
        elif self.schema_name != schema_name:
            raise SchemaConflict(
                f"topic {self.name} is bound to {self.schema_name}, not {schema_name}"
            )

    def _publish(self, value: MessageValue) -> None:
        with self._lock:
            if self.schema_name is None or value.schema.name != self.schema_name:
                raise SchemaMismatch(
                    f"topic {self.name} carries {self.schema_name}, got {value.schema.name}"
                )
            validate(value, self.bus.registry)
            subs = list(self._subscriptions)
        for sub in subs:
            sub._offer(value)

    def _remove_publisher(self, pub: Publisher) -> None:
        with self._lock:
            if pub in self._publishers:
                self._publishers.remove(pub)
        self.bus._gc_topic(self)

    def _remove_subscription(self, sub: Subscription) -> None:
        with self._lock:
            if sub in self._subscriptions:
                self._subscriptions.remove(sub)
        self.bus._gc_topic(self)

    def endpoint_counts(self) -> tuple[int, int]:
        with self._lock:
            return len(self._publishers), len(self._subscriptions)


class _Service:
    def __init__(self, node: "NodeHandle", name: str, request_schema: str,
                 response_schema: str, handler):
        self.node = node
        self.name = name
        self.request_schema = request_schema
        self.response_schema = response_schema
        self.handler = handler


class NodeHandle:
    def __init__(self, bus: "Bus", name: str, tier: str):
        self.bus = bus
        self.name = name
        self.tier = tier
        self._owned: list = []
        self._alive = True

    def _forget(self, endpoint) -> None:
        try:
            self._owned.remove(endpoint)
        except ValueError:
            pass

    def advertise(self, topic: str, schema_name: str) -> Publisher:
        return self.bus.advertise(self, topic, schema_name)

    def subscribe(self, topic: str, schema_name: str | None, callback,
                  queue_capacity: int = DEFAULT_QUEUE_CAPACITY) -> Subscription:
        return self.bus.subscribe(self, topic, schema_name, queue_capacity, callback)

    def register_service(self, name: str, request_schema: str,
                         response_schema: str, handler) -> None:
        self.bus.register_service(self, name, request_schema, response_schema, handler)

    def call(self, service: str, request: MessageValue,
             timeout_ms: int | None = None) -> MessageValue:
        return self.bus.call_service(service, request, timeout_ms)

    def shutdown(self) -> None:
        self.bus.shutdown_node(self)


class Bus:
    """Topic/service broker shared by every node in one process."""

    def __init__(self, registry: SchemaRegistry | None = None,
                 service_timeout_ms: int = DEFAULT_SERVICE_TIMEOUT_MS,
                 service_workers: int = 8):
        self.registry = registry if registry is not None else default_registry()
        self.service_timeout_ms = service_timeout_ms
        self._lock = threading.RLock()
        self._nodes: dict[str, NodeHandle] = {}
        self._topics: dict[str, _Topic] = {}
        self._services: dict[str, _Service] = {}
        self._executor = ThreadPoolExecutor(max_workers=service_workers,
                                            thread_name_prefix="svc")
        self._anon = itertools.count(1)

    # -- nodes ---------------------------------------------------------

    def create_node(self, name: str, tier: str = "basic") -> NodeHandle:
        if tier not in TIERS:
            raise BusError(f"unknown tier {tier!r}, expected one of {TIERS}")
        with self._lock:
            if name in self._nodes:
                raise NameInUse(f"node name {name!r} already in use")
            node = NodeHandle(self, name, tier)
            self._nodes[name] = node
            return node

    def shutdown_node(self, node: NodeHandle) -> None:
        with self._lock:
            if self._nodes.get(node.name) is not node:
                return
            del self._nodes[node.name]
            owned = list(node._owned)
            doomed = [s for s in self._services.values() if s.node is node]
            for svc in doomed:
                del self._services[svc.name]
        node._alive = False
        for endpoint in owned:
            endpoint.close()

    # -- topics --------------------------------------------------------

    def _topic(self, name: str, create: bool) -> _Topic:
        key = topic_key(name)
        with self._lock:
            topic = self._topics.get(key)
            if topic is None:
                if not create:
                    raise NotFound(f"unknown topic {key}")
                topic = _Topic(self, key)
                self._topics[key] = topic
            return topic

    def _gc_topic(self, topic: _Topic) -> None:
        # Topics persist while any endpoint remains; an unused bound topic
        # stays registered so late joiners keep the schema contract.
        pass

    def advertise(self, node: NodeHandle, topic: str, schema_name: str) -> Publisher:
        self.registry.get(schema_name)
        t = self._topic(topic, create=True)
        with t._lock:
            t._bind(schema_name)
            pub = Publisher(self, node, t)
            t._publishers.append(pub)
        with self._lock:
            node._owned.append(pub)
        return pub

    def subscribe(self, node: NodeHandle, topic: str, schema_name: str | None,
                  queue_capacity: int, callback) -> Subscription:
        if schema_name is not None:
            self.registry.get(schema_name)
            t = self._topic(topic, create=True)
        else:
            # wildcard subscription (gateways): topic must already exist
            t = self._topic(topic, create=False)
        with t._lock:
            t._bind(schema_name)
            sub = Subscription(self, node, t, queue_capacity, callback)
            t._subscriptions.append(sub)
        with self._lock:
            node._owned.append(sub)
        return sub

    def topic_schema(self, topic: str) -> str | None:
        return self._topic(topic, create=False).schema_name

    def has_topic(self, topic: str) -> bool:
        try:
            self._topic(topic, create=False)
            return True
        except NotFound:
            return False

    # -- services ------------------------------------------------------

    def register_service(self, node: NodeHandle, name: str, request_schema: str,
                         response_schema: str, handler) -> None:
        self.registry.get(request_schema)
        self.registry.get(response_schema)
        with self._lock:
            if name in self._services:
                raise NameInUse(f"service name {name!r} already claimed")
            self._services[name] = _Service(node, name, request_schema,
                                            response_schema, handler)

    def unregister_service(self, name: str) -> None:
        with self._lock:
            self._services.pop(name, None)

    def service_info(self, name: str) -> ServiceInfo:
        with self._lock:
            svc = self._services.get(name)
        if svc is None:
            raise NotFound(f"unknown service {name!r}")
        return ServiceInfo(name, svc.node.name, svc.request_schema, svc.response_schema)

    def call_service(self, name: str, request: MessageValue,
                     timeout_ms: int | None = None) -> MessageValue:
        with self._lock:
            svc = self._services.get(name)
        if svc is None:
            raise NotFound(f"unknown service {name!r}")
        if request.schema.name != svc.request_schema:
            raise SchemaMismatch(
                f"service {name} takes {svc.request_schema}, got {request.schema.name}"
            )
        validate(request, self.registry)
        timeout = (timeout_ms if timeout_ms is not None else self.service_timeout_ms) / 1000.0
        future = self._executor.submit(svc.handler, request)
        try:
            response = future.result(timeout=timeout)
        except FutureTimeout:
            # late results are dropped on the floor: nobody holds the future
            raise Timeout(f"service {name} did not answer within {timeout * 1000:.0f} ms") from None
        except Exception as exc:
            raise HandlerError(str(exc)) from None
        if not isinstance(response, MessageValue) or response.schema.name != svc.response_schema:
            raise HandlerError(
                f"handler returned {type(response).__name__}, expected {svc.response_schema}"
            )
        validate(response, self.registry)
        return response

    # -- introspection ---------------------------------------------------

    def graph_info(self) -> GraphInfo:
        with self._lock:
            nodes = {name: node.tier for name, node in self._nodes.items()}
            topics = {}
            for key, t in self._topics.items():
                with t._lock:
                    topics[key] = TopicInfo(
                        key,
                        t.schema_name,
                        tuple(p.node.name for p in t._publishers),
                        tuple(s.node.name for s in t._subscriptions),
                    )
            services = {
                name: ServiceInfo(name, svc.node.name, svc.request_schema,
                                  svc.response_schema)
                for name, svc in self._services.items()
            }
        return GraphInfo(nodes, topics, services)

    # -- test/ops support -------------------------------------------------

    def drain(self, timeout: float = 5.0) -> bool:
        """Wait until every subscription queue is empty and idle."""
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            with self._lock:
                subs = [
                    s
                    for t in self._topics.values()
                    for s in list(t._subscriptions)
                ]
            if all(s.idle() for s in subs):
                return True
            time.sleep(0.001)
        return False

    def shutdown(self) -> None:
        with self._lock:
            nodes = list(self._nodes.values())
        for node in nodes:
            self.shutdown_node(node)
        self._executor.shutdown(wait=False, cancel_futures=True)
