"""Launch-configuration-driven node composition.

A *package manifest* (YAML) names a package and maps node names to Python
entry points::

    package: vision
    nodes:
      video_stream: sobot.vision.nodes:video_stream
      opencv_client: sobot.vision.nodes:opencv_client

A *launch file* (YAML) selects and parameterizes nodes::

    nodes:
      - package: vision
        node: video_stream
        enabled: true
        params: {fps: 15, width: 320, height: 240}
        remappings: {image_raw: /cam0/image_raw}

Entry points are callables ``fn(ctx: NodeContext) -> stop | None`` where
``stop`` is a zero-argument shutdown callable.  Entry points must set up
endpoints through the context so remappings apply, then return; long
running work belongs on threads the node manages itself.
"""

from __future__ import annotations

import importlib
from dataclasses import dataclass, field

import yaml

from sobot.bus.core import Bus, BusError, NodeHandle, Subscription, Publisher
from sobot.codec import MessageValue

_SCALAR_TYPES = (str, int, float, bool)


class UnknownPackage(BusError):
    pass


class BadParam(BusError):
    pass


class BadLaunchConfig(BusError):
    pass


@dataclass
class LaunchEntry:
    package: str
    node: str
    enabled: bool = True
    params: dict = field(default_factory=dict)
    remappings: dict = field(default_factory=dict)


@dataclass
class LaunchConfig:
    entries: list[LaunchEntry]

    @staticmethod
    def from_dict(raw: dict) -> "LaunchConfig":
        if not isinstance(raw, dict) or not isinstance(raw.get("nodes", []), list):
            raise BadLaunchConfig("launch config must be a mapping with a 'nodes' list")
        entries = []
        for i, item in enumerate(raw.get("nodes", [])):
            if not isinstance(item, dict) or "package" not in item or "node" not in item:
                raise BadLaunchConfig(f"nodes[{i}] must name a package and a node")
            params = item.get("params") or {}
            remaps = item.get("remappings") or {}
            for key, value in params.items():
                if not isinstance(value, _SCALAR_TYPES):
                    raise BadParam(f"nodes[{i}].params.{key}: scalar required")
            for src, dst in remaps.items():
                if not isinstance(dst, str) or not dst or " " in dst:
                    raise BadLaunchConfig(f"nodes[{i}].remappings.{src}: bad topic {dst!r}")
            entries.append(
                LaunchEntry(
                    package=str(item["package"]),
                    node=str(item["node"]),
                    enabled=bool(item.get("enabled", True)),
                    params=dict(params),
                    remappings=dict(remaps),
                )
            )
        return LaunchConfig(entries)

    @staticmethod
    def from_yaml(text: str) -> "LaunchConfig":
        return LaunchConfig.from_dict(yaml.safe_load(text) or {})

    @staticmethod
    def from_file(path: str) -> "LaunchConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return LaunchConfig.from_yaml(fh.read())


class PackageRegistry:
    """package name -> {node name -> entry point string}."""

    def __init__(self) -> None:
        self._packages: dict[str, dict[str, str]] = {}

    def register(self, package: str, nodes: dict[str, str]) -> None:
        self._packages[package] = dict(nodes)

    def register_manifest(self, path: str) -> str:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh.read())
        if not isinstance(raw, dict) or "package" not in raw or "nodes" not in raw:
            raise BadLaunchConfig(f"manifest {path}: needs 'package' and 'nodes'")
        self.register(str(raw["package"]), {str(k): str(v) for k, v in raw["nodes"].items()})
        return str(raw["package"])

    def entry_point(self, package: str, node: str) -> str:
        if package not in self._packages:
            raise UnknownPackage(f"unknown package {package!r}")
        nodes = self._packages[package]
        if node not in nodes:
            raise UnknownPackage(f"package {package!r} has no node {node!r}")
        return nodes[node]

    def packages(self) -> list[str]:
        return sorted(self._packages)


def builtin_packages() -> PackageRegistry:
    """Packages shipped with this distribution."""
    reg = PackageRegistry()
    reg.register(
        "vision",
        {
            "video_stream": "sobot.vision.nodes:video_stream",
            "opencv_client": "sobot.vision.nodes:opencv_client",
            "landmark_detection": "sobot.vision.nodes:landmark_detection",
            "face_emotion": "sobot.vision.nodes:face_emotion",
            "gaze_detector": "sobot.vision.nodes:gaze_detector",
            "gaze_position": "sobot.vision.nodes:gaze_position",
        },
    )
    reg.register(
        "audio",
        {
            "audio_stream": "sobot.audio.nodes:audio_stream",
            "audio_features": "sobot.audio.nodes:audio_features",
            "audio_sentiment": "sobot.audio.nodes:audio_sentiment",
        },
    )
    reg.register(
        "behavior",
        {
            "actuator_sim": "sobot.behavior.actuator:actuator_sim",
            "base_sim": "sobot.behavior.actuator:base_sim",
        },
    )
    return reg


class NodeContext:
    """What a launched node sees: its handle, params, remapped topics."""

    def __init__(self, bus: Bus, node: NodeHandle, params: dict, remappings: dict):
        self.bus = bus
        self.node = node
        self.params = dict(params)
        self._remappings = {self._norm(k): v for k, v in remappings.items()}

    @staticmethod
    def _norm(topic: str) -> str:
        return topic if topic.startswith("/") else f"/{topic}"

    def resolve(self, topic: str) -> str:
        return self._remappings.get(self._norm(topic), topic)

    def param(self, key: str, default=None, kind=None):
        value = self.params.get(key, default)
        if kind is not None and value is not None:
            try:
                value = kind(value)
            except (TypeError, ValueError):
                raise BadParam(f"{self.node.name}: param {key}={value!r} is not {kind.__name__}")
        return value

    def advertise(self, topic: str, schema_name: str) -> Publisher:
        return self.node.advertise(self.resolve(topic), schema_name)

    def subscribe(self, topic: str, schema_name: str | None, callback,
                  queue_capacity: int = 64) -> Subscription:
        return self.node.subscribe(self.resolve(topic), schema_name, callback,
                                   queue_capacity)

    def register_service(self, name: str, request_schema: str, response_schema: str,
                         handler) -> None:
        self.node.register_service(name, request_schema, response_schema, handler)

    def call(self, service: str, request: MessageValue,
             timeout_ms: int | None = None) -> MessageValue:
        return self.node.call(service, request, timeout_ms)


@dataclass
class RunningNode:
    entry: LaunchEntry
    node: NodeHandle
    stop: object | None


class RunningGraph:
    def __init__(self, bus: Bus, nodes: list[RunningNode]):
        self.bus = bus
        self.nodes = nodes

    def shutdown(self) -> None:
        for running in reversed(self.nodes):
            if callable(running.stop):
                try:
                    running.stop()
                except Exception:
                    pass
            running.node.shutdown()

    def __enter__(self) -> "RunningGraph":
        return self

    def __exit__(self, *exc) -> None:
        self.shutdown()


def load_launch(bus: Bus, config: LaunchConfig,
                packages: PackageRegistry | None = None) -> RunningGraph:
    """Start exactly the enabled entries; disabled ones leave no trace."""
    packages = packages if packages is not None else builtin_packages()
    started: list[RunningNode] = []
    try:
        for entry in config.entries:
            if not entry.enabled:
                continue
            ep = packages.entry_point(entry.package, entry.node)
            module_name, _, attr = ep.partition(":")
            try:
                fn = getattr(importlib.import_module(module_name), attr)
            except (ImportError, AttributeError) as exc:
                raise UnknownPackage(f"entry point {ep!r} not importable: {exc}") from None
            node = bus.create_node(entry.node, tier="basic")
            ctx = NodeContext(bus, node, entry.params, entry.remappings)
            try:
                stop = fn(ctx)
            except BadParam:
                node.shutdown()
                raise
            except Exception:
                node.shutdown()
                raise
            started.append(RunningNode(entry, node, stop))
    except Exception:
        RunningGraph(bus, started).shutdown()
        raise
    return RunningGraph(bus, started)
