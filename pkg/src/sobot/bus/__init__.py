"""Middleware: node registry, pub/sub topics, services, launch, transports."""

from sobot.bus.core import (
    Bus,
    BusError,
    GraphInfo,
    HandlerError,
    NameInUse,
    NodeHandle,
    NotFound,
    Publisher,
    PublisherClosed,
    SchemaConflict,
    ServiceInfo,
    Subscription,
    Timeout,
    TopicInfo,
    topic_key,
)
from sobot.bus.launch import (
    BadLaunchConfig,
    BadParam,
    LaunchConfig,
    LaunchEntry,
    NodeContext,
    PackageRegistry,
    RunningGraph,
    UnknownPackage,
    builtin_packages,
    load_launch,
)
from sobot.bus.tcp import BusClient, TcpServer, TransportError

__all__ = [
    "Bus",
    "BusError",
    "GraphInfo",
    "HandlerError",
    "NameInUse",
    "NodeHandle",
    "NotFound",
    "Publisher",
    "PublisherClosed",
    "SchemaConflict",
    "ServiceInfo",
    "Subscription",
    "Timeout",
    "TopicInfo",
    "topic_key",
    "BadLaunchConfig",
    "BadParam",
    "LaunchConfig",
    "LaunchEntry",
    "NodeContext",
    "PackageRegistry",
    "RunningGraph",
    "UnknownPackage",
    "builtin_packages",
    "load_launch",
    "BusClient",
    "TcpServer",
    "TransportError",
]
