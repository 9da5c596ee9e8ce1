"""Behavior layer: REST API, persistence, trigger pipeline, actuator sim."""

from sobot.behavior.exp import DEFAULT_ACK_TIMEOUT_MS, BehaviorRuntime, ExpRequest
from sobot.behavior.service import BehaviorServer, create_app, serve_behavior
from sobot.behavior.store import (
    ACTUATOR_KINDS,
    AFFECT_LABELS,
    SENSOR_KINDS,
    AssetMissing,
    AssetStore,
    BehaviorStore,
    NotFound,
    ValidationError,
)

__all__ = [
    "DEFAULT_ACK_TIMEOUT_MS",
    "BehaviorRuntime",
    "ExpRequest",
    "BehaviorServer",
    "create_app",
    "serve_behavior",
    "ACTUATOR_KINDS",
    "AFFECT_LABELS",
    "SENSOR_KINDS",
    "AssetMissing",
    "AssetStore",
    "BehaviorStore",
    "NotFound",
    "ValidationError",
]
