"""WebSocket JSON gateway exposing bus topics and services to browsers."""

from sobot.bridge.jsoncodec import FieldMissing, TypeMismatch, json_to_message, message_to_json
from sobot.bridge.server import (
    BridgeServer,
    BridgeSession,
    create_bridge_app,
    serve_bridge,
)

__all__ = [
    "FieldMissing",
    "TypeMismatch",
    "json_to_message",
    "message_to_json",
    "BridgeServer",
    "BridgeSession",
    "create_bridge_app",
    "serve_bridge",
]
