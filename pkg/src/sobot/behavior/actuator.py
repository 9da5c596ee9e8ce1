"""Simulated actuator node: plays behavior commands, acks each channel."""

from __future__ import annotations

import logging

from sobot.bus import NodeContext
from sobot.codec import MessageValue

log = logging.getLogger(__name__)


def actuator_sim(ctx: NodeContext):
    registry = ctx.bus.registry
    ack_schema = registry.get("std/BehaviorAck")
    pub_ack = ctx.advertise("behavior/ack", "std/BehaviorAck")

    def player(channel: str):
        def on_command(value: MessageValue) -> None:
            log.info("actuator_sim: %s <- asset %s (request %s)",
                     channel, value["asset_id"], value["request_id"])
            pub_ack.publish(MessageValue(ack_schema, {
                "request_id": value["request_id"], "channel": channel}))

        return on_command

    ctx.subscribe("behavior/face", "std/BehaviorCommand", player("face"),
                  queue_capacity=256)
    ctx.subscribe("behavior/sound", "std/BehaviorCommand", player("sound"),
                  queue_capacity=256)
    return None


def base_sim(ctx: NodeContext):
    """Simulated mobile base: consumes velocity commands in place of a
    real wheel driver."""
    state = {"last": None}

    def on_twist(value: MessageValue) -> None:
        state["last"] = value
        log.debug("base_sim: linear.x=%.3f angular.z=%.3f",
                  value["linear_x"], value["angular_z"])

    ctx.subscribe("cmd_vel_wheel", "std/Twist", on_twist, queue_capacity=64)
    ctx.node.last_twist = lambda: state["last"]
    return None
