"""Tiny node package used by launch tests."""

from sobot.bus import BadParam
from sobot.codec import string_value


def talker(ctx):
    count = ctx.param("count", 3, kind=int)
    if count < 0:
        raise BadParam(f"{ctx.node.name}: count must be >= 0")
    pub = ctx.advertise("chat", "std/String")
    for i in range(count):
        pub.publish(string_value(ctx.bus.registry, f"msg{i}"))
    return None


def listener(ctx):
    ctx.received = []
    ctx.subscribe("chat", "std/String", lambda v: ctx.received.append(v["data"]))
    return None


def crasher(ctx):
    raise RuntimeError("node exploded during spawn")
