"""Standard message set and the plain-record types that ride on it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources

from sobot.codec.schema import SchemaRegistry, parse_schema_text
from sobot.codec.wire import MessageValue
from sobot.errors import SchemaMismatch


def load_standard_schemas(registry: SchemaRegistry) -> None:
    text = resources.files("sobot").joinpath("data/std.schema").read_text(encoding="utf-8")
    for schema in parse_schema_text(text):
        registry.register(schema)


def default_registry() -> SchemaRegistry:
    registry = SchemaRegistry()
    load_standard_schemas(registry)
    return registry


@dataclass
class ImageFrame:
    """Raw rgb8 frame; rows may carry stride padding."""

    width: int
    height: int
    stride: int
    data: bytes
    encoding: str = "rgb8"

    def __post_init__(self) -> None:
        if self.encoding != "rgb8":
            raise SchemaMismatch(f"unsupported encoding {self.encoding!r}", "encoding")
        if self.stride < 3 * self.width:
            raise SchemaMismatch(f"stride {self.stride} < 3*width {3 * self.width}", "stride")
        if len(self.data) != self.height * self.stride:
            raise SchemaMismatch(
                f"data is {len(self.data)} bytes, expected height*stride = "
                f"{self.height * self.stride}",
                "data",
            )

    def to_value(self, registry: SchemaRegistry) -> MessageValue:
        return MessageValue(
            registry.get("std/Image"),
            {
                "width": self.width,
                "height": self.height,
                "encoding": self.encoding,
                "stride": self.stride,
                "data": self.data,
            },
        )

    @staticmethod
    def from_value(value: MessageValue) -> "ImageFrame":
        d = value.data
        return ImageFrame(d["width"], d["height"], d["stride"], d["data"], d["encoding"])


@dataclass
class CameraInfo:
    width: int
    height: int
    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise SchemaMismatch("width and height must be positive")
        if self.fx <= 0 or self.fy <= 0:
            raise SchemaMismatch("focal lengths must be positive")

    def to_value(self, registry: SchemaRegistry) -> MessageValue:
        return MessageValue(
            registry.get("std/CameraInfo"),
            {
                "width": self.width,
                "height": self.height,
                "fx": float(self.fx),
                "fy": float(self.fy),
                "cx": float(self.cx),
                "cy": float(self.cy),
            },
        )

    @staticmethod
    def from_value(value: MessageValue) -> "CameraInfo":
        d = value.data
        return CameraInfo(d["width"], d["height"], d["fx"], d["fy"], d["cx"], d["cy"])


@dataclass
class TwistCommand:
    linear: tuple[float, float, float] = (0.0, 0.0, 0.0)
    angular: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        for v in (*self.linear, *self.angular):
            if not math.isfinite(v):
                raise SchemaMismatch("twist components must be finite")

    def to_value(self, registry: SchemaRegistry) -> MessageValue:
        lx, ly, lz = self.linear
        ax, ay, az = self.angular
        return MessageValue(
            registry.get("std/Twist"),
            {
                "linear_x": float(lx),
                "linear_y": float(ly),
                "linear_z": float(lz),
                "angular_x": float(ax),
                "angular_y": float(ay),
                "angular_z": float(az),
            },
        )

    @staticmethod
    def from_value(value: MessageValue) -> "TwistCommand":
        d = value.data
        return TwistCommand(
            (d["linear_x"], d["linear_y"], d["linear_z"]),
            (d["angular_x"], d["angular_y"], d["angular_z"]),
        )


def string_value(registry: SchemaRegistry, text: str) -> MessageValue:
    return MessageValue(registry.get("std/String"), {"data": text})
