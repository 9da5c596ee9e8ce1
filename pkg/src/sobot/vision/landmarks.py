"""Named, normalized 2-D facial landmarks."""

from __future__ import annotations

from dataclasses import dataclass, field

from sobot.codec import MessageValue, SchemaRegistry

REQUIRED_FACE_POINTS = (
    "eye_outer_L",
    "eye_inner_L",
    "eye_outer_R",
    "eye_inner_R",
    "pupil_L",
    "pupil_R",
    "nose_tip",
    "mouth_L",
    "mouth_R",
    "mouth_top",
    "mouth_bottom",
    "brow_L",
    "brow_R",
    "chin",
)


def _clamp01(v: float) -> float:
    return 0.0 if v < 0.0 else 1.0 if v > 1.0 else v


@dataclass
class LandmarkSet:
    """Point coordinates are normalized to [0,1] x [0,1] and clamped."""

    face_detected: bool = False
    points: dict[str, tuple[float, float]] = field(default_factory=dict)
    depth: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.points = {
            name: (_clamp01(float(x)), _clamp01(float(y)))
            for name, (x, y) in self.points.items()
        }
        if self.face_detected:
            missing = [n for n in REQUIRED_FACE_POINTS if n not in self.points]
            if missing:
                raise ValueError(f"face_detected set but points missing: {missing}")

    def missing_required(self) -> list[str]:
        return [n for n in REQUIRED_FACE_POINTS if n not in self.points]

    def mirrored(self) -> "LandmarkSet":
        """Horizontal mirror: x -> 1-x with the L/R name roles swapped."""

        def swap(name: str) -> str:
            if name.endswith("_L"):
                return name[:-2] + "_R"
            if name.endswith("_R"):
                return name[:-2] + "_L"
            return name

        return LandmarkSet(
            self.face_detected,
            {swap(n): (1.0 - x, y) for n, (x, y) in self.points.items()},
            {swap(n): z for n, z in self.depth.items()},
        )

    def to_value(self, registry: SchemaRegistry) -> MessageValue:
        names = sorted(self.points)
        has_depth = bool(self.depth) and all(n in self.depth for n in names)
        return MessageValue(
            registry.get("std/LandmarkSet"),
            {
                "face_detected": self.face_detected,
                "names": names,
                "x": [self.points[n][0] for n in names],
                "y": [self.points[n][1] for n in names],
                "z": [float(self.depth[n]) for n in names] if has_depth else [],
            },
        )

    @staticmethod
    def from_value(value: MessageValue) -> "LandmarkSet":
        d = value.data
        points = {n: (x, y) for n, x, y in zip(d["names"], d["x"], d["y"])}
        depth = dict(zip(d["names"], d["z"])) if d["z"] else {}
        return LandmarkSet(d["face_detected"], points, depth)
