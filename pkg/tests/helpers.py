"""Shared test utilities: seeded random schema/value generation."""

from __future__ import annotations

import random
import string
import struct

from sobot.codec import FieldType, MessageSchema, MessageValue, SchemaRegistry

SCALAR_CODES = ["bool", "i8", "u8", "i16", "u16", "i32", "u32", "i64", "u64", "f32", "f64"]

INT_RANGE = {
    "i8": (-128, 127),
    "u8": (0, 255),
    "i16": (-(2**15), 2**15 - 1),
    "u16": (0, 2**16 - 1),
    "i32": (-(2**31), 2**31 - 1),
    "u32": (0, 2**32 - 1),
    "i64": (-(2**63), 2**63 - 1),
    "u64": (0, 2**64 - 1),
}

_TEXT_POOL = string.ascii_letters + string.digits + " /_-" + "سلامدنیا" + "é✓"


def f32_exact(rng: random.Random) -> float:
    raw = rng.uniform(-1e6, 1e6)
    return struct.unpack("<f", struct.pack("<f", raw))[0]


def random_field_type(rng: random.Random, registry: SchemaRegistry, depth: int, prefix: str) -> FieldType:
    roll = rng.random()
    if roll < 0.55 or depth >= 2:
        return FieldType("scalar", scalar=rng.choice(SCALAR_CODES))
    if roll < 0.65:
        return FieldType("string")
    if roll < 0.75:
        return FieldType("bytes")
    if roll < 0.9:
        return FieldType("array", elem=random_field_type(rng, registry, depth + 1, prefix))
    sub = random_schema(rng, registry, f"{prefix}/sub{rng.randrange(10**6)}", depth + 1)
    return FieldType("ref", ref=sub.name)


def random_schema(
    rng: random.Random, registry: SchemaRegistry, name: str, depth: int = 0
) -> MessageSchema:
    n_fields = rng.randrange(0, 7) if depth == 0 else rng.randrange(1, 4)
    fields = tuple(
        (f"f{i}", random_field_type(rng, registry, depth, name)) for i in range(n_fields)
    )
    schema = MessageSchema(name, fields)
    registry.register(schema)
    return schema


def random_leaf(rng: random.Random, code: str):
    if code == "bool":
        return rng.random() < 0.5
    if code == "f64":
        return rng.uniform(-1e12, 1e12)
    if code == "f32":
        return f32_exact(rng)
    lo, hi = INT_RANGE[code]
    return rng.randint(lo, hi)


def random_value_for(rng: random.Random, ft: FieldType, registry: SchemaRegistry):
    if ft.kind == "scalar":
        return random_leaf(rng, ft.scalar)
    if ft.kind == "string":
        return "".join(rng.choice(_TEXT_POOL) for _ in range(rng.randrange(0, 12)))
    if ft.kind == "bytes":
        return rng.randbytes(rng.randrange(0, 16))
    if ft.kind == "array":
        return [
            random_value_for(rng, ft.elem, registry) for _ in range(rng.randrange(0, 6))
        ]
    return random_tree(rng, registry.get(ft.ref), registry)


def random_tree(rng: random.Random, schema: MessageSchema, registry: SchemaRegistry) -> dict:
    return {fname: random_value_for(rng, ftype, registry) for fname, ftype in schema.fields}


def random_message(
    rng: random.Random, registry: SchemaRegistry, name: str
) -> MessageValue:
    schema = random_schema(rng, registry, name)
    return MessageValue(schema, random_tree(rng, schema, registry))
