"""Lossless JSON <-> MessageValue mapping for bridge and CLI payloads.

Numbers ride as JSON numbers (f64 round-trips exactly through repr),
bytes fields as base64 text, nested messages as objects, arrays as
arrays.  Field errors carry the dotted path to the offending field.
"""

from __future__ import annotations

import base64
import binascii
import math
import struct

from sobot.codec import FieldType, MessageSchema, MessageValue, SchemaRegistry
from sobot.codec.schema import INT_RANGES
from sobot.errors import SobotError


class FieldMissing(SobotError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"missing field {path}")


class TypeMismatch(SobotError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def json_to_message(payload, schema: MessageSchema,
                    registry: SchemaRegistry) -> MessageValue:
    return MessageValue(schema, _tree_from_json(payload, schema, registry, ""))


def _tree_from_json(payload, schema: MessageSchema, registry: SchemaRegistry,
                    path: str) -> dict:
    if not isinstance(payload, dict):
        raise TypeMismatch(path or schema.name, f"expected object, got {type(payload).__name__}")
    known = schema.field_names()
    extra = sorted(set(payload) - set(known))
    if extra:
        raise TypeMismatch(f"{path}.{extra[0]}" if path else extra[0], "unexpected field")
    out = {}
    for fname, ftype in schema.fields:
        sub_path = f"{path}.{fname}" if path else fname
        if fname not in payload:
            raise FieldMissing(sub_path)
        out[fname] = _field_from_json(payload[fname], ftype, registry, sub_path)
    return out


def _field_from_json(value, ft: FieldType, registry: SchemaRegistry, path: str):
    if ft.kind == "scalar":
        return _leaf_from_json(value, ft.scalar, path)
    if ft.kind == "string":
        if not isinstance(value, str):
            raise TypeMismatch(path, f"expected string, got {type(value).__name__}")
        return value
    if ft.kind == "bytes":
        if not isinstance(value, str):
            raise TypeMismatch(path, "expected base64 string")
        try:
            return base64.b64decode(value.encode("ascii"), validate=True)
        except (binascii.Error, UnicodeEncodeError):
            raise TypeMismatch(path, "invalid base64") from None
    if ft.kind == "array":
        if not isinstance(value, list):
            raise TypeMismatch(path, f"expected array, got {type(value).__name__}")
        return [
            _field_from_json(item, ft.elem, registry, f"{path}[{i}]")
            for i, item in enumerate(value)
        ]
    return _tree_from_json(value, registry.get(ft.ref), registry, path)


def _leaf_from_json(value, code: str, path: str):
    if code == "bool":
        if not isinstance(value, bool):
            raise TypeMismatch(path, f"expected bool, got {type(value).__name__}")
        return value
    if code in ("f32", "f64"):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeMismatch(path, f"expected number, got {type(value).__name__}")
        number = float(value)
        if math.isnan(number):
            raise TypeMismatch(path, "NaN is not allowed")
        if code == "f32":
            number = struct.unpack("<f", struct.pack("<f", number))[0]
        return number
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeMismatch(path, f"expected integer, got {type(value).__name__}")
    lo, hi = INT_RANGES[code]
    if not lo <= value <= hi:
        raise TypeMismatch(path, f"{value} out of range for {code}")
    return value


def message_to_json(value: MessageValue, registry: SchemaRegistry):
    return _tree_to_json(value.data, value.schema, registry)


def _tree_to_json(data: dict, schema: MessageSchema, registry: SchemaRegistry):
    out = {}
    for fname, ftype in schema.fields:
        out[fname] = _field_to_json(data[fname], ftype, registry)
    return out


def _field_to_json(value, ft: FieldType, registry: SchemaRegistry):
    if ft.kind == "bytes":
        return base64.b64encode(value).decode("ascii")
    if ft.kind == "array":
        return [_field_to_json(v, ft.elem, registry) for v in value]
    if ft.kind == "ref":
        return _tree_to_json(value, registry.get(ft.ref), registry)
    return value
