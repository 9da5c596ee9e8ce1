"""Binary wire format: validation, encode, decode.

Layout (all integers little-endian):

    message   = u32 payload_len | payload
    payload   = fields in schema order, no tags, no padding
    scalar    = fixed width (bool is one byte, 0 or 1)
    string    = u32 byte_len | UTF-8 bytes
    bytes     = u32 len | raw bytes
    T[]       = u32 count | count elements of T
    ref       = nested schema's fields inline (no header, no length)

Worked example, ``std/Twist`` (six f64 fields) with all-zero values:

    00 30 00 00 00   <- header: payload_len = 48
    8 x 00  (x6)     <- six little-endian f64 zeros

(first line shown as ``30 00 00 00`` on the wire; 0x30 == 48).

Decode is total: arbitrary input bytes produce either a value or a typed
error (Truncated / TrailingBytes / InvalidUtf8) naming the offending
field path; it never crashes and never allocates more than
``MAX_ARRAY_COUNT`` elements per array.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

from sobot import _kernels
from sobot.errors import InvalidUtf8, SchemaMismatch, TrailingBytes, Truncated
from sobot.codec.schema import INT_RANGES, FieldType, MessageSchema, SchemaRegistry

MAX_ARRAY_COUNT = 1 << 24

_SCALAR_SIZE = _kernels.SCALAR_SIZE


@dataclass(frozen=True)
class MessageValue:
    """A value tree paired with the schema it conforms to."""

    schema: MessageSchema
    data: dict

    def __getitem__(self, field: str):
        return self.data[field]


def _f32_exact(x: float) -> bool:
    packed = struct.unpack("<f", struct.pack("<f", x))[0]
    return packed == x or (math.isinf(packed) and math.isinf(x))


def _check_leaf(ft: FieldType, value, path: str) -> None:
    code = ft.scalar
    if code == "bool":
        if type(value) is not bool:
            raise SchemaMismatch(f"expected bool, got {type(value).__name__}", path)
        return
    if code in ("f32", "f64"):
        if type(value) is not float:
            raise SchemaMismatch(f"expected float, got {type(value).__name__}", path)
        if math.isnan(value):
            raise SchemaMismatch("NaN is not a conforming value", path)
        if code == "f32" and not _f32_exact(value):
            raise SchemaMismatch("value not exactly representable as f32", path)
        return
    if type(value) is not int:
        raise SchemaMismatch(f"expected int, got {type(value).__name__}", path)
    lo, hi = INT_RANGES[code]
    if not lo <= value <= hi:
        raise SchemaMismatch(f"{value} out of range for {code}", path)


def validate(value: MessageValue, registry: SchemaRegistry) -> None:
    """Raise SchemaMismatch unless the value tree conforms to its schema."""
    _validate_tree(value.data, value.schema, registry, "")


def _validate_tree(data, schema: MessageSchema, registry: SchemaRegistry, path: str) -> None:
    if not isinstance(data, dict):
        raise SchemaMismatch(f"expected mapping, got {type(data).__name__}", path or schema.name)
    expected = schema.field_names()
    if set(data.keys()) != set(expected):
        missing = sorted(set(expected) - set(data.keys()))
        extra = sorted(set(data.keys()) - set(expected))
        raise SchemaMismatch(
            f"field set mismatch (missing {missing}, unexpected {extra})", path or schema.name
        )
    for fname, ftype in schema.fields:
        _validate_field(data[fname], ftype, registry, f"{path}.{fname}" if path else fname)


def _validate_field(value, ft: FieldType, registry: SchemaRegistry, path: str) -> None:
    if ft.kind == "scalar":
        _check_leaf(ft, value, path)
    elif ft.kind == "string":
        if type(value) is not str:
            raise SchemaMismatch(f"expected str, got {type(value).__name__}", path)
    elif ft.kind == "bytes":
        if type(value) is not bytes:
            raise SchemaMismatch(f"expected bytes, got {type(value).__name__}", path)
    elif ft.kind == "array":
        if type(value) is not list:
            raise SchemaMismatch(f"expected list, got {type(value).__name__}", path)
        for i, item in enumerate(value):
            _validate_field(item, ft.elem, registry, f"{path}[{i}]")  # type: ignore[arg-type]
    else:  # ref
        _validate_tree(value, registry.get(ft.ref), registry, path)


def encode(value: MessageValue, registry: SchemaRegistry) -> bytes:
    """Encode a conforming value; deterministic and bit-stable."""
    validate(value, registry)
    out = bytearray(4)
    _encode_tree(value.data, value.schema, registry, out)
    struct.pack_into("<I", out, 0, len(out) - 4)
    return bytes(out)


def _encode_tree(data: dict, schema: MessageSchema, registry: SchemaRegistry, out: bytearray) -> None:
    for fname, ftype in schema.fields:
        _encode_field(data[fname], ftype, registry, out)


def _encode_field(value, ft: FieldType, registry: SchemaRegistry, out: bytearray) -> None:
    if ft.kind == "scalar":
        out += _kernels.pack_scalars(ft.scalar, [value])
    elif ft.kind == "string":
        raw = value.encode("utf-8")
        out += struct.pack("<I", len(raw))
        out += raw
    elif ft.kind == "bytes":
        out += struct.pack("<I", len(value))
        out += value
    elif ft.kind == "array":
        out += struct.pack("<I", len(value))
        elem = ft.elem
        assert elem is not None
        if elem.kind == "scalar":
            out += _kernels.pack_scalars(elem.scalar, value)
        else:
            for item in value:
                _encode_field(item, elem, registry, out)
    else:  # ref
        _encode_tree(value, registry.get(ft.ref), registry, out)


class _Cursor:
    __slots__ = ("data", "pos", "end")

    def __init__(self, data: bytes, pos: int, end: int):
        self.data = data
        self.pos = pos
        self.end = end

    def take(self, n: int, path: str):
        if self.pos + n > self.end:
            raise Truncated(f"need {n} bytes, {self.end - self.pos} left", path, self.pos)
        start = self.pos
        self.pos += n
        return start

    def u32(self, path: str) -> int:
        start = self.take(4, path)
        return struct.unpack_from("<I", self.data, start)[0]


def decode(data: bytes, schema: MessageSchema, registry: SchemaRegistry) -> MessageValue:
    """Exact inverse of :func:`encode` on valid input; total on any input."""
    if len(data) < 4:
        raise Truncated("missing payload-length header", "", 0)
    (payload_len,) = struct.unpack_from("<I", data, 0)
    if 4 + payload_len < len(data):
        raise TrailingBytes(f"{len(data) - 4 - payload_len} bytes beyond declared payload")
    # Decode within whatever is present so a short read is reported at the
    # field where the bytes ran out, not just as a header/body size mismatch.
    cur = _Cursor(data, 4, len(data))
    tree = _decode_tree(cur, schema, registry, "")
    if cur.pos != cur.end:
        raise TrailingBytes(f"{cur.end - cur.pos} undecoded payload bytes")
    if 4 + payload_len > len(data):
        raise Truncated(
            f"header declares {payload_len} payload bytes, {len(data) - 4} present",
            "",
            len(data),
        )
    return MessageValue(schema, tree)


def _decode_tree(cur: _Cursor, schema: MessageSchema, registry: SchemaRegistry, path: str) -> dict:
    out = {}
    for fname, ftype in schema.fields:
        out[fname] = _decode_field(cur, ftype, registry, f"{path}.{fname}" if path else fname)
    return out


def _min_wire_size(ft: FieldType, registry: SchemaRegistry, seen: frozenset = frozenset()) -> int:
    if ft.kind == "scalar":
        return _SCALAR_SIZE[ft.scalar]
    if ft.kind in ("string", "bytes", "array"):
        return 4
    if ft.ref in seen or not registry.contains(ft.ref):
        return 0
    sub = registry.get(ft.ref)
    return sum(_min_wire_size(t, registry, seen | {ft.ref}) for _, t in sub.fields)


def _decode_field(cur: _Cursor, ft: FieldType, registry: SchemaRegistry, path: str):
    if ft.kind == "scalar":
        size = _SCALAR_SIZE[ft.scalar]
        start = cur.take(size, path)
        return _kernels.unpack_scalars(ft.scalar, cur.data, start, 1)[0]
    if ft.kind == "string":
        n = cur.u32(path)
        start = cur.take(n, path)
        try:
            return cur.data[start : start + n].decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InvalidUtf8(str(exc), path) from None
    if ft.kind == "bytes":
        n = cur.u32(path)
        start = cur.take(n, path)
        return cur.data[start : start + n]
    if ft.kind == "array":
        count = cur.u32(path)
        elem = ft.elem
        assert elem is not None
        if count > MAX_ARRAY_COUNT:
            raise Truncated(f"array count {count} exceeds limit", path, cur.pos)
        min_size = _min_wire_size(elem, registry)
        if min_size and count * min_size > cur.end - cur.pos:
            raise Truncated(
                f"array of {count} needs at least {count * min_size} bytes,"
                f" {cur.end - cur.pos} left",
                path,
                cur.pos,
            )
        if elem.kind == "scalar":
            start = cur.take(count * _SCALAR_SIZE[elem.scalar], path)
            return _kernels.unpack_scalars(elem.scalar, cur.data, start, count)
        return [
            _decode_field(cur, elem, registry, f"{path}[{i}]") for i in range(count)
        ]
    return _decode_tree(cur, registry.get(ft.ref), registry, path)
