"""Pure-Python kernels for the codec hot paths.

Same contract as the compiled module :mod:`sobot._kernels._fast`; the
package selects one of the two at import time (see ``__init__``).  All
functions raise plain ``ValueError`` / ``OverflowError`` / ``TypeError``;
the codec layer maps those onto its typed errors.

Scalar codes: bool i8 u8 i16 u16 i32 u32 i64 u64 f32 f64.
"""

from __future__ import annotations

import struct

BACKEND = "pure"

_STRUCT_CHAR = {
    "bool": "?",
    "i8": "b",
    "u8": "B",
    "i16": "h",
    "u16": "H",
    "i32": "i",
    "u32": "I",
    "i64": "q",
    "u64": "Q",
    "f32": "f",
    "f64": "d",
}

SCALAR_SIZE = {
    "bool": 1,
    "i8": 1,
    "u8": 1,
    "i16": 2,
    "u16": 2,
    "i32": 4,
    "u32": 4,
    "i64": 8,
    "u64": 8,
    "f32": 4,
    "f64": 8,
}


def pack_scalars(code: str, values: list) -> bytes:
    """Pack a flat list of scalars little-endian."""
    try:
        return struct.pack(f"<{len(values)}{_STRUCT_CHAR[code]}", *values)
    except struct.error as exc:
        raise ValueError(str(exc)) from None


def unpack_scalars(code: str, data, offset: int, count: int) -> list:
    """Unpack ``count`` little-endian scalars starting at ``offset``."""
    size = SCALAR_SIZE[code]
    end = offset + size * count
    if end > len(data):
        raise ValueError("truncated")
    return list(struct.unpack_from(f"<{count}{_STRUCT_CHAR[code]}", data, offset))


def flatten_nested(obj):
    """Flatten nested lists row-major.

    Returns ``(shape, flat)``.  The shape is probed along the first-child
    spine; every other branch must match it exactly, otherwise
    ``ValueError('ragged')`` is raised.  A non-list input is a rank-0
    scalar: shape ``[]``, flat ``[obj]``.
    """
    shape: list[int] = []
    probe = obj
    while isinstance(probe, list):
        shape.append(len(probe))
        if not probe:
            break
        probe = probe[0]
    depth = len(shape)
    flat: list = []
    append = flat.append

    def walk(node, level: int) -> None:
        if level == depth:
            if isinstance(node, list):
                raise ValueError("ragged")
            append(node)
            return
        if not isinstance(node, list) or len(node) != shape[level]:
            raise ValueError("ragged")
        for child in node:
            walk(child, level + 1)

    walk(obj, 0)
    return shape, flat


def unflatten_flat(flat: list, shape) -> object:
    """Inverse of :func:`flatten_nested` for a known shape."""
    if not shape:
        return flat[0]
    strides = [1] * len(shape)
    for k in range(len(shape) - 2, -1, -1):
        strides[k] = strides[k + 1] * shape[k + 1]

    def build(level: int, offset: int):
        n = shape[level]
        if level == len(shape) - 1:
            return flat[offset : offset + n]
        step = strides[level]
        return [build(level + 1, offset + i * step) for i in range(n)]

    return build(0, 0)


def leaf_kind(flat: list) -> str:
    """Classify leaves: 'int', 'float' or 'empty'.

    Bools and any int/float mixture are rejected (``ValueError('mixed')``).
    """
    if not flat:
        return "empty"
    saw_int = saw_float = False
    for leaf in flat:
        if type(leaf) is int:
            saw_int = True
        elif type(leaf) is float:
            saw_float = True
        else:
            raise ValueError("mixed")
    if saw_int and saw_float:
        raise ValueError("mixed")
    return "int" if saw_int else "float"
