"""Nested-list carrier for multidimensional arrays.

The bus message model has no native N-d array type, so arrays travel as
rectangular nested lists plus an explicit dtype and shape.  Leaf dtypes
are restricted to ``u8 i16 i32 f32 f64``.  Rank-0 arrays are carried as a
bare scalar leaf (shape ``[]``), so the inverse mapping is unambiguous.

On the wire an array rides in a ``std/NdArray`` message: dtype string,
``u32[]`` shape, and the leaves packed little-endian into a bytes field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sobot import _kernels
from sobot.errors import LengthMismatch, MixedLeafTypes, RaggedInput, SchemaMismatch

ND_DTYPES = ("u8", "i16", "i32", "f32", "f64")

_NP_DTYPE = {"u8": np.uint8, "i16": np.int16, "i32": np.int32, "f32": np.float32, "f64": np.float64}

_INT_BOUNDS = {"u8": (0, 255), "i16": (-(2**15), 2**15 - 1), "i32": (-(2**31), 2**31 - 1)}


@dataclass
class NdArrayMessage:
    dtype: str
    shape: list[int]
    data: object  # nested lists, or a bare scalar for rank 0

    def leaf_count(self) -> int:
        return math.prod(self.shape)


def ndarray_to_nested(dtype: str, shape, flat_data) -> NdArrayMessage:
    """Wrap flat row-major data into rectangular nested lists."""
    if dtype not in ND_DTYPES:
        raise SchemaMismatch(f"unsupported ndarray dtype {dtype!r}")
    shape = [int(s) for s in shape]
    if any(s < 0 for s in shape):
        raise LengthMismatch(f"negative extent in shape {shape}")
    flat = list(flat_data)
    expected = math.prod(shape)
    if len(flat) != expected:
        raise LengthMismatch(f"shape {shape} needs {expected} leaves, got {len(flat)}")
    return NdArrayMessage(dtype, shape, _kernels.unflatten_flat(flat, shape))


def nested_to_ndarray(nested, dtype: str | None = None) -> tuple[str, list[int], list]:
    """Recover ``(dtype, shape, flat_data)`` from nested lists.

    The shape is recovered by descent and every branch is checked for
    rectangularity.  When ``dtype`` is not given it is inferred: all-int
    leaves map to the narrowest of u8/i16/i32 that holds them, all-float
    leaves to f64, and no leaves at all to u8.
    """
    try:
        shape, flat = _kernels.flatten_nested(nested)
    except ValueError:
        raise RaggedInput("sibling lists of unequal length or depth") from None
    try:
        kind = _kernels.leaf_kind(flat)
    except ValueError:
        raise MixedLeafTypes("leaves must be all int or all float") from None
    if dtype is None:
        dtype = _infer_dtype(kind, flat)
    elif dtype not in ND_DTYPES:
        raise SchemaMismatch(f"unsupported ndarray dtype {dtype!r}")
    elif kind == "int" and dtype in ("f32", "f64"):
        raise MixedLeafTypes(f"int leaves cannot carry dtype {dtype}")
    elif kind == "float" and dtype not in ("f32", "f64"):
        raise MixedLeafTypes(f"float leaves cannot carry dtype {dtype}")
    return dtype, shape, flat


def _infer_dtype(kind: str, flat: list) -> str:
    if kind == "empty":
        return "u8"
    if kind == "float":
        return "f64"
    lo, hi = min(flat), max(flat)
    for code in ("u8", "i16", "i32"):
        clo, chi = _INT_BOUNDS[code]
        if clo <= lo and hi <= chi:
            return code
    raise MixedLeafTypes(f"int leaves out of i32 range: [{lo}, {hi}]")


def to_message_fields(msg: NdArrayMessage) -> dict:
    """Fields for a std/NdArray MessageValue."""
    dtype, shape, flat = nested_to_ndarray(msg.data, msg.dtype)
    return {
        "dtype": dtype,
        "shape": shape,
        "data": _kernels.pack_scalars(dtype, flat),
    }


def from_message_fields(fields: dict) -> NdArrayMessage:
    dtype = fields["dtype"]
    if dtype not in ND_DTYPES:
        raise SchemaMismatch(f"unsupported ndarray dtype {dtype!r}")
    shape = [int(s) for s in fields["shape"]]
    raw = fields["data"]
    count = math.prod(shape)
    if len(raw) != count * _kernels.SCALAR_SIZE[dtype]:
        raise LengthMismatch(
            f"shape {shape} needs {count * _kernels.SCALAR_SIZE[dtype]} data bytes, got {len(raw)}"
        )
    flat = _kernels.unpack_scalars(dtype, raw, 0, count)
    return NdArrayMessage(dtype, shape, _kernels.unflatten_flat(flat, shape))


def to_numpy(msg: NdArrayMessage) -> np.ndarray:
    dtype, shape, flat = nested_to_ndarray(msg.data, msg.dtype)
    return np.array(flat, dtype=_NP_DTYPE[dtype]).reshape(shape)


def from_numpy(arr: np.ndarray, dtype: str | None = None) -> NdArrayMessage:
    if dtype is None:
        matches = [c for c, d in _NP_DTYPE.items() if np.dtype(d) == arr.dtype]
        if not matches:
            raise SchemaMismatch(f"unsupported numpy dtype {arr.dtype}")
        dtype = matches[0]
    flat = np.ascontiguousarray(arr, dtype=_NP_DTYPE[dtype]).ravel().tolist()
    return ndarray_to_nested(dtype, list(arr.shape), flat)
