"""Compiled and pure kernels must agree bit-for-bit."""

import random

import pytest

import sobot._kernels as kernels
from sobot._kernels import pure
from tests_support_values import scalar_samples

try:
    from sobot._kernels import _fast
except ImportError:
    _fast = None

needs_fast = pytest.mark.skipif(_fast is None, reason="compiled kernels not built")

CODES = list(pure.SCALAR_SIZE)


def test_selected_backend_exposed():
    assert kernels.BACKEND in ("compiled", "pure")


@needs_fast
@pytest.mark.parametrize("code", CODES)
def test_pack_agrees(code):
    values = scalar_samples(code, random.Random(3))
    assert _fast.pack_scalars(code, values) == pure.pack_scalars(code, values)


@needs_fast
@pytest.mark.parametrize("code", CODES)
def test_unpack_agrees(code):
    values = scalar_samples(code, random.Random(5))
    blob = pure.pack_scalars(code, values)
    got_fast = _fast.unpack_scalars(code, blob, 0, len(values))
    got_pure = pure.unpack_scalars(code, blob, 0, len(values))
    assert got_fast == got_pure == values


@needs_fast
def test_unpack_truncated_raises_both():
    blob = pure.pack_scalars("f64", [1.0])
    for impl in (pure, _fast):
        with pytest.raises(ValueError):
            impl.unpack_scalars("f64", blob, 0, 2)


@needs_fast
def test_flatten_agrees():
    rng = random.Random(11)
    nested = [[[rng.randrange(256) for _ in range(3)] for _ in range(5)] for _ in range(4)]
    assert _fast.flatten_nested(nested) == pure.flatten_nested(nested)
    assert _fast.flatten_nested(7) == pure.flatten_nested(7) == ([], [7])
    assert _fast.flatten_nested([[], [], []]) == pure.flatten_nested([[], [], []])


@needs_fast
def test_flatten_ragged_raises_both():
    for bad in ([[1], [2, 3]], [[1, 2], 3], [1, [2]]):
        for impl in (pure, _fast):
            with pytest.raises(ValueError):
                impl.flatten_nested(bad)


@needs_fast
def test_unflatten_agrees():
    flat = list(range(24))
    for shape in ([24], [2, 12], [2, 3, 4], [4, 3, 2]):
        assert _fast.unflatten_flat(flat, shape) == pure.unflatten_flat(flat, shape)
    assert _fast.unflatten_flat([9], []) == pure.unflatten_flat([9], []) == 9
    assert _fast.unflatten_flat([], [3, 0]) == pure.unflatten_flat([], [3, 0]) == [[], [], []]


@needs_fast
def test_leaf_kind_agrees():
    for flat in ([], [1, 2], [1.0, 2.0]):
        assert _fast.leaf_kind(flat) == pure.leaf_kind(flat)
    for bad in ([1, 2.0], [True], ["x"]):
        for impl in (pure, _fast):
            with pytest.raises(ValueError):
                impl.leaf_kind(bad)


@needs_fast
@pytest.mark.parametrize("code", ["u8", "i16", "u32", "i64"])
def test_pack_range_checks(code):
    lo_bad = {"u8": -1, "i16": -(2**15) - 1, "u32": -5, "i64": -(2**63) - 1}[code]
    hi_bad = {"u8": 256, "i16": 2**15, "u32": 2**32, "i64": 2**63}[code]
    for impl in (pure, _fast):
        for bad in (lo_bad, hi_bad):
            with pytest.raises((ValueError, OverflowError)):
                impl.pack_scalars(code, [bad])
