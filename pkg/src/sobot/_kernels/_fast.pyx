# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled codec kernels.

Contract identical to :mod:`sobot._kernels.pure`.  Only built/selected on
little-endian hosts; the scalar loops memcpy native representations.
"""

from libc.string cimport memcpy
from libc.stdint cimport (int8_t, uint8_t, int16_t, uint16_t,
                          int32_t, uint32_t, int64_t, uint64_t)
from cpython.bytes cimport PyBytes_FromStringAndSize, PyBytes_AS_STRING

BACKEND = "compiled"

SCALAR_SIZE = {
    "bool": 1, "i8": 1, "u8": 1, "i16": 2, "u16": 2,
    "i32": 4, "u32": 4, "i64": 8, "u64": 8, "f32": 4, "f64": 8,
}


def pack_scalars(str code, list values):
    cdef Py_ssize_t n = len(values)
    cdef Py_ssize_t i
    cdef bytes out = PyBytes_FromStringAndSize(NULL, n * <Py_ssize_t>SCALAR_SIZE[code])
    cdef char* buf = PyBytes_AS_STRING(out)
    cdef double d
    cdef float f
    cdef int8_t v_i8
    cdef uint8_t v_u8
    cdef int16_t v_i16
    cdef uint16_t v_u16
    cdef int32_t v_i32
    cdef uint32_t v_u32
    cdef int64_t v_i64
    cdef uint64_t v_u64

    if code == "f64":
        for i in range(n):
            d = values[i]
            memcpy(buf + i * 8, &d, 8)
    elif code == "f32":
        for i in range(n):
            f = <float>(<double>values[i])
            memcpy(buf + i * 4, &f, 4)
    elif code == "u8":
        for i in range(n):
            v_u8 = values[i]
            buf[i] = <char>v_u8
    elif code == "i8":
        for i in range(n):
            v_i8 = values[i]
            buf[i] = <char>v_i8
    elif code == "i16":
        for i in range(n):
            v_i16 = values[i]
            memcpy(buf + i * 2, &v_i16, 2)
    elif code == "u16":
        for i in range(n):
            v_u16 = values[i]
            memcpy(buf + i * 2, &v_u16, 2)
    elif code == "i32":
        for i in range(n):
            v_i32 = values[i]
            memcpy(buf + i * 4, &v_i32, 4)
    elif code == "u32":
        for i in range(n):
            v_u32 = values[i]
            memcpy(buf + i * 4, &v_u32, 4)
    elif code == "i64":
        for i in range(n):
            v_i64 = values[i]
            memcpy(buf + i * 8, &v_i64, 8)
    elif code == "u64":
        for i in range(n):
            v_u64 = values[i]
            memcpy(buf + i * 8, &v_u64, 8)
    elif code == "bool":
        for i in range(n):
            buf[i] = 1 if values[i] else 0
    else:
        raise ValueError(f"unknown scalar code {code!r}")
    return out


def unpack_scalars(str code, data, Py_ssize_t offset, Py_ssize_t count):
    cdef const unsigned char[::1] buf = data
    cdef Py_ssize_t size = SCALAR_SIZE[code]
    cdef Py_ssize_t end = offset + size * count
    if end > buf.shape[0] or offset < 0:
        raise ValueError("truncated")
    cdef list out = [None] * count
    cdef Py_ssize_t i
    cdef const unsigned char* p = &buf[0] + offset if buf.shape[0] else NULL
    cdef double d
    cdef float f
    cdef int8_t v_i8
    cdef int16_t v_i16
    cdef uint16_t v_u16
    cdef int32_t v_i32
    cdef uint32_t v_u32
    cdef int64_t v_i64
    cdef uint64_t v_u64

    if code == "f64":
        for i in range(count):
            memcpy(&d, p + i * 8, 8)
            out[i] = d
    elif code == "f32":
        for i in range(count):
            memcpy(&f, p + i * 4, 4)
            out[i] = <double>f
    elif code == "u8":
        for i in range(count):
            out[i] = <int>p[i]
    elif code == "i8":
        for i in range(count):
            v_i8 = <int8_t>p[i]
            out[i] = <int>v_i8
    elif code == "i16":
        for i in range(count):
            memcpy(&v_i16, p + i * 2, 2)
            out[i] = <int>v_i16
    elif code == "u16":
        for i in range(count):
            memcpy(&v_u16, p + i * 2, 2)
            out[i] = <int>v_u16
    elif code == "i32":
        for i in range(count):
            memcpy(&v_i32, p + i * 4, 4)
            out[i] = <long>v_i32
    elif code == "u32":
        for i in range(count):
            memcpy(&v_u32, p + i * 4, 4)
            out[i] = <long>v_u32
    elif code == "i64":
        for i in range(count):
            memcpy(&v_i64, p + i * 8, 8)
            out[i] = v_i64
    elif code == "u64":
        for i in range(count):
            memcpy(&v_u64, p + i * 8, 8)
            out[i] = v_u64
    elif code == "bool":
        for i in range(count):
            out[i] = p[i] != 0
    else:
        raise ValueError(f"unknown scalar code {code!r}")
    return out


def flatten_nested(obj):
    cdef list shape = []
    probe = obj
    while isinstance(probe, list):
        shape.append(len(probe))
        if not probe:
            break
        probe = probe[0]
    cdef Py_ssize_t depth = len(shape)
    cdef list flat = []
    _walk(obj, 0, depth, shape, flat)
    return shape, flat


cdef _walk(node, Py_ssize_t level, Py_ssize_t depth, list shape, list flat):
    if level == depth:
        if isinstance(node, list):
            raise ValueError("ragged")
        flat.append(node)
        return
    if not isinstance(node, list) or len(node) != <Py_ssize_t>shape[level]:
        raise ValueError("ragged")
    for child in node:
        _walk(child, level + 1, depth, shape, flat)


def unflatten_flat(list flat, shape):
    cdef list dims = list(shape)
    if not dims:
        return flat[0]
    cdef list strides = [1] * len(dims)
    cdef Py_ssize_t k
    for k in range(len(dims) - 2, -1, -1):
        strides[k] = strides[k + 1] * dims[k + 1]
    return _build(flat, dims, strides, 0, 0)


cdef _build(list flat, list dims, list strides, Py_ssize_t level, Py_ssize_t offset):
    cdef Py_ssize_t n = dims[level]
    cdef Py_ssize_t i, step
    if level == len(dims) - 1:
        return flat[offset : offset + n]
    step = strides[level]
    return [_build(flat, dims, strides, level + 1, offset + i * step) for i in range(n)]


def leaf_kind(list flat):
    if not flat:
        return "empty"
    cdef bint saw_int = False
    cdef bint saw_float = False
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
