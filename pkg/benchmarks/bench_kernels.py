"""Compare the compiled codec kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [repeats]

The workload is the pipeline's hot path: one 240x320 rgb8 frame worth of
leaves (230400 values) moving through nested-list flatten/unflatten and
scalar pack/unpack, plus the end-to-end std/NdArray message encode.
"""

from __future__ import annotations

import random
import sys
import time

from sobot._kernels import pure

try:
    from sobot._kernels import _fast
except ImportError:
    _fast = None

from sobot.codec import MessageValue, default_registry, encode, ndarray_to_nested, to_message_fields

FRAME = (240, 320, 3)
LEAVES = FRAME[0] * FRAME[1] * FRAME[2]


def timeit(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    repeats = int(sys.argv[1]) if len(sys.argv) > 1 else 5
    rng = random.Random(1)
    flat_u8 = [rng.randrange(256) for _ in range(LEAVES)]
    flat_f64 = [rng.random() for _ in range(LEAVES)]
    shape = list(FRAME)
    nested = pure.unflatten_flat(flat_u8, shape)
    packed = pure.pack_scalars("u8", flat_u8)

    registry = default_registry()
    nd_schema = registry.get("std/NdArray")

    def encode_frame(kernels):
        def run():
            msg = ndarray_to_nested("u8", shape, flat_u8)
            value = MessageValue(nd_schema, to_message_fields(msg))
            encode(value, registry)

        return run

    cases = [
        ("flatten_nested  u8 frame", lambda k: (lambda: k.flatten_nested(nested))),
        ("unflatten_flat  u8 frame", lambda k: (lambda: k.unflatten_flat(flat_u8, shape))),
        ("pack_scalars    u8 x230k", lambda k: (lambda: k.pack_scalars("u8", flat_u8))),
        ("pack_scalars    f64x230k", lambda k: (lambda: k.pack_scalars("f64", flat_f64))),
        ("unpack_scalars  u8 x230k", lambda k: (lambda: k.unpack_scalars("u8", packed, 0, LEAVES))),
        ("leaf_kind       u8 x230k", lambda k: (lambda: k.leaf_kind(flat_u8))),
    ]

    print(f"workload: {FRAME[0]}x{FRAME[1]}x{FRAME[2]} frame "
          f"({LEAVES} leaves), best of {repeats}")
    print(f"{'kernel':<26} {'pure':>10} {'compiled':>10} {'speedup':>9}")
    for name, make in cases:
        t_pure = timeit(make(pure), repeats)
        if _fast is not None:
            t_fast = timeit(make(_fast), repeats)
            print(f"{name:<26} {t_pure * 1e3:>8.2f}ms {t_fast * 1e3:>8.2f}ms "
                  f"{t_pure / t_fast:>8.1f}x")
        else:
            print(f"{name:<26} {t_pure * 1e3:>8.2f}ms {'n/a':>10} {'':>9}")

    # end to end, whichever backend is selected vs forced pure
    import sobot._kernels as selected

    t_selected = timeit(encode_frame(selected), repeats)
    print(f"\nstd/NdArray frame encode via selected backend "
          f"[{selected.BACKEND}]: {t_selected * 1e3:.2f} ms")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
