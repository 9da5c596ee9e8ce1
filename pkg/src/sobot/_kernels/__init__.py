"""Hot-path kernels with backend selection.

Imports the compiled Cython module when it is available and the host is
little-endian, otherwise falls back to the pure-Python twin.  Set
``SOBOT_PURE=1`` to force the fallback (used by tests and benchmarks).
"""

from __future__ import annotations

import os
import sys

from . import pure

if os.environ.get("SOBOT_PURE") == "1" or sys.byteorder != "little":
    _impl = pure
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

BACKEND: str = _impl.BACKEND
SCALAR_SIZE = pure.SCALAR_SIZE

pack_scalars = _impl.pack_scalars
unpack_scalars = _impl.unpack_scalars
flatten_nested = _impl.flatten_nested
unflatten_flat = _impl.unflatten_flat
leaf_kind = _impl.leaf_kind

__all__ = [
    "BACKEND",
    "SCALAR_SIZE",
    "pack_scalars",
    "unpack_scalars",
    "flatten_nested",
    "unflatten_flat",
    "leaf_kind",
]
