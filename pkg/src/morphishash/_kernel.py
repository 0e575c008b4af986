"""Backend selection: compiled extension when available, pure Python otherwise.

Set MORPHISHASH_PURE=1 to force the pure backend (used by the backend
comparison benchmark and the parity tests).
"""

from __future__ import annotations

import os

if os.environ.get("MORPHISHASH_PURE"):
    from . import _pykernel as _impl
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykernel as _impl

BACKEND = _impl.BACKEND_NAME

plain_construct = _impl.plain_construct
plain_shockhash = _impl.plain_shockhash
bip_construct = _impl.bip_construct
bip_shockhash = _impl.bip_shockhash
bip_first_pseudoforest = _impl.bip_first_pseudoforest


def get_backend(name: str):
    """Explicit backend module by name ('native' or 'pure'); for benchmarks."""
    if name == "pure":
        from . import _pykernel
        return _pykernel
    if name == "native":
        from . import _native  # type: ignore[attr-defined]
        return _native
    raise ValueError(f"unknown backend {name!r}")
