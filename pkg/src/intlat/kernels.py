"""Kernel selection: the compiled extension when it imports, otherwise the
pure-Python fallback.  Set ``INTLAT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("INTLAT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

transfer_fill = _impl.transfer_fill
rk4_painleve = _impl.rk4_painleve

__all__ = ["BACKEND", "transfer_fill", "rk4_painleve"]
