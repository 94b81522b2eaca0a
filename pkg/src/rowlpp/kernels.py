"""Kernel lane selection.

The compiled extension is preferred when it imported cleanly; the numpy lane
is the fallback and can be forced with the environment variable
``ROWLPP_PURE_PY=1``.  Both lanes perform identical per-cell max/+ operations,
so the choice never changes a result bit.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("ROWLPP_PURE_PY"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]
    except ImportError:  # extension not built; numpy lane is fully supported
        _impl = _kernels_py

ACTIVE_LANE: str = _impl.LANE

weak_weak = _impl.weak_weak
strict_x = _impl.strict_x
strict_y = _impl.strict_y
