"""Scan-kernel backend selection.

Prefers the compiled extension when it imported cleanly; otherwise uses the
pure-Python fallback. Set HEAVYTAIL_DISABLE_EXTENSION=1 to force the pure
path (used by the benchmark and the backend-equivalence tests). Both
backends are bit-identical, so the choice never changes results.
"""

import os

from . import _pure

_impl = _pure
if not os.environ.get("HEAVYTAIL_DISABLE_EXTENSION"):
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        pass

kahan_sum = _impl.kahan_sum
kahan_cumsum = _impl.kahan_cumsum
tn_scan = _impl.tn_scan


def backend() -> str:
    """Name of the active kernel backend: 'compiled' or 'pure'."""
    return "pure" if _impl is _pure else "compiled"
