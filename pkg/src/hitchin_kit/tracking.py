"""Backend selection for the root continuation kernel.

The compiled ``_ctrack`` extension is used when it was built; otherwise the
pure-Python ``_pytrack`` module is used.  Setting ``HITCHIN_KIT_PURE=1``
forces the fallback.
"""

import os

from . import _pytrack
from ._pytrack import OK, AMBIGUOUS, NO_CONVERGENCE, COLLISION

STATUS_NAMES = {
    OK: "ok",
    AMBIGUOUS: "ambiguous root matching",
    NO_CONVERGENCE: "root solver did not converge",
    COLLISION: "root collision",
}

_ctrack = None
if os.environ.get("HITCHIN_KIT_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ctrack
    except ImportError:
        _ctrack = None

BACKEND = "cython" if _ctrack is not None else "python"
track_path = _ctrack.track_path if _ctrack is not None else _pytrack.track_path
py_track_path = _pytrack.track_path
c_track_path = _ctrack.track_path if _ctrack is not None else None

__all__ = ["BACKEND", "track_path", "py_track_path", "c_track_path", "STATUS_NAMES",
           "OK", "AMBIGUOUS", "NO_CONVERGENCE", "COLLISION"]
