"""Scan kernels with backend selection at import time.

The compiled Cython core is preferred; set PNPAIRS_PURE_PYTHON=1 to force the
pure-Python fallback (same results, slower).  ``BACKEND`` names the choice.
"""

import os

if os.environ.get("PNPAIRS_PURE_PYTHON"):
    from . import pyscan as impl
else:
    try:
        from . import _core as impl  # type: ignore[attr-defined]
    except ImportError:
        from . import pyscan as impl

from . import pyscan
from .prep import FlatField

BACKEND = impl.BACKEND
enumerate_powers = impl.enumerate_powers
pack_all = impl.pack_all
scan_pairs = impl.scan_pairs

__all__ = ["BACKEND", "FlatField", "enumerate_powers", "pack_all", "scan_pairs", "pyscan", "impl"]
