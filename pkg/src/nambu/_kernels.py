"""Backend selection for the numerical kernels.

The compiled extension is used when it was built; set ``NAMBU_PURE_PYTHON=1``
to force the pure-Python implementation.
"""

import os

from . import _rk4_py

try:
    from ._rk4 import rk4 as _rk4_c
except ImportError:
    _rk4_c = None

BACKENDS = {"python": _rk4_py.rk4}
if _rk4_c is not None:
    BACKENDS["cython"] = _rk4_c

BACKEND = "python" if os.environ.get("NAMBU_PURE_PYTHON") or _rk4_c is None else "cython"
rk4 = BACKENDS[BACKEND]
