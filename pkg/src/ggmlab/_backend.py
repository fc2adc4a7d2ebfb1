"""Select the kernel implementation at import time.

The compiled extension is used when it is importable; setting
``GGMLAB_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

from . import _kernels_py

if os.environ.get("GGMLAB_PURE_PYTHON", "") == "1":
    kernels = _kernels_py
    COMPILED = False
else:
    try:
        from . import _kernels as kernels

        COMPILED = True
    except ImportError:
        kernels = _kernels_py
        COMPILED = False

BACKEND = "cython" if COMPILED else "numpy"

fallback = _kernels_py
