"""Select the compiled kernels when available, else the pure-Python ones.

Set ``LATTICECALC_PURE=1`` to force the fallback.
"""

import os

from . import _pykernels

if os.environ.get("LATTICECALC_PURE") == "1":
    kernels = _pykernels
    NAME = "python"
else:
    try:
        from . import _ckernels as kernels
        NAME = "cython"
    except ImportError:  # extension not built
        kernels = _pykernels
        NAME = "python"

__all__ = ["kernels", "NAME"]
