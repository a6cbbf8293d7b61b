"""Select the compiled kernels when available, else the NumPy fallback.

Set ``TSTEIN_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

if os.environ.get("TSTEIN_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

cubic_eval = _impl.cubic_eval
shifted_sum = _impl.shifted_sum
