"""Backend selection for the threshold/decision kernels.

The compiled ``_ckernels`` extension is used when it was built; otherwise the
pure-Python twin is loaded. Set ``IMPLICITAUTH_PURE_PYTHON=1`` to force the
fallback.
"""

import os

from . import _pykernels

python_backend = _pykernels

if os.environ.get("IMPLICITAUTH_PURE_PYTHON", "") not in ("", "0"):
    compiled_backend = None
else:
    try:
        from . import _ckernels as compiled_backend
    except ImportError:
        compiled_backend = None

backend = compiled_backend or python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

WARMUP, NORMAL, ABNORMAL = _pykernels.WARMUP, _pykernels.NORMAL, _pykernels.ABNORMAL

block_stats = backend.block_stats
static_stream = backend.static_stream
sd_block_stream = backend.sd_block_stream
ewma_direct_stream = backend.ewma_direct_stream
ewma_sd_block_stream = backend.ewma_sd_block_stream
classify_stream = backend.classify_stream
