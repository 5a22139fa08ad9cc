"""Batch kernels for finite-quotient arithmetic.

The compiled extension is used when it imports; otherwise the numpy
implementation takes over.  Set ``PADLAB_PURE=1`` to force the fallback.
"""

import os

from . import _pykernels as pure

BACKEND = "python"
_impl = pure

if os.environ.get("PADLAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled
    except ImportError:
        compiled = None
    else:
        BACKEND = "cython"
        _impl = compiled
else:
    compiled = None

MAX_MODULUS = 2 ** 31

ring_mul_batch = _impl.ring_mul_batch
law_mul_batch = _impl.law_mul_batch


def backends():
    """Return the available implementations keyed by name."""
    out = {"python": pure}
    if compiled is not None:
        out["cython"] = compiled
    return out
