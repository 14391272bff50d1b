"""Backend selection for the butterfly kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``HADAMARD_DSE_PURE=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("HADAMARD_DSE_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py


def fht_real_batch(x, m):
    _impl.fht_real_batch(x, m)
    return x


def fht_fixed_batch(x, m):
    _impl.fht_fixed_batch(x, m)
    return x
