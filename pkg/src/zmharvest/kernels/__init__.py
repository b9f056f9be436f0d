"""Hot numeric kernels with a numba fast path.

Set ``ZMHARVEST_DISABLE_NUMBA=1`` to force the pure-numpy implementation
(also used automatically when numba cannot be imported).
"""
import os

from . import numpy_impl

_disabled = os.environ.get("ZMHARVEST_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

if _disabled:
    _impl = numpy_impl
    BACKEND = "numpy"
else:
    try:
        from . import numba_impl as _impl
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _impl = numpy_impl
        BACKEND = "numpy"

cos_turns = _impl.cos_turns
gaussian_mode_sum = _impl.gaussian_mode_sum
weighted_cos_sum = _impl.weighted_cos_sum
wightman_mode_sum = _impl.wightman_mode_sum
log_kernel = _impl.log_kernel
derivative_kernel = _impl.derivative_kernel


def implementation(name):
    """Return the kernel module for ``"numpy"`` or ``"numba"`` explicitly."""
    if name == "numpy":
        return numpy_impl
    if name == "numba":
        from . import numba_impl
        return numba_impl
    raise ValueError(f"unknown kernel backend {name!r}")


__all__ = [
    "BACKEND", "cos_turns", "gaussian_mode_sum", "weighted_cos_sum",
    "wightman_mode_sum", "log_kernel", "derivative_kernel", "implementation",
]
