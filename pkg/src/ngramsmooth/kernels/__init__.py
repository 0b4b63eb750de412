"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

The backend is chosen by the NGRAMSMOOTH_BACKEND environment variable:
"numba" forces the jitted kernels, "numpy" forces the vectorized fallback,
and the default "auto" uses numba when it imports cleanly.  Both backends
compute identical results (see tests/test_kernels.py and
benchmarks/bench_kernels.py).
"""

from __future__ import annotations

import os

from ngramsmooth.kernels import numpyimpl

_requested = os.environ.get("NGRAMSMOOTH_BACKEND", "auto").lower()

if _requested not in ("auto", "numba", "numpy"):
    raise RuntimeError(f"NGRAMSMOOTH_BACKEND must be auto, numba or numpy, got {_requested!r}")

if _requested == "numpy":
    _impl = numpyimpl
    backend_name = "numpy"
else:
    try:
        from ngramsmooth.kernels import numbaimpl as _impl

        backend_name = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        _impl = numpyimpl
        backend_name = "numpy"

em_accumulate = _impl.em_accumulate
interp_log2prob = _impl.interp_log2prob
interp_event_probs = _impl.interp_event_probs
onecount_event_probs = _impl.onecount_event_probs

__all__ = [
    "backend_name",
    "em_accumulate",
    "interp_log2prob",
    "interp_event_probs",
    "onecount_event_probs",
    "numpyimpl",
]
