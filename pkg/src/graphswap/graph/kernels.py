"""Kernel backend selection.

The hot loops (BFS statistics, betweenness, power iteration) run through
numba-compiled kernels when numba is importable. Set GRAPHSWAP_BACKEND=numpy
to force the pure-numpy fallback, or GRAPHSWAP_BACKEND=numba to fail loudly
when numba is missing. See benchmarks/bench_kernels.py for a comparison.
"""
from __future__ import annotations

import logging
import os

from ..errors import ValidationError

logger = logging.getLogger(__name__)

_ENV_VAR = "GRAPHSWAP_BACKEND"


def _select():
    choice = os.environ.get(_ENV_VAR, "auto").strip().lower() or "auto"
    if choice == "numpy":
        from . import _kernels_numpy as impl

        return impl, "numpy"
    if choice == "numba":
        from . import _kernels_numba as impl

        return impl, "numba"
    if choice != "auto":
        raise ValidationError(
            f"{_ENV_VAR} must be 'numba', 'numpy', or 'auto', got {choice!r}"
        )
    try:
        from . import _kernels_numba as impl

        return impl, "numba"
    except ImportError:  # pragma: no cover - depends on environment
        logger.warning("numba unavailable; falling back to numpy kernels")
        from . import _kernels_numpy as impl

        return impl, "numpy"


_impl, BACKEND = _select()

connected_components = _impl.connected_components
closeness_sums = _impl.closeness_sums
betweenness = _impl.betweenness
power_iteration = _impl.power_iteration
within_k_hops = _impl.within_k_hops
