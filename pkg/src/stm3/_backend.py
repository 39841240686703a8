"""Select the kernel-assembly backend at import time.

The compiled Cython core is preferred; the pure-numpy fallback is picked
up transparently when the extension was not built.  Both backends are
deterministic and agree to rounding; `benchmarks/bench_kernels.py`
compares their speed.
"""

import numpy as np

try:
    from . import _kernels_cy as _impl
except ImportError:  # extension not built: fall back to numpy
    from . import _kernels_py as _impl


def backend_name() -> str:
    """'compiled' when the Cython core is active, 'python' otherwise."""
    return _impl.IMPLEMENTATION


def angular_log_matrix(a: float, y: np.ndarray, x: np.ndarray) -> np.ndarray:
    y = np.ascontiguousarray(y, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float64)
    return _impl.angular_log_matrix(float(a), y, x)


def stm_kernel_matrix(e3: float, eps2: float, y: np.ndarray, x: np.ndarray,
                      log_sub: np.ndarray) -> np.ndarray:
    y = np.ascontiguousarray(y, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float64)
    log_sub = np.ascontiguousarray(log_sub, dtype=np.float64)
    return _impl.stm_kernel_matrix(float(e3), float(eps2), y, x, log_sub)
