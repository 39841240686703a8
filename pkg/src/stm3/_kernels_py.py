"""Pure-numpy implementations of the hot kernel-matrix assemblies.

Fallback for `stm3._kernels_cy`; both expose the same two functions and
must agree to rounding. The angular integral uses the arctanh form

    int_{-1}^{1} dz / (a - y^2 - x^2 - x y z) = 2 atanh(u/d) / u,

with d = a - y^2 - x^2 < 0 and u = x y (limit 2/d as u -> 0), which is
exact and cancellation-free for all admissible arguments.
"""

import numpy as np

IMPLEMENTATION = "python"


def angular_log_matrix(a, y, x):
    """Matrix L[i, j] of the angular integral at energy a over node pairs."""
    yy = np.asarray(y, dtype=float)[:, None]
    xx = np.asarray(x, dtype=float)[None, :]
    d = a - yy * yy - xx * xx
    u = yy * xx
    small = u == 0.0
    safe_u = np.where(small, 1.0, u)
    return np.where(small, 2.0 / d, 2.0 * np.arctanh(u / d) / safe_u)


def stm_kernel_matrix(e3, eps2, y, x, log_sub):
    """Subtracted s-wave STM kernel K[i, j] on node pairs.

    K(y, x) = 4 pi tau(e3 - 3/4 y^2) x^2 [L(e3; y, x) - log_sub(y, x)]
    where log_sub is the precomputed angular matrix at the regulator
    energy -1.
    """
    yy = np.asarray(y, dtype=float)
    xx = np.asarray(x, dtype=float)
    tau = 1.0 / (2.0 * np.pi**2 * (np.sqrt(eps2) - np.sqrt(0.75 * yy * yy - e3)))
    delta = angular_log_matrix(e3, yy, xx) - np.asarray(log_sub)
    return (4.0 * np.pi) * tau[:, None] * (xx * xx)[None, :] * delta
