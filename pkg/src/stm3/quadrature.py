"""Gauss-Legendre quadrature and the tangent map to the momentum half-line.

Every integral in this package is evaluated on a `MomentumGrid`: the
Gauss-Legendre rule on [-1, 1] pushed forward to (0, inf) through

    x = map_scale * tan(pi (t + 1) / 4),

with the Jacobian folded into the weights.  The tangent map distributes
points algebraically, which suits kernels that decay like powers: it
resolves the infrared region near the bound-state momentum scale and the
ultraviolet tail around the regulator scale at the same time.  All momenta
are dimensionless (units of the three-body subtraction scale).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

_NEWTON_TOL = 1e-15
_NEWTON_MAX_ITER = 100


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].

    Nodes are the roots of the degree-n Legendre polynomial, found by
    Newton iteration on the three-term recurrence to 1e-15; weights are
    2 / ((1 - x^2) P_n'(x)^2).  Deterministic, no randomness.

    Returns nodes in increasing order; the weights sum to 2.
    """
    if n < 1:
        raise InvalidArgumentError(f"quadrature order must be >= 1, got {n}")
    if n == 1:
        return np.array([0.0]), np.array([2.0])

    k = np.arange(n)
    x = np.cos(np.pi * (k + 0.75) / (n + 0.5))
    for _ in range(_NEWTON_MAX_ITER):
        pn, dpn = _legendre_and_derivative(n, x)
        dx = pn / dpn
        x -= dx
        if np.max(np.abs(dx)) <= _NEWTON_TOL:
            break
    _, dpn = _legendre_and_derivative(n, x)
    w = 2.0 / ((1.0 - x * x) * dpn * dpn)

    order = np.argsort(x)
    x, w = x[order], w[order]
    # enforce the exact +/- symmetry of the rule
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return x, w


def _legendre_and_derivative(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P_n(x) and P_n'(x) via the recurrence j P_j = (2j-1) x P_{j-1} - (j-1) P_{j-2}."""
    p_prev = np.ones_like(x)
    p = x.copy()
    for j in range(2, n + 1):
        p_prev, p = p, ((2 * j - 1) * x * p - (j - 1) * p_prev) / j
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


@dataclass(frozen=True)
class MomentumGrid:
    """Quadrature rule on the momentum half-line (0, inf).

    nodes      -- strictly increasing momenta, all positive and finite
    weights    -- positive quadrature weights, same length
    map_scale  -- scale parameter of the tangent map that produced the grid
    """

    nodes: np.ndarray
    weights: np.ndarray
    map_scale: float = 1.0

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.ndim != 1 or weights.shape != nodes.shape:
            raise InvalidArgumentError("nodes and weights must be 1-d arrays of equal length")
        if not np.all(np.isfinite(nodes)) or not np.all(np.isfinite(weights)):
            raise InvalidArgumentError("grid nodes/weights must be finite")
        if not np.all(nodes > 0.0) or not np.all(np.diff(nodes) > 0.0):
            raise InvalidArgumentError("grid nodes must be positive and strictly increasing")
        if not np.all(weights > 0.0):
            raise InvalidArgumentError("grid weights must be positive")
        if not self.map_scale > 0.0:
            raise InvalidArgumentError("map_scale must be positive")
        nodes.flags.writeable = False
        weights.flags.writeable = False

    @property
    def n(self) -> int:
        return self.nodes.size

    def integrate(self, values: np.ndarray) -> float | complex:
        """Quadrature sum of function values sampled on the nodes."""
        return np.asarray(values) @ self.weights


def map_to_halfline(ref_nodes: np.ndarray, ref_weights: np.ndarray,
                    map_scale: float = 1.0) -> MomentumGrid:
    """Push a rule on [-1, 1] to (0, inf) via x = map_scale tan(pi (t+1)/4).

    The endpoint t = -1 maps to x = 0 and t = +1 to infinity; both stay
    open because Gauss nodes never touch the interval ends.
    """
    if not map_scale > 0.0:
        raise InvalidArgumentError(f"map_scale must be positive, got {map_scale}")
    t = np.asarray(ref_nodes, dtype=float)
    w = np.asarray(ref_weights, dtype=float)
    u = 0.25 * np.pi * (t + 1.0)
    x = map_scale * np.tan(u)
    jac = map_scale * (0.25 * np.pi) / np.cos(u) ** 2
    return MomentumGrid(nodes=x, weights=w * jac, map_scale=map_scale)


def make_grid(n: int, map_scale: float = 1.0) -> MomentumGrid:
    """Gauss-Legendre rule of order n mapped to the momentum half-line."""
    t, w = gauss_legendre(n)
    return map_to_halfline(t, w, map_scale)
