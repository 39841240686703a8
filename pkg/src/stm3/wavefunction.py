"""Three-body bound-state wave function built from the spectator function.

For identical bosons all three spectator functions coincide, so in Jacobi
momenta (q = odd particle against the pair, p = relative momentum in the
pair, unit masses)

    Psi(q, p) = [f(|q|) + f(|p - q/2|) + f(|p + q/2|)] / (eps3 + p^2 + 3/4 q^2).

The denominator is the binding energy plus the free Hamiltonian and stays
positive everywhere.  f is interpolated monotone-cubically in log-momentum
over the solved table, extended by the fitted algebraic tail C / y^2 above
the last node, held constant below the first node, and clamped to zero
beyond the extrapolation ceiling (counted, for diagnostics).  Overall 2pi
powers are absorbed into the normalization, so no observable depends on
them: all integrals here use the s-wave reduction to the single relative
angle, d3q d3p -> 8 pi^2 q^2 dq p^2 dp dcos(theta).
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import PchipInterpolator

from .bound_state import SpectatorTable
from .errors import InvalidArgumentError, NormalizationError
from .quadrature import MomentumGrid, gauss_legendre

EXTRAPOLATION_CEILING = 100.0
TAIL_POWER = 2.0  # subtracted spectator functions fall off like 1/y^2


class WaveFunction:
    """Evaluate and normalize Psi from a solved spectator table."""

    def __init__(self, table: SpectatorTable, scale: float = 1.0):
        self.table = table
        self.eps3 = table.energy
        self._scale = scale
        nodes = table.grid.nodes
        values = scale * table.values
        self._log_nodes = np.log(nodes)
        self._interp = PchipInterpolator(self._log_nodes, values, extrapolate=False)
        self._f_low = values[0]
        # algebraic tail fitted over the last decade of the table
        sel = nodes >= nodes[-1] / 10.0
        self._tail_coef = float(np.mean(values[sel] * nodes[sel] ** TAIL_POWER))
        self._ceiling = max(EXTRAPOLATION_CEILING, nodes[-1])
        self.clamped_evaluations = 0

    def spectator_value(self, y):
        """f(y) for any y >= 0 via interpolation / tail extrapolation."""
        y = np.asarray(y, dtype=float)
        scalar = y.ndim == 0
        y = np.atleast_1d(y)
        out = np.empty_like(y)
        nodes = self.table.grid.nodes
        low = y <= nodes[0]
        high = y >= nodes[-1]
        clamp = y > self._ceiling
        mid = ~(low | high)
        out[low] = self._f_low
        with np.errstate(divide="ignore"):
            out[high] = self._tail_coef / y[high] ** TAIL_POWER
        out[clamp] = 0.0
        if np.any(clamp):
            self.clamped_evaluations += int(np.count_nonzero(clamp))
        if np.any(mid):
            out[mid] = self._interp(np.log(y[mid]))
        return float(out[0]) if scalar else out

    def psi(self, qvec, pvec) -> float:
        """Psi at Jacobi 3-vectors (q, p)."""
        qvec = np.asarray(qvec, dtype=float)
        pvec = np.asarray(pvec, dtype=float)
        q = np.linalg.norm(qvec)
        a2 = np.linalg.norm(pvec - 0.5 * qvec)
        a3 = np.linalg.norm(pvec + 0.5 * qvec)
        den = self.eps3 + pvec @ pvec + 0.75 * (qvec @ qvec)
        return float((self.spectator_value(q) + self.spectator_value(a2)
                      + self.spectator_value(a3)) / den)

    def psi_swave(self, q, p, cos_theta):
        """Psi on magnitude/angle meshes (broadcasting); used by the integrals."""
        q, p, z = np.broadcast_arrays(np.asarray(q, float), np.asarray(p, float),
                                      np.asarray(cos_theta, float))
        a2 = np.sqrt(p * p + 0.25 * q * q - p * q * z)
        a3 = np.sqrt(p * p + 0.25 * q * q + p * q * z)
        den = self.eps3 + p * p + 0.75 * q * q
        total = (self.spectator_value(q) + self.spectator_value(a2)
                 + self.spectator_value(a3))
        return total / den

    def norm(self, q_grid: MomentumGrid, p_grid: MomentumGrid, n_angle: int = 64,
             check_convergence: bool = False) -> float:
        """int d3q d3p |Psi|^2 in the s-wave reduction.

        With check_convergence the integral is recomputed on doubled grids
        and more than 1% drift raises NormalizationError.
        """
        value = self._norm_once(q_grid, p_grid, n_angle)
        if check_convergence:
            from .quadrature import make_grid

            dq = make_grid(2 * q_grid.n, q_grid.map_scale)
            dp = make_grid(2 * p_grid.n, p_grid.map_scale)
            refined = self._norm_once(dq, dp, 2 * n_angle)
            drift = abs(value - refined) / refined
            if drift > 0.01:
                raise NormalizationError(
                    f"norm drifts {drift:.2%} under grid doubling ({value} vs {refined})")
        return value

    def _norm_once(self, q_grid, p_grid, n_angle):
        z, wz = gauss_legendre(n_angle)
        q = q_grid.nodes[:, None, None]
        p = p_grid.nodes[None, :, None]
        psi2 = self.psi_swave(q, p, z[None, None, :]) ** 2
        inner = psi2 @ wz
        return float(8.0 * np.pi**2 * np.einsum(
            "i,j,ij->", q_grid.weights * q_grid.nodes**2,
            p_grid.weights * p_grid.nodes**2, inner))

    def normalized(self, q_grid: MomentumGrid, p_grid: MomentumGrid,
                   n_angle: int = 64) -> "WaveFunction":
        """Rescale the spectator table so that the norm equals 1."""
        value = self.norm(q_grid, p_grid, n_angle)
        if not value > 0.0:
            raise NormalizationError(f"norm must be positive, got {value}")
        return WaveFunction(self.table, scale=self._scale / np.sqrt(value))

    def momentum_density(self, q, p_grid: MomentumGrid, n_angle: int = 64):
        """n(q) = int d3p |Psi(q, p)|^2; integrates to 1 for a normalized state."""
        q = np.asarray(q, dtype=float)
        scalar = q.ndim == 0
        q = np.atleast_1d(q)
        if np.any(q < 0.0):
            raise InvalidArgumentError("momenta must be non-negative")
        z, wz = gauss_legendre(n_angle)
        psi2 = self.psi_swave(q[:, None, None], p_grid.nodes[None, :, None],
                              z[None, None, :]) ** 2
        inner = psi2 @ wz
        out = 2.0 * np.pi * inner @ (p_grid.weights * p_grid.nodes**2)
        return float(out[0]) if scalar else out
