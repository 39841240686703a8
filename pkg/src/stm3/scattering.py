"""Elastic atom-dimer scattering below the three-body breakup threshold.

A channel is fixed by eps2 > 0 and the on-shell relative momentum k, with
total energy E3 = -eps2 + (3/4) k^2 < 0.  The half-off-shell amplitude is
obtained from the driven STM equation; writing h(y) = 2 tau_hat(y) w(y)
with the pole-free propagator

    tau_hat(y) = (3/4)(k^2 - y^2) tau(E3 - 3/4 y^2)
               = [sqrt(eps2) + sqrt(3/4 y^2 - E3)] / (2 pi^2),

the reduced unknown w satisfies

    w(y) = L(y, k) + 4 pi int_0^inf dx x^2 L(y, x) tau(E3 - 3/4 x^2) w(x),

where L is the subtracted angular function shared with the bound-state
kernel and tau carries a simple pole at x = k, the elastic cut.  The pole
factor 1/((3/4)(k^2 - x^2) + i0) is handled by subtraction: the smooth
remainder goes through the quadrature, the principal value of the bare
pole vanishes on the half-line, and the residue contributes the exact
-i pi delta term.  The on-shell point x = k is appended to the grid as an
extra Nystrom row, so h(k, k) comes out of the solve directly.  The +i0
(outgoing-wave) branch is used throughout.

The overall scale of h carries no meaning here (an undetermined power of
2 pi); everything tested is convention-independent: ratios, k-dependence
and the optical-theorem combination Im(1/h) / k, which the subtraction
scheme reproduces exactly as 4 pi^2 / 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import InvalidArgumentError, NumericalQualityError, UnsupportedRegionError
from .integral_eq import KernelMatrix, solve_assembled
from .quadrature import MomentumGrid, make_grid
from .twobody import ChannelConfig, tau_pole_residue

NODE_CLEARANCE = 1e-6      # minimum |node - k| before the grid is jittered
MAP_SCALE_JITTER = 1e-3
IEPS_DEFAULT = (1e-2, 5e-3, 2.5e-3)
SUBTRACTION_ENERGY = -1.0


@dataclass(frozen=True)
class ElasticChannel:
    """One elastic channel: bound pair eps2 > 0 and relative momentum k > 0."""

    cfg: ChannelConfig
    k: float

    def __post_init__(self):
        if self.cfg.eps2 <= 0.0:
            raise InvalidArgumentError("elastic scattering needs a bound dimer (eps2 > 0)")
        if not self.k > 0.0:
            raise InvalidArgumentError(f"relative momentum must be positive, got {self.k}")
        if not self.e3 < 0.0:
            raise UnsupportedRegionError(
                f"channel is above the breakup threshold: E3 = {self.e3} >= 0 "
                f"(k must stay below {math.sqrt(4.0 * self.cfg.eps2 / 3.0)})")

    @property
    def e3(self) -> float:
        return -self.cfg.eps2 + 0.75 * self.k * self.k


@dataclass
class ScatteringSolution:
    """Complex half-off-shell amplitude on the grid plus the on-shell point."""

    channel: ElasticChannel
    grid: MomentumGrid
    h: np.ndarray
    on_shell: complex

    @property
    def cross_section(self) -> float:
        return float(abs(self.on_shell) ** 2)


def tau_hat(y, channel: ElasticChannel):
    """Pair propagator with the on-shell dimer pole factored out (regular at y = k)."""
    e3 = channel.e3
    return (np.sqrt(channel.cfg.eps2) + np.sqrt(0.75 * np.asarray(y) ** 2 - e3)) \
        / (2.0 * np.pi**2)


def _delta_angular(e3, y, x):
    """Subtracted angular function L(e3) - L(-1) on arbitrary node sets."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return (_backend.angular_log_matrix(e3, y, x)
            - _backend.angular_log_matrix(SUBTRACTION_ENERGY, y, x))


def driver(y, channel: ElasticChannel):
    """Inhomogeneous term 2 tau_hat(y) [L(E3; y, k) - L(-1; y, k)] (complex)."""
    scalar = np.isscalar(y)
    delta = _delta_angular(channel.e3, y, [channel.k])[:, 0]
    out = (2.0 * tau_hat(np.atleast_1d(y), channel) * delta).astype(complex)
    return complex(out[0]) if scalar else out


def _prepare_grid(channel: ElasticChannel, grid: MomentumGrid) -> MomentumGrid:
    """Jitter the map scale when a node lands on the elastic pole at x = k."""
    while np.min(np.abs(grid.nodes - channel.k)) < NODE_CLEARANCE:
        grid = make_grid(grid.n, grid.map_scale * (1.0 + MAP_SCALE_JITTER))
    return grid


def scattering_system(channel: ElasticChannel, grid: MomentumGrid
                      ) -> tuple[KernelMatrix, np.ndarray, MomentumGrid]:
    """Assemble the pole-subtracted linear system for w on grid + on-shell node.

    Returns (matrix, driver vector, possibly jittered grid); the matrix is
    I - A with the naive quadrature kernel in the first n columns and the
    subtraction/residue bookkeeping collected in the on-shell column.
    """
    grid = _prepare_grid(channel, grid)
    x, w = grid.nodes, grid.weights
    n = grid.n
    k, e3 = channel.k, channel.e3
    residue = tau_pole_residue(channel.cfg)

    ys = np.append(x, k)
    delta = _delta_angular(e3, ys, x)
    delta_k = _delta_angular(e3, ys, [k])[:, 0]
    tau_x = 1.0 / (2.0 * np.pi**2
                   * (np.sqrt(channel.cfg.eps2) - np.sqrt(0.75 * x * x - e3)))

    a = np.zeros((n + 1, n + 1), dtype=complex)
    a[:, :n] = 4.0 * np.pi * (w * x * x * tau_x)[None, :] * delta
    # subtracted pole column: PV of the bare pole vanishes on the half-line,
    # leaving the quadrature counter-term and the -i pi residue at x = k
    pv_sum = float(np.sum(w / (k * k - x * x)))
    a[:, n] = -(16.0 * np.pi / 3.0) * k * k * residue * delta_k \
        * (pv_sum + 1j * np.pi / (2.0 * k))

    matrix = KernelMatrix(entries=np.eye(n + 1, dtype=complex) - a, grid=grid,
                          energy_tag=e3)
    return matrix, delta_k.astype(complex), grid


def solve(channel: ElasticChannel, grid: MomentumGrid,
          check_quality: bool = False) -> ScatteringSolution:
    """Solve the elastic channel; h on the nodes plus the exact on-shell value.

    With check_quality the on-shell amplitude is recomputed on a doubled
    grid; relative drift beyond 1e-4 raises NumericalQualityError (the
    subtracted integrand should be smooth, so drift means trouble).
    """
    matrix, rhs, grid = scattering_system(channel, grid)
    wsol = solve_assembled(matrix, rhs)
    ys = np.append(grid.nodes, channel.k)
    h = 2.0 * tau_hat(ys, channel) * wsol
    sol = ScatteringSolution(channel=channel, grid=grid, h=h[:-1],
                             on_shell=complex(h[-1]))
    if check_quality:
        refined = solve(channel, make_grid(2 * grid.n, grid.map_scale))
        drift = abs(sol.on_shell - refined.on_shell) / abs(refined.on_shell)
        if drift > 1e-4:
            raise NumericalQualityError(
                f"on-shell amplitude drifts {drift:.2e} under grid doubling; "
                "pole-subtraction remainder is not smooth")
    return sol


def cross_section(sol: ScatteringSolution) -> float:
    """|h(k, k)|^2, the s-wave differential cross section in this normalization."""
    return sol.cross_section


def solve_iepsilon(channel: ElasticChannel, grid: MomentumGrid,
                   epsilon: float) -> complex:
    """On-shell amplitude with an explicit +i epsilon in the pole denominator.

    Independent route used to validate the subtraction scheme: the dimer
    pole is smoothed by continuing tau to complex energy, the naive
    quadrature is applied, and epsilon -> 0 is taken by extrapolation
    (see onshell_iepsilon_extrapolated).  The grid must resolve the
    Lorentzian width, so use a dense grid here.
    """
    grid = _prepare_grid(channel, grid)
    x, w = grid.nodes, grid.weights
    n = grid.n
    k, e3 = channel.k, channel.e3
    ys = np.append(x, k)
    delta = _delta_angular(e3, ys, x)
    tau_eps = 1.0 / (2.0 * np.pi**2 * (np.sqrt(channel.cfg.eps2)
                                       - np.sqrt(0.75 * x * x - e3 - 1j * epsilon)))
    a = np.zeros((n + 1, n + 1), dtype=complex)
    a[:, :n] = 4.0 * np.pi * (w * x * x * tau_eps)[None, :] * delta
    rhs = _delta_angular(e3, ys, [k])[:, 0].astype(complex)
    matrix = KernelMatrix(entries=np.eye(n + 1, dtype=complex) - a, grid=grid,
                          energy_tag=e3)
    wsol = solve_assembled(matrix, rhs)
    return complex(2.0 * tau_hat(k, channel) * wsol[-1])


def onshell_iepsilon_extrapolated(channel: ElasticChannel, grid: MomentumGrid,
                                  epsilons: tuple[float, ...] = IEPS_DEFAULT) -> complex:
    """Richardson-extrapolate the i-epsilon amplitudes to epsilon = 0."""
    eps = np.asarray(epsilons, dtype=float)
    values = np.array([solve_iepsilon(channel, grid, e) for e in eps])
    coeffs = np.polyfit(eps, values, deg=len(eps) - 1)
    return complex(np.polyval(coeffs, 0.0))
