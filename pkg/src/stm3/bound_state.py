"""Three identical bosons: subtracted STM equation and the Efimov spectrum.

After the s-wave angular reduction the homogeneous equation for the
spectator function reads

    f(y) = int_0^inf dx K(y, x; E3) f(x),
    K(y, x; E3) = 4 pi tau(E3 - 3/4 y^2) x^2 [L(E3; y, x) - L(-1; y, x)],

where L(a; y, x) is the closed-form angular integral and the second term
subtracts the kernel at the regulator energy -1, removing the Thomas
collapse.  Discretized on a momentum grid this is M(E3) F = 0 with
M = I - W K; bound states are the energies where det M changes sign.
The spectator function itself comes from pinning one component to 1 and
solving the reduced inhomogeneous system.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _backend
from .errors import AssemblyError, ExtractionError, InvalidArgumentError, UnsupportedRegionError
from .integral_eq import logdet_sign
from .quadrature import MomentumGrid
from .twobody import ChannelConfig, tau

logger = logging.getLogger(__name__)

SUBTRACTION_ENERGY = -1.0   # regulator point in units of the three-body scale
BISECT_RELTOL = 1e-10       # relative energy tolerance of the root bisection
DEFAULT_PER_DECADE = 200    # determinant-scan density (levels are geometric)
IR_GUARD = 5.0              # report a level only if sqrt(eps3) >= IR_GUARD * x_min


def angular_log(a, y, x):
    """Closed-form angular integral int_{-1}^1 dz / (a - y^2 - x^2 - x y z).

    Requires a < 0 and y, x >= 0 so the denominator never vanishes.  Equal
    to (1/xy) log[(a - y^2 - x^2 + xy) / (a - y^2 - x^2 - xy)], evaluated
    in the arctanh form; the x y -> 0 limit is 2 / (a - y^2 - x^2).
    """
    if not np.all(np.asarray(a) < 0.0):
        raise UnsupportedRegionError(f"angular integral needs a < 0, got a = {a}")
    if np.any(np.asarray(y) < 0.0) or np.any(np.asarray(x) < 0.0):
        raise InvalidArgumentError("momenta must be non-negative")
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    d = a - y * y - x * x
    u = y * x
    scalar = np.isscalar(u) or u.ndim == 0
    u = np.atleast_1d(u)
    d = np.atleast_1d(d) * np.ones_like(u)
    small = u == 0.0
    safe = np.where(small, 1.0, u)
    out = np.where(small, 2.0 / d, 2.0 * np.arctanh(u / d) / safe)
    return float(out[0]) if scalar else out


def stm_kernel(y, x, e3: float, cfg: ChannelConfig):
    """Subtracted s-wave STM kernel value at momenta (y, x) and energy e3 < 0."""
    if not e3 < 0.0:
        raise UnsupportedRegionError(f"bound-state kernel needs E3 < 0, got {e3}")
    delta = angular_log(e3, y, x) - angular_log(SUBTRACTION_ENERGY, y, x)
    return 4.0 * np.pi * tau(e3 - 0.75 * np.asarray(y) ** 2, cfg) * np.asarray(x) ** 2 * delta


@dataclass
class BoundStateProblem:
    """One bound-state computation: physics, grid and determinant-search window.

    The window (e_lo, e_hi) lies strictly below the two-body cut,
    e_hi <= -eps2; above the cut the poles migrate to the second sheet
    and are out of scope.
    """

    cfg: ChannelConfig
    grid: MomentumGrid
    window: tuple[float, float] | None = None
    det_tol: float = BISECT_RELTOL

    def __post_init__(self):
        if self.window is None:
            self.window = default_window(self.cfg)
        e_lo, e_hi = self.window
        if not (e_lo < e_hi < 0.0):
            raise InvalidArgumentError(f"window must satisfy e_lo < e_hi < 0, got {self.window}")
        if e_hi > -self.cfg.eps2:
            raise InvalidArgumentError(
                f"window must stay below the two-body cut: e_hi = {e_hi} > {-self.cfg.eps2}")

    @cached_property
    def _log_sub(self) -> np.ndarray:
        # angular matrix at the regulator energy; reused by every det_at call
        return _backend.angular_log_matrix(SUBTRACTION_ENERGY, self.grid.nodes, self.grid.nodes)

    def nystrom_matrix(self, e3: float) -> np.ndarray:
        """I - W K(E3) using the fused backend assembly."""
        if not e3 < 0.0:
            raise UnsupportedRegionError(f"bound-state kernel needs E3 < 0, got {e3}")
        x = self.grid.nodes
        kernel = _backend.stm_kernel_matrix(e3, self.cfg.eps2, x, x, self._log_sub)
        if not np.all(np.isfinite(kernel)):
            bad = np.argwhere(~np.isfinite(kernel))[0]
            raise AssemblyError(
                f"STM kernel non-finite at (i={bad[0]}, j={bad[1]}), E3={e3}",
                row=int(bad[0]), col=int(bad[1]), energy=e3)
        return np.eye(self.grid.n) - self.grid.weights[None, :] * kernel


@dataclass
class SpectatorTable:
    """Bound-state energy eps3 > 0 with the spectator function on the grid."""

    energy: float
    grid: MomentumGrid
    values: np.ndarray
    pivot: int


@dataclass
class EfimovSpectrum:
    """Levels eps3^(N) for one eps2, deepest first, with consecutive ratios."""

    eps2: float
    levels: list[float]
    grid_n: int
    map_scale: float
    diagnostic: str | None = None

    @property
    def ratios(self) -> list[float]:
        return [self.levels[i] / self.levels[i + 1] for i in range(len(self.levels) - 1)]


def default_window(cfg: ChannelConfig) -> tuple[float, float]:
    """Search window below the two-body cut covering every possible level."""
    e_hi = -max(cfg.eps2 * (1.0 + 1e-8), 1e-12)
    e_lo = -max(2.0, 20.0 * cfg.eps2)
    return (e_lo, e_hi)


def det_at(e3: float, problem: BoundStateProblem) -> tuple[int, float]:
    """Sign and log-magnitude of det M(E3); roots mark three-body bound states."""
    return logdet_sign(problem.nystrom_matrix(e3))


def _bisect_root(problem, mag_lo, mag_hi, sign_lo):
    """Refine a sign-change bracket in |E3| (mag_lo < mag_hi) geometrically."""
    a, b = mag_lo, mag_hi
    for _ in range(200):
        mid = np.sqrt(a * b)
        s, _ = det_at(-mid, problem)
        if s == sign_lo:
            a = mid
        else:
            b = mid
        if (b - a) < problem.det_tol * mid:
            break
    return float(np.sqrt(a * b))


def find_levels(problem: BoundStateProblem, max_levels: int = 8,
                per_decade: int = DEFAULT_PER_DECADE, threads: int = 1,
                ir_guard: float = IR_GUARD) -> EfimovSpectrum:
    """Scan the window for determinant sign changes and bisect each bracket.

    The scan is logarithmic in |E3| (levels are geometrically spaced) and
    runs deepest-first; a root is accepted only on a sign change, never on
    a magnitude dip.  Levels whose binding momentum sqrt(eps3) falls below
    ir_guard times the smallest grid node are unresolved by the quadrature
    and are dropped with a diagnostic.  An empty result is not an error:
    windows above the last level legitimately contain no states.
    """
    if max_levels < 1:
        raise InvalidArgumentError(f"max_levels must be >= 1, got {max_levels}")
    e_lo, e_hi = problem.window
    lo_mag, hi_mag = -e_lo, -e_hi
    n_scan = max(int(np.log10(lo_mag / hi_mag) * per_decade) + 1, 2)
    mags = np.logspace(np.log10(lo_mag), np.log10(hi_mag), n_scan)

    levels: list[float] = []
    dropped = 0
    x_min = problem.grid.nodes[0]
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        chunk = max(64, 16 * threads)
        prev_sign = prev_mag = None
        for start in range(0, n_scan, chunk):
            if len(levels) >= max_levels:
                break
            batch = mags[start:start + chunk]
            if pool is not None:
                batch_signs = list(pool.map(lambda m: det_at(-m, problem)[0], batch))
            else:
                batch_signs = [det_at(-m, problem)[0] for m in batch]
            for mag, sign in zip(batch, batch_signs):
                if (prev_sign is not None and sign != prev_sign
                        and sign != 0 and prev_sign != 0):
                    root = _bisect_root(problem, mag, prev_mag, sign)
                    if np.sqrt(root) >= ir_guard * x_min:
                        levels.append(root)
                    else:
                        dropped += 1
                    if len(levels) >= max_levels:
                        break
                prev_sign, prev_mag = sign, mag
    finally:
        if pool is not None:
            pool.shutdown()
    diagnostic = None
    if not levels:
        diagnostic = "no determinant sign change in window"
    if dropped:
        diagnostic = (diagnostic + "; " if diagnostic else "") + (
            f"{dropped} level(s) below the grid infrared resolution dropped")
        logger.info("find_levels(eps2=%g): %s", problem.cfg.eps2, diagnostic)
    return EfimovSpectrum(eps2=problem.cfg.eps2, levels=levels, grid_n=problem.grid.n,
                          map_scale=problem.grid.map_scale, diagnostic=diagnostic)


def spectator(e3: float, problem: BoundStateProblem, pivot: int | None = None,
              residual_tol: float = 1e-8) -> SpectatorTable:
    """Extract the spectator function at a certified level energy e3.

    Pins f = 1 at the pivot node (default: the node nearest the binding
    momentum sqrt(eps3), where f is large and the elimination is well
    conditioned) and solves the reduced (n-1)-dimensional system.  If the
    reduced matrix is singular the next-nearest pivot is tried.
    """
    matrix = problem.nystrom_matrix(e3)
    eps3 = -e3
    x = problem.grid.nodes
    n = problem.grid.n
    if pivot is not None:
        candidates = [pivot]
    else:
        candidates = list(np.argsort(np.abs(x - np.sqrt(eps3))))
    for piv in candidates:
        idx = np.arange(n) != piv
        reduced = matrix[np.ix_(idx, idx)]
        column = matrix[idx, piv]
        try:
            fbar = np.linalg.solve(reduced, -column)
        except np.linalg.LinAlgError:
            continue
        values = np.empty(n)
        values[piv] = 1.0
        values[idx] = fbar
        residual = np.max(np.abs(matrix @ values)) / np.max(np.abs(values))
        if residual < residual_tol:
            return SpectatorTable(energy=eps3, grid=problem.grid, values=values, pivot=int(piv))
    raise ExtractionError(
        f"spectator extraction failed at E3 = {e3}: no pivot reached "
        f"residual < {residual_tol} (is the energy a certified root?)")
