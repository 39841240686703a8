"""Universal scaling outputs: level-ratio curves and the threshold locator.

Once the two- and three-body scales are fixed, consecutive levels collapse
onto a single curve: plotting y = sqrt(eps3^(N+1)/eps3^(N)) against
x = sqrt(eps2/eps3^(N)) traces the same function for every N in the
universality window (the ground state deviates most).  The curve starts
at (0, e^{-pi/s}) at unitarity and terminates on the diagonal at
x = sqrt(0.145), where level N+1 is swallowed by the two-body cut.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .bound_state import BoundStateProblem, EfimovSpectrum, find_levels
from .errors import InvalidArgumentError, ThresholdError
from .quadrature import make_grid
from .twobody import ChannelConfig

logger = logging.getLogger(__name__)

CUT_MERGE_RELTOL = 1e-8  # a level within this of the cut counts as absorbed


@dataclass(frozen=True)
class SolverSettings:
    """Bound-state solver knobs shared by the scaling runs."""

    grid_n: int = 300
    map_scale: float = 1.0
    per_decade: int = 200
    threads: int = 1

    def solve(self, eps2: float, max_levels: int) -> EfimovSpectrum:
        cfg = ChannelConfig(eps2=eps2)
        problem = BoundStateProblem(cfg=cfg, grid=make_grid(self.grid_n, self.map_scale))
        return find_levels(problem, max_levels=max_levels,
                           per_decade=self.per_decade, threads=self.threads)


@dataclass(frozen=True)
class ScalingPoint:
    """One point of the universal curve for level pair (N, N+1)."""

    eps2: float
    level: int
    e_n: float
    e_n1: float

    @property
    def x(self) -> float:
        return float(np.sqrt(self.eps2 / self.e_n))

    @property
    def y(self) -> float:
        return float(np.sqrt(self.e_n1 / self.e_n))


def scaling_curve(eps2_values, level: int, settings: SolverSettings | None = None
                  ) -> list[ScalingPoint]:
    """Universal curve samples for level pair (N, N+1) over the given eps2 list.

    Points where either level is missing are skipped with a log diagnostic;
    the result is sorted by x.
    """
    if level < 0:
        raise InvalidArgumentError("level index must be >= 0")
    settings = settings or SolverSettings()
    points = []
    for eps2 in eps2_values:
        if eps2 < 0.0:
            raise InvalidArgumentError(f"eps2 must be >= 0, got {eps2}")
        spectrum = settings.solve(eps2, max_levels=level + 2)
        if len(spectrum.levels) < level + 2:
            logger.info("scaling_curve: eps2=%g has %d level(s), need %d; skipped",
                        eps2, len(spectrum.levels), level + 2)
            continue
        points.append(ScalingPoint(eps2=eps2, level=level,
                                   e_n=spectrum.levels[level],
                                   e_n1=spectrum.levels[level + 1]))
    return sorted(points, key=lambda p: p.x)


def threshold_locate(level: int, settings: SolverSettings | None = None,
                     bracket: tuple[float, float] = (1e-6, 1e-4),
                     reltol: float = 1e-4) -> float:
    """eps2 / eps3^(N) at the point where level N+1 merges with the cut.

    Bisects on eps2 between a value where level N+1 exists and one where
    it has been absorbed (a level within 1e-8 relative of the cut counts
    as absorbed; detection by loss of the determinant sign change is less
    robust near threshold).  The starting bracket is expanded geometrically
    when it does not straddle the transition.
    """
    if level < 0:
        raise InvalidArgumentError("level index must be >= 0")
    settings = settings or SolverSettings()
    trace = []

    def exists(eps2: float) -> tuple[bool, EfimovSpectrum]:
        spectrum = settings.solve(eps2, max_levels=level + 2)
        ok = len(spectrum.levels) >= level + 2 and (
            spectrum.levels[level + 1] > eps2 * (1.0 + CUT_MERGE_RELTOL))
        trace.append((eps2, len(spectrum.levels)))
        return ok, spectrum

    lo, hi = bracket
    ok_lo, _ = exists(lo)
    steps = 0
    while not ok_lo:
        lo /= 10.0
        steps += 1
        if steps > 8:
            raise ThresholdError(
                f"level {level + 1} not found down to eps2 = {lo}", trace=trace)
        ok_lo, _ = exists(lo)
    ok_hi, _ = exists(hi)
    steps = 0
    while ok_hi:
        hi *= 10.0
        steps += 1
        if steps > 8:
            raise ThresholdError(
                f"level {level + 1} still present up to eps2 = {hi}", trace=trace)
        ok_hi, _ = exists(hi)

    spectrum_lo = None
    while np.log(hi / lo) > reltol:
        mid = float(np.sqrt(lo * hi))
        ok, spectrum = exists(mid)
        if ok:
            lo, spectrum_lo = mid, spectrum
        else:
            hi = mid
    if spectrum_lo is None:
        _, spectrum_lo = exists(lo)
    return float(lo / spectrum_lo.levels[level])
