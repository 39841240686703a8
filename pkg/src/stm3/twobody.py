"""Renormalized zero-range two-body sector.

The contact interaction leaves a single parameter, the dimensionless
two-body binding energy eps2 >= 0 (eps2 = 0 is the unitarity limit).
With hbar = 1, unit masses and all energies in units of the three-body
regulator scale squared, the renormalized pair propagator is

    tau(E)^-1 = 2 pi^2 (sqrt(eps2) - sqrt(|E|)),   E < 0,

whose zero at E = -eps2 is the dimer pole.  The Feshbach closed formula
a(B) = a_bg (1 + dB / (B - B0)) is kept here as the experimental knob
that tunes eps2 in the lab.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    DimerPoleError,
    FeshbachPoleError,
    InvalidArgumentError,
    NoBoundStateError,
    UnsupportedRegionError,
)

POLE_GUARD = 1e-12  # smallest |tau^-1| accepted before reciprocation


@dataclass(frozen=True)
class ChannelConfig:
    """Two-body input of a run: dimensionless binding energy eps2 >= 0."""

    eps2: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.eps2) and self.eps2 >= 0.0):
            raise InvalidArgumentError(f"eps2 must be finite and >= 0, got {self.eps2}")


@dataclass(frozen=True)
class FeshbachParams:
    """Background scattering length, resonance field and width parameter."""

    a_bg: float
    b0: float
    delta_b: float

    def __post_init__(self):
        if not (math.isfinite(self.a_bg) and math.isfinite(self.delta_b)):
            raise InvalidArgumentError("a_bg and delta_b must be finite")


def tau_inverse(energy: float, cfg: ChannelConfig) -> float:
    """Inverse pair propagator at E < 0; zero exactly at the dimer pole."""
    if not energy < 0.0:
        raise UnsupportedRegionError(
            f"tau is defined below the two-body breakup only (E < 0), got E = {energy}")
    return 2.0 * math.pi**2 * (math.sqrt(cfg.eps2) - math.sqrt(-energy))


def tau(energy: float, cfg: ChannelConfig) -> float:
    """Pair propagator 1 / tau_inverse with a guard around the dimer pole."""
    inv = tau_inverse(energy, cfg)
    if abs(inv) < POLE_GUARD:
        raise DimerPoleError(
            f"tau evaluated within {POLE_GUARD} of its pole: E = {energy}, "
            f"distance to -eps2 is {energy + cfg.eps2}",
            energy=energy, distance=energy + cfg.eps2)
    return 1.0 / inv


def tau_pole_residue(cfg: ChannelConfig) -> float:
    """Residue of tau at E = -eps2, i.e. lim (E + eps2) tau(E) = sqrt(eps2)/pi^2."""
    if cfg.eps2 == 0.0:
        raise NoBoundStateError("no dimer pole at unitarity (eps2 = 0)")
    return math.sqrt(cfg.eps2) / math.pi**2


def feshbach_a(b_field: float, params: FeshbachParams) -> float:
    """Magnetic-field dependence of the scattering length near a resonance."""
    if b_field == params.b0:
        raise FeshbachPoleError(f"scattering length diverges at B = B0 = {params.b0}")
    return params.a_bg * (1.0 + params.delta_b / (b_field - params.b0))
