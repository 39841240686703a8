"""Momentum-space solver for three identical bosons with zero-range forces.

Renormalized two-body amplitude, subtracted STM integral equations for the
Efimov bound-state tower and for elastic atom-dimer scattering, bound-state
wave functions, and the universal scaling outputs, plus a batch CLI.  All
quantities are dimensionless in units of the three-body subtraction scale.
"""

__version__ = "0.1.0"

from ._backend import backend_name
from .bound_state import (
    BoundStateProblem,
    EfimovSpectrum,
    SpectatorTable,
    angular_log,
    det_at,
    find_levels,
    spectator,
    stm_kernel,
)
from .quadrature import MomentumGrid, gauss_legendre, make_grid, map_to_halfline
from .scattering import ElasticChannel, ScatteringSolution, cross_section, driver, solve
from .twobody import ChannelConfig, FeshbachParams, feshbach_a, tau, tau_inverse, tau_pole_residue
from .universality import ScalingPoint, SolverSettings, scaling_curve, threshold_locate
from .wavefunction import WaveFunction

__all__ = [
    "BoundStateProblem",
    "ChannelConfig",
    "EfimovSpectrum",
    "ElasticChannel",
    "FeshbachParams",
    "MomentumGrid",
    "ScalingPoint",
    "ScatteringSolution",
    "SolverSettings",
    "SpectatorTable",
    "WaveFunction",
    "angular_log",
    "backend_name",
    "cross_section",
    "det_at",
    "driver",
    "feshbach_a",
    "find_levels",
    "gauss_legendre",
    "make_grid",
    "map_to_halfline",
    "scaling_curve",
    "solve",
    "spectator",
    "stm_kernel",
    "tau",
    "tau_inverse",
    "tau_pole_residue",
    "threshold_locate",
]
