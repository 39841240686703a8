import math

import numpy as np
import pytest

from stm3.errors import (
    DimerPoleError,
    FeshbachPoleError,
    InvalidArgumentError,
    NoBoundStateError,
    UnsupportedRegionError,
)
from stm3.twobody import (
    ChannelConfig,
    FeshbachParams,
    feshbach_a,
    tau,
    tau_inverse,
    tau_pole_residue,
)

TWO_PI_SQ = 2.0 * math.pi**2


@pytest.mark.parametrize("eps2", [1e-4, 1.0, 1e4])
def test_tau_inverse_vanishes_exactly_at_dimer_pole(eps2):
    assert tau_inverse(-eps2, ChannelConfig(eps2=eps2)) == 0.0


def test_tau_inverse_substitution_values():
    assert tau_inverse(-1.0, ChannelConfig(eps2=0.0)) == pytest.approx(-TWO_PI_SQ, rel=1e-15)
    assert tau_inverse(-1.0, ChannelConfig(eps2=4.0)) == pytest.approx(TWO_PI_SQ, rel=1e-15)


def test_tau_values_and_pole_guard():
    assert tau(-1.0, ChannelConfig(eps2=0.0)) == pytest.approx(-1.0 / TWO_PI_SQ, rel=1e-15)
    assert tau(-1.0, ChannelConfig(eps2=4.0)) == pytest.approx(1.0 / TWO_PI_SQ, rel=1e-15)
    with pytest.raises(DimerPoleError) as info:
        tau(-1.0, ChannelConfig(eps2=1.0))
    assert info.value.energy == -1.0
    assert info.value.distance == 0.0


@pytest.mark.parametrize("energy", [0.0, 0.5])
def test_positive_energy_rejected(energy):
    with pytest.raises(UnsupportedRegionError):
        tau_inverse(energy, ChannelConfig(eps2=1.0))


def test_channel_config_validation():
    with pytest.raises(InvalidArgumentError):
        ChannelConfig(eps2=-0.1)
    with pytest.raises(InvalidArgumentError):
        ChannelConfig(eps2=float("nan"))


@pytest.mark.parametrize("eps2,expected", [(1.0, 1.0 / math.pi**2), (4.0, 2.0 / math.pi**2)])
def test_residue_closed_form(eps2, expected):
    assert tau_pole_residue(ChannelConfig(eps2=eps2)) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("eps2", [0.3, 1.0, 7.0])
def test_residue_against_numeric_limit(eps2):
    # (E + eps2) tau(E) for E -> -eps2, Richardson-extrapolated in the offset
    cfg = ChannelConfig(eps2=eps2)
    deltas = np.array([10.0**-k for k in range(4, 9)])
    values = np.array([(-eps2 * d) * tau(-eps2 * (1.0 + d), cfg) / 1.0 for d in deltas])
    # limit of (E + eps2) tau: E + eps2 = -eps2 * d
    coeffs = np.polyfit(deltas, values, deg=2)
    limit = np.polyval(coeffs, 0.0)
    assert limit == pytest.approx(tau_pole_residue(cfg), rel=1e-6)


def test_residue_requires_bound_state():
    with pytest.raises(NoBoundStateError):
        tau_pole_residue(ChannelConfig(eps2=0.0))


@pytest.mark.parametrize("eps2", [1e-3, 1.0, 42.0])
def test_unique_zero_by_bisection(eps2):
    cfg = ChannelConfig(eps2=eps2)
    lo, hi = -1e6 * max(eps2, 1.0), -1e-9 * min(eps2, 1.0)
    flo, fhi = tau_inverse(lo, cfg), tau_inverse(hi, cfg)
    assert flo < 0 < fhi
    for _ in range(200):
        mid = -math.sqrt(lo * hi)
        if tau_inverse(mid, cfg) < 0:
            lo = mid
        else:
            hi = mid
        if (lo - hi) > -1e-12 * abs(mid):
            break
    assert -math.sqrt(lo * hi) == pytest.approx(-eps2, rel=1e-12)


def test_tau_inverse_strictly_decreasing_in_binding():
    cfg = ChannelConfig(eps2=1.0)
    energies = -np.logspace(-3, 3, 40)
    values = [tau_inverse(e, cfg) for e in sorted(energies, reverse=True)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_sign_structure():
    cfg = ChannelConfig(eps2=2.0)
    for energy in (-0.1, -1.0, -1.9):
        assert tau_inverse(energy, cfg) > 0  # |E| < eps2
    for energy in (-2.1, -10.0):
        assert tau_inverse(energy, cfg) < 0


def test_feshbach_trivials():
    flat = FeshbachParams(a_bg=2.0, b0=100.0, delta_b=0.0)
    assert feshbach_a(90.0, flat) == 2.0
    params = FeshbachParams(a_bg=2.0, b0=100.0, delta_b=10.0)
    assert feshbach_a(90.0, params) == pytest.approx(0.0, abs=1e-14)  # B - B0 = -delta_B
    assert feshbach_a(1e12, params) == pytest.approx(2.0, rel=1e-9)


def test_feshbach_pole_and_sign_change():
    params = FeshbachParams(a_bg=1.5, b0=50.0, delta_b=5.0)
    with pytest.raises(FeshbachPoleError):
        feshbach_a(50.0, params)
    for delta in (1e-3, 0.1, 1.0):
        above = feshbach_a(50.0 + delta, params) - params.a_bg
        below = feshbach_a(50.0 - delta, params) - params.a_bg
        assert above * below < 0
