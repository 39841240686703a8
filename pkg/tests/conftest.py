import numpy as np
import pytest

from stm3 import BoundStateProblem, ChannelConfig, find_levels, make_grid, spectator

# consecutive-level ratio e^{2 pi / s} for three identical bosons (s = 1.006)
EFIMOV_RATIO = float(np.exp(2.0 * np.pi / 1.006))

# ground-state energy at unitarity from the independent dense-grid solve
# (n = 600, map_scale = 2.0), pinned before the main solver was trusted
GOLDEN_GROUND = 9.271684715625570e-03


@pytest.fixture(scope="session")
def unitarity_problem():
    return BoundStateProblem(cfg=ChannelConfig(0.0), grid=make_grid(300))


@pytest.fixture(scope="session")
def unitarity_spectrum(unitarity_problem):
    return find_levels(unitarity_problem, max_levels=3)


@pytest.fixture(scope="session")
def unitarity_spectators(unitarity_problem, unitarity_spectrum):
    return {i: spectator(-level, unitarity_problem)
            for i, level in enumerate(unitarity_spectrum.levels)}
