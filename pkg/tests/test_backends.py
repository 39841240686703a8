"""The compiled kernel core and the numpy fallback must be interchangeable."""

import numpy as np
import pytest

import stm3._backend as backend
from stm3 import _kernels_py
from stm3.quadrature import make_grid

try:
    from stm3 import _kernels_cy
except ImportError:
    _kernels_cy = None

needs_compiled = pytest.mark.skipif(_kernels_cy is None,
                                    reason="compiled extension not built")


def test_some_backend_is_active():
    assert backend.backend_name() in ("compiled", "python")


@needs_compiled
@pytest.mark.parametrize("a", [-1.0, -0.05, -3.7])
def test_angular_log_matrix_agreement(a):
    grid = make_grid(80, 1.3)
    compiled = _kernels_cy.angular_log_matrix(a, grid.nodes, grid.nodes)
    fallback = _kernels_py.angular_log_matrix(a, grid.nodes, grid.nodes)
    assert np.allclose(compiled, fallback, rtol=1e-13, atol=0.0)


@needs_compiled
@pytest.mark.parametrize("e3,eps2", [(-0.05, 0.0), (-0.5, 0.2), (-1.0, 2.0)])
def test_stm_kernel_matrix_agreement(e3, eps2):
    # each backend pairs the kernel with its own subtraction matrix; the
    # regulator-point cancellation is exact only within one backend, and
    # rounding differences get amplified where the two angular terms cancel
    grid = make_grid(80)
    x = grid.nodes
    results = []
    for impl in (_kernels_cy, _kernels_py):
        log_sub = impl.angular_log_matrix(-1.0, x, x)
        results.append(impl.stm_kernel_matrix(e3, eps2, x, x, log_sub))
    compiled, fallback = results
    if e3 == -1.0:
        assert np.all(compiled == 0.0) and np.all(fallback == 0.0)
    else:
        scale = np.max(np.abs(fallback))
        assert np.allclose(compiled, fallback, rtol=1e-9, atol=1e-13 * scale)


def test_fallback_backend_solves_the_tower(monkeypatch):
    # force the numpy fallback through the whole bound-state pipeline
    from stm3 import BoundStateProblem, ChannelConfig, find_levels

    problem = BoundStateProblem(cfg=ChannelConfig(0.0), grid=make_grid(120))
    reference = find_levels(problem, max_levels=2).levels
    monkeypatch.setattr(backend, "_impl", _kernels_py)
    forced = BoundStateProblem(cfg=ChannelConfig(0.0), grid=make_grid(120))
    fallback_levels = find_levels(forced, max_levels=2).levels
    assert len(fallback_levels) == len(reference) == 2
    for a, b in zip(fallback_levels, reference):
        assert a == pytest.approx(b, rel=1e-9)
