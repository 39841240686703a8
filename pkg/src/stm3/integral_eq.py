"""Generic Nystrom engine for Fredholm equations of the second kind.

A kernel K(y, x; E) sampled on a `MomentumGrid` turns

    phi(y) = f(y) + lambda * int dx K(y, x; E) phi(x)

into the dense linear system (I - lambda W K) phi = f, with the
quadrature weights W folded in column-wise.  The module provides the
matrix assembly, a direct pivoted-LU solve with a condition estimate,
the Born iteration with its |lambda| ||K|| < 1 convergence predicate,
and a signed log-determinant that never overflows.  Grids stay small
(<= ~500 points), so dense direct factorization wins on determinism
and sign tracking.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import (
    AssemblyError,
    BornDivergenceWarning,
    IllConditionedWarning,
    InvalidArgumentError,
    SolveError,
)
from .quadrature import MomentumGrid

COND_WARN = 1e12


@dataclass(frozen=True)
class KernelMatrix:
    """Dense Nystrom matrix delta_ij - w_j K(y_i, x_j; E) with its provenance."""

    entries: np.ndarray
    grid: MomentumGrid
    energy_tag: float | None = None


def _evaluate_kernel(kernel, grid: MomentumGrid, energy):
    """Sample K(y_i, x_j, E) on the node mesh, vectorized when possible."""
    x = grid.nodes
    yy, xx = np.meshgrid(x, x, indexing="ij")
    try:
        values = np.asarray(kernel(yy, xx, energy))
        if values.shape != yy.shape:
            raise ValueError
    except Exception:
        values = np.array([[kernel(yi, xj, energy) for xj in x] for yi in x])
    if not np.all(np.isfinite(values)):
        bad = np.argwhere(~np.isfinite(values))[0]
        raise AssemblyError(
            f"kernel non-finite at node pair (i={bad[0]}, j={bad[1]}), E={energy}",
            row=int(bad[0]), col=int(bad[1]), energy=energy)
    return values


def assemble(kernel, grid: MomentumGrid, energy=None) -> KernelMatrix:
    """Build delta_ij - w_j K(y_i, x_j; E) for a kernel callable (y, x, E)."""
    values = _evaluate_kernel(kernel, grid, energy)
    entries = np.eye(grid.n, dtype=values.dtype) - grid.weights[None, :] * values
    return KernelMatrix(entries=entries, grid=grid, energy_tag=energy)


def logdet_sign(matrix) -> tuple[int, float]:
    """(sign, log|det|) via pivoted LU; exactly singular gives (0, -inf).

    Real matrices only: the determinant search tracks a sign in {-1, 0, +1},
    which has no meaning for a complex determinant.
    """
    entries = matrix.entries if isinstance(matrix, KernelMatrix) else np.asarray(matrix)
    if np.iscomplexobj(entries):
        raise InvalidArgumentError("sign tracking is defined for real matrices only")
    if not np.all(np.isfinite(entries)):
        raise AssemblyError("matrix has non-finite entries")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # LinAlgWarning on exact singularity
        lu, piv = lu_factor(entries, check_finite=False)
    diag = np.diag(lu)
    if np.any(diag == 0.0):
        return 0, -np.inf
    swaps = int(np.sum(piv != np.arange(len(piv))))
    sign = -1 if swaps % 2 else 1
    negatives = int(np.sum(diag < 0.0))
    if negatives % 2:
        sign = -sign
    return sign, float(np.sum(np.log(np.abs(diag))))


def _condition_estimate(entries: np.ndarray, lu) -> float:
    """1-norm condition estimate from the LU factors (LAPACK gecon)."""
    from scipy.linalg import lapack

    anorm = np.linalg.norm(entries, 1)
    gecon = lapack.zgecon if np.iscomplexobj(entries) else lapack.dgecon
    rcond, info = gecon(lu[0], anorm, norm="1")
    if info != 0 or rcond == 0.0:
        return np.inf
    return 1.0 / rcond


def solve_assembled(matrix: KernelMatrix, rhs: np.ndarray) -> np.ndarray:
    """Direct solve of an assembled system; raises SolveError when singular."""
    entries = matrix.entries
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            lu = lu_factor(entries, check_finite=False)
    except Exception:
        raise SolveError("Nystrom matrix is numerically singular", condition=np.inf)
    cond = _condition_estimate(entries, lu)
    if not np.isfinite(cond):
        raise SolveError("Nystrom matrix is numerically singular", condition=cond)
    if cond > COND_WARN:
        warnings.warn(f"solve condition estimate {cond:.2e} exceeds {COND_WARN:.0e}",
                      IllConditionedWarning, stacklevel=2)
    return lu_solve(lu, rhs)


def _driver_values(driver, grid: MomentumGrid):
    try:
        values = np.asarray(driver(grid.nodes))
        if values.shape != grid.nodes.shape:
            raise ValueError
    except Exception:
        values = np.array([driver(y) for y in grid.nodes])
    return values


def solve_second_kind(kernel, grid: MomentumGrid, driver, lam: float = 1.0,
                      energy=None) -> np.ndarray:
    """Solve phi = driver + lam int K phi directly on the grid nodes."""
    values = _evaluate_kernel(kernel, grid, energy)
    rhs = _driver_values(driver, grid)
    dtype = np.result_type(values.dtype, rhs.dtype, type(lam))
    entries = np.eye(grid.n, dtype=dtype) - lam * grid.weights[None, :] * values
    matrix = KernelMatrix(entries=entries, grid=grid, energy_tag=energy)
    return solve_assembled(matrix, rhs.astype(dtype))


def born_series(kernel, grid: MomentumGrid, driver, lam: float, m: int,
                energy=None) -> np.ndarray:
    """Partial sum sum_{n=0}^{m} lam^n phi_n of the iterative solution.

    phi_0 is the driver and each phi_n applies the quadrature kernel to
    phi_{n-1}.  m = 0 returns the driver.  Growth of the last term beyond
    the first signals geometric divergence and raises BornDivergenceWarning.
    """
    if m < 0:
        raise ValueError(f"term count must be >= 0, got {m}")
    values = _evaluate_kernel(kernel, grid, energy)
    applied = values * grid.weights[None, :]
    term = _driver_values(driver, grid).astype(np.result_type(values.dtype, float))
    total = term.copy()
    first_norm = np.max(np.abs(term))
    last_norm = first_norm
    for _ in range(m):
        term = lam * (applied @ term)
        total += term
        last_norm = np.max(np.abs(term))
    if m >= 1 and last_norm > max(first_norm, 1e-300):
        warnings.warn(
            f"Born term norms grew from {first_norm:.3e} to {last_norm:.3e}; "
            "the iteration is diverging", BornDivergenceWarning, stacklevel=2)
    return total


def hs_norm(kernel, grid: MomentumGrid, energy=None) -> float:
    """Quadrature estimate of the Hilbert-Schmidt norm of the kernel."""
    values = _evaluate_kernel(kernel, grid, energy)
    w = grid.weights
    return float(np.sqrt(np.einsum("i,j,ij->", w, w, np.abs(values) ** 2)))


def born_converges(lam: float, norm: float) -> bool:
    """Geometric-series criterion |lambda| ||K|| < 1 for the Born iteration."""
    return abs(lam) * norm < 1.0
