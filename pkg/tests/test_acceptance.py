"""Acceptance suite: one test per release criterion, one PASS line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines as they
complete.  Criteria 2 and 5 run full independent solves and dominate the
wall time (a few minutes total).
"""

import json

import numpy as np
import pytest

from stm3 import (
    BoundStateProblem,
    ChannelConfig,
    ElasticChannel,
    det_at,
    find_levels,
    make_grid,
    spectator,
    tau_inverse,
)
from stm3.cli import run
from stm3.errors import BornDivergenceWarning
from stm3.integral_eq import born_series, hs_norm, solve_second_kind
from stm3.scattering import onshell_iepsilon_extrapolated, solve
from stm3.universality import SolverSettings, threshold_locate

from conftest import EFIMOV_RATIO, GOLDEN_GROUND


def report(number, description):
    print(f"\nACCEPTANCE {number}: PASS - {description}")


def test_criterion_1_efimov_ratio(unitarity_spectrum):
    ratios = unitarity_spectrum.ratios
    excited = abs(ratios[1] - EFIMOV_RATIO) / EFIMOV_RATIO
    ground = abs(ratios[0] - EFIMOV_RATIO) / EFIMOV_RATIO
    assert excited < 0.05
    assert ground < 0.20
    report(1, f"Efimov ratios at unitarity, n=300: excited {ratios[1]:.2f} "
              f"({excited:.2%} from {EFIMOV_RATIO:.1f}), ground {ratios[0]:.2f} "
              f"({ground:.2%})")


def test_criterion_2_threshold():
    value = threshold_locate(1)
    assert value == pytest.approx(0.145, abs=0.01)
    # the ground-state pair satisfies the universal condition less well
    ground_value = threshold_locate(0, SolverSettings(grid_n=200),
                                    bracket=(3e-4, 3e-2))
    assert abs(ground_value - 0.145) > abs(value - 0.145)
    report(2, f"threshold eps2/eps3^(1) = {value:.4f} (target 0.145 +- 0.01); "
              f"ground-state pair gives {ground_value:.4f}, further from 0.145")


def test_criterion_3_tau_pole_exactness():
    for eps2 in (1e-4, 1.0, 1e4):
        assert tau_inverse(-eps2, ChannelConfig(eps2=eps2)) == 0.0
    report(3, "tau_inverse(-eps2) = 0 to machine precision for eps2 in "
              "{1e-4, 1, 1e4}")


def test_criterion_4_subtraction_identity():
    for eps2 in (1.5, 2.0, 10.0):
        problem = BoundStateProblem(cfg=ChannelConfig(eps2=eps2), grid=make_grid(200))
        assert det_at(-1.0, problem) == (1, 0.0)
    report(4, "det(M(-1)) is exactly the identity determinant (+1, 0) for "
              "eps2 in {1.5, 2, 10}")


def test_criterion_5_dense_grid_oracle(unitarity_spectrum):
    oracle_problem = BoundStateProblem(cfg=ChannelConfig(0.0),
                                       grid=make_grid(600, map_scale=2.0),
                                       window=(-2.0, -1e-4))
    oracle = find_levels(oracle_problem, max_levels=1).levels[0]
    main = unitarity_spectrum.levels[0]
    assert oracle == pytest.approx(GOLDEN_GROUND, rel=1e-6)
    assert main == pytest.approx(oracle, rel=1e-3)
    report(5, f"ground level {main:.9e} matches the n=600/map_scale=2 oracle "
              f"{oracle:.9e} to {abs(main - oracle) / oracle:.1e} (tol 1e-3)")


def test_criterion_6_linear_solver_oracles():
    grid = make_grid(96)

    def kernel(y, x, e):
        return np.exp(-y - x)

    def driver(y):
        return np.exp(-y)

    norm = hs_norm(kernel, grid)
    lam = 0.5 / norm
    direct = solve_second_kind(kernel, grid, driver, lam=lam)
    u = np.exp(-grid.nodes)
    closed = driver(grid.nodes) + lam * u * grid.integrate(u * driver(grid.nodes)) \
        / (1.0 - lam * grid.integrate(u * u))
    born = born_series(kernel, grid, driver, lam=lam, m=60)
    closed_err = np.max(np.abs(closed - direct)) / np.max(np.abs(direct))
    born_err = np.max(np.abs(born - direct)) / np.max(np.abs(direct))
    assert closed_err < 1e-8
    assert born_err < 1e-8
    with pytest.warns(BornDivergenceWarning):
        born_series(kernel, grid, driver, lam=1.5 / norm, m=30)
    report(6, f"rank-1 closed form ({closed_err:.1e}) and Born m=60 "
              f"({born_err:.1e}) match the direct solve; divergence at "
              f"|lam| ||K|| = 1.5 reported")


def test_criterion_7_null_vector_cross_check(unitarity_problem, unitarity_spectrum):
    worst = 0.0
    for level in unitarity_spectrum.levels:
        table = spectator(-level, unitarity_problem)
        matrix = unitarity_problem.nystrom_matrix(-level)
        _, _, vh = np.linalg.svd(matrix)
        null = vh[-1] / vh[-1][table.pivot]
        worst = max(worst, float(np.max(np.abs(null - table.values))))
    assert worst < 1e-8
    report(7, f"elimination vs SVD null vector: max deviation {worst:.1e} "
              f"over {len(unitarity_spectrum.levels)} levels (tol 1e-8)")


def test_criterion_8_scattering_consistency():
    grid = make_grid(300)
    # (a) pole subtraction against the i-epsilon extrapolation
    pinned = ElasticChannel(cfg=ChannelConfig(1.0), k=0.3)
    subtracted = solve(pinned, grid).on_shell
    extrapolated = onshell_iepsilon_extrapolated(pinned, make_grid(1500))
    ieps_err = abs(extrapolated - subtracted) / abs(subtracted)
    assert ieps_err < 1e-4
    # (b) optical-theorem combination constant in k
    kmax = np.sqrt(4.0 / 3.0)
    ratios = []
    for fraction in (0.1, 0.2, 0.3, 0.4, 0.5):
        channel = ElasticChannel(cfg=ChannelConfig(1.0), k=fraction * kmax)
        sol = solve(channel, grid)
        ratios.append((1.0 / sol.on_shell).imag / (-channel.k))
    spread = (max(ratios) - min(ratios)) / abs(np.mean(ratios))
    assert spread < 0.02
    # (c) the low-energy amplitude settles to a constant
    cfg = ChannelConfig(0.25)
    estimates = []
    for fraction in (0.05, 0.01):
        channel = ElasticChannel(cfg=cfg, k=fraction * np.sqrt(cfg.eps2))
        sol = solve(channel, grid)
        estimates.append(1.0 / np.real(1.0 / sol.on_shell))
    drift = abs(estimates[0] - estimates[1]) / abs(estimates[1])
    assert drift < 0.01
    report(8, f"i-eps oracle agreement {ieps_err:.1e} (tol 1e-4); "
              f"Im(1/h)/(-k) spread {spread:.2e} over k (tol 2%); "
              f"k->0 amplitude drift {drift:.2%} (tol 1%)")


def test_criterion_9_grid_convergence():
    spectra = {}
    for n in (200, 400):
        problem = BoundStateProblem(cfg=ChannelConfig(0.0), grid=make_grid(n))
        spectra[n] = find_levels(problem, max_levels=3).levels
    common = min(len(spectra[200]), len(spectra[400]))
    assert common >= 2
    worst = max(abs(a - b) / b for a, b in zip(spectra[200][:common],
                                               spectra[400][:common]))
    assert worst < 1e-4
    report(9, f"levels reported at both n=200 and n=400 agree to {worst:.1e} "
              f"({common} levels, tol 1e-4)")


def test_criterion_10_cli_determinism(tmp_path):
    runs = {
        "spectrum": ["spectrum", "--eps2", "1e-5", "--levels", "2",
                     "--grid-n", "160", "--format", "csv"],
        "scatter": ["scatter", "--eps2", "1.0", "--k", "0.3",
                    "--grid-n", "160", "--format", "csv"],
    }
    for name, argv in runs.items():
        a, b = tmp_path / f"{name}_a.csv", tmp_path / f"{name}_b.csv"
        assert run(argv + ["--output", str(a)]) == 0
        assert run(argv + ["--output", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
    j1, j2 = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["spectrum", "--eps2", "1e-5", "--levels", "1", "--grid-n", "160"]
    assert run(argv + ["--output", str(j1)]) == 0
    assert run(argv + ["--output", str(j2)]) == 0
    docs = []
    for path in (j1, j2):
        with open(path) as handle:
            doc = json.load(handle)
        doc["provenance"].pop("wall_time_s")
        docs.append(doc)
    assert docs[0] == docs[1]
    report(10, "repeated CLI runs byte-identical (CSV) and identical minus "
               "wall time (JSON)")
