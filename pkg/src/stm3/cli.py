"""Batch command-line front end.

Subcommands: spectrum, spectator, wavefunction, scatter, scaling-curve,
threshold, feshbach, selftest.  Every run validates its parameters against
the owning module's preconditions, dispatches the solver pipeline, and
emits CSV or JSON with a provenance block (version, config echo and hash,
grid metadata, wall time).  Identical configurations produce byte-identical
data; the wall-time field lives only in the JSON provenance and is the one
exempt field.  Flags override values from an optional key=value --config
file; there is no environment-variable configuration.

Exit codes: 0 success, 1 validation error (bad flags, unsupported region,
unwritable path), 2 numerical-quality error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from ._backend import backend_name
from .bound_state import BoundStateProblem, find_levels, spectator
from .errors import NumericsError, ValidationError
from .quadrature import make_grid
from .scattering import ElasticChannel, solve
from .twobody import ChannelConfig, FeshbachParams, feshbach_a
from .universality import SolverSettings, scaling_curve, threshold_locate
from .wavefunction import WaveFunction

FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class RunConfig:
    """Resolved parameters of one CLI run plus its provenance identity."""

    command: str
    params: dict
    version: str
    config_hash: str


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _fmt(value) -> str:
    if isinstance(value, float):
        return FLOAT_FMT % value
    return str(value)


def _config_hash(params: dict) -> str:
    canonical = json.dumps(params, sort_keys=True, default=repr)
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def make_run_config(command: str, params: dict) -> RunConfig:
    return RunConfig(command=command, params=params, version=__version__,
                     config_hash=_config_hash(params))


def emit(results: dict, fmt: str, path: str | None, run: RunConfig,
         wall_time: float, columns: list[str] | None = None,
         rows: list | None = None) -> None:
    """Write the run output as JSON (full document) or CSV (tabular part).

    CSV embeds the reproducibility block as leading '# key=value' comment
    lines (no wall time, so repeated runs are byte-identical); JSON carries
    the full provenance object including wall time.
    """
    if fmt == "json":
        doc = {
            "provenance": {
                "version": run.version,
                "command": run.command,
                "config": run.params,
                "config_hash": run.config_hash,
                "backend": backend_name(),
                "wall_time_s": wall_time,
            },
            "results": results,
        }
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        lines = [f"# version={run.version}", f"# command={run.command}",
                 f"# config_hash={run.config_hash}", f"# backend={backend_name()}"]
        for key in sorted(run.params):
            lines.append(f"# {key}={_fmt(run.params[key])}")
        lines.append(",".join(columns or []))
        for row in rows or []:
            lines.append(",".join(_fmt(v) for v in row))
        text = "\n".join(lines) + "\n"
    else:
        raise ValidationError(f"unknown format {fmt!r}")
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        try:
            with open(path, "w") as handle:
                handle.write(text)
        except OSError as exc:
            raise ValidationError(f"cannot write {path}: {exc}") from exc


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path) as handle:
            for line in handle:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ValidationError(f"bad config line (need key=value): {line!r}")
                key, _, val = line.partition("=")
                values[key.strip().replace("-", "_")] = val.strip()
        return values
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path}: {exc}") from exc


def _add_common(parser):
    parser.add_argument("--grid-n", type=int, default=300, help="momentum grid size")
    parser.add_argument("--map-scale", type=float, default=1.0,
                        help="tangent-map scale of the grid")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker hint for the determinant scan")
    parser.add_argument("--output", "-o", default=None, help="output path (default stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="json")
    parser.add_argument("--config", default=None, help="key=value defaults file")
    parser.add_argument("--unit-scale", type=float, default=1.0,
                        help="presentation unit for momenta (energies scale squared)")


def build_parser() -> _Parser:
    parser = _Parser(prog="stm3", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="three-body levels for one eps2")
    p.add_argument("--eps2", type=float, default=0.0)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--per-decade", type=int, default=200)
    p.add_argument("--window-lo", type=float, default=None)
    p.add_argument("--window-hi", type=float, default=None)
    _add_common(p)

    p = sub.add_parser("spectator", help="spectator function of one level")
    p.add_argument("--eps2", type=float, default=0.0)
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--per-decade", type=int, default=200)
    _add_common(p)

    p = sub.add_parser("wavefunction", help="normalized wave function tables")
    p.add_argument("--eps2", type=float, default=0.0)
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--per-decade", type=int, default=200)
    p.add_argument("--q-n", type=int, default=48, help="q samples in the psi table")
    p.add_argument("--p-n", type=int, default=48, help="p samples in the psi table")
    p.add_argument("--angle-n", type=int, default=16, help="cos(theta) samples")
    p.add_argument("--norm-n", type=int, default=128, help="grid size for the norm")
    _add_common(p)

    p = sub.add_parser("scatter", help="elastic atom-dimer amplitude")
    p.add_argument("--eps2", type=float, required=True)
    p.add_argument("--k", type=float, action="append", required=True,
                   help="on-shell momentum (repeatable)")
    p.add_argument("--dump-half-offshell", default=None,
                   help="extra CSV with (y, Re h, Im h); single --k only")
    _add_common(p)

    p = sub.add_parser("scaling-curve", help="universal level-ratio curve")
    p.add_argument("--eps2", type=float, action="append", required=True,
                   help="two-body energy (repeatable)")
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--per-decade", type=int, default=200)
    _add_common(p)

    p = sub.add_parser("threshold", help="eps2/eps3^(N) where level N+1 is absorbed")
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--per-decade", type=int, default=200)
    p.add_argument("--bracket-lo", type=float, default=1e-6)
    p.add_argument("--bracket-hi", type=float, default=1e-4)
    _add_common(p)

    p = sub.add_parser("feshbach", help="scattering length across a resonance")
    p.add_argument("--abg", type=float, required=True)
    p.add_argument("--b0", type=float, required=True)
    p.add_argument("--delta-b", type=float, required=True)
    p.add_argument("--b", type=float, default=None, help="single field value")
    p.add_argument("--b-min", type=float, default=None)
    p.add_argument("--b-max", type=float, default=None)
    p.add_argument("--b-num", type=int, default=51)
    _add_common(p)

    p = sub.add_parser("selftest", help="run the quick closed-form checks")
    _add_common(p)
    return parser


def _apply_config_file(argv, args):
    """Re-parse argv with file values as defaults: flags keep priority."""
    if not getattr(args, "config", None):
        return args
    file_values = _read_config_file(args.config)
    parser = build_parser()
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    casted = {}
    for key, raw in file_values.items():
        action = next((a for a in subparser._actions if a.dest == key), None)
        if action is None:
            raise ValidationError(f"unknown config key {key!r} for {args.command}")
        value = action.type(raw) if action.type else raw
        if isinstance(action, argparse._AppendAction):
            value = [value]
        casted[key] = value
    subparser.set_defaults(**casted)
    return parser.parse_args(argv)


def _params_dict(args, skip=("command", "output", "config")) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _threads(args) -> int:
    # worker-pool hint; results do not depend on it
    return args.threads if args.threads else (os.cpu_count() or 1)


def _settings(args) -> SolverSettings:
    return SolverSettings(grid_n=args.grid_n, map_scale=args.map_scale,
                          per_decade=getattr(args, "per_decade", 200),
                          threads=_threads(args))


def _problem(args) -> BoundStateProblem:
    cfg = ChannelConfig(eps2=args.eps2)
    window = None
    lo, hi = getattr(args, "window_lo", None), getattr(args, "window_hi", None)
    if lo is not None or hi is not None:
        from .bound_state import default_window

        dlo, dhi = default_window(cfg)
        window = (lo if lo is not None else dlo, hi if hi is not None else dhi)
    return BoundStateProblem(cfg=cfg, grid=make_grid(args.grid_n, args.map_scale),
                             window=window)


def _find_level(args):
    problem = _problem(args)
    spectrum = find_levels(problem, max_levels=args.level + 1,
                           per_decade=args.per_decade, threads=_threads(args))
    if len(spectrum.levels) <= args.level:
        raise ValidationError(
            f"level {args.level} not found (got {len(spectrum.levels)} level(s); "
            f"diagnostic: {spectrum.diagnostic})")
    return problem, spectrum


def cmd_spectrum(args, run):
    problem = _problem(args)
    spectrum = find_levels(problem, max_levels=args.levels,
                           per_decade=args.per_decade, threads=_threads(args))
    u2 = args.unit_scale**2
    levels = [lv * u2 for lv in spectrum.levels]
    results = {"eps2": args.eps2 * u2, "levels": levels, "ratios": spectrum.ratios,
               "level_count": len(levels), "diagnostic": spectrum.diagnostic}
    rows = [(i, levels[i], spectrum.ratios[i] if i < len(spectrum.ratios) else "")
            for i in range(len(levels))]
    return results, ["index", "eps3", "ratio_to_next"], rows


def cmd_spectator(args, run):
    problem, spectrum = _find_level(args)
    table = spectator(-spectrum.levels[args.level], problem)
    u = args.unit_scale
    results = {"eps2": args.eps2 * u**2, "level": args.level,
               "eps3": table.energy * u**2, "pivot": table.pivot,
               "y": [v * u for v in table.grid.nodes.tolist()],
               "f": table.values.tolist()}
    rows = list(zip(results["y"], results["f"]))
    return results, ["y", "f"], rows


def cmd_wavefunction(args, run):
    problem, spectrum = _find_level(args)
    table = spectator(-spectrum.levels[args.level], problem)
    wf = WaveFunction(table)
    scale = 10.0 * np.sqrt(table.energy)
    q_grid = make_grid(args.norm_n, scale)
    p_grid = make_grid(args.norm_n, scale)
    wf = wf.normalized(q_grid, p_grid)

    q_tab = make_grid(args.q_n, scale).nodes
    p_tab = make_grid(args.p_n, scale).nodes
    from .quadrature import gauss_legendre

    z_tab, _ = gauss_legendre(args.angle_n)
    psi = wf.psi_swave(q_tab[:, None, None], p_tab[None, :, None],
                       z_tab[None, None, :])
    density = wf.momentum_density(q_tab, p_grid)
    u = args.unit_scale
    psi_rows = [(q * u, p * u, z, psi[i, j, m])
                for i, q in enumerate(q_tab)
                for j, p in enumerate(p_tab)
                for m, z in enumerate(z_tab)]
    density_rows = list(zip((q_tab * u).tolist(), density.tolist()))
    results = {"eps2": args.eps2 * u**2, "level": args.level,
               "eps3": table.energy * u**2,
               "psi_table": {"q": (q_tab * u).tolist(), "p": (p_tab * u).tolist(),
                             "cos_theta": z_tab.tolist(), "psi": psi.tolist()},
               "density_table": {"q": (q_tab * u).tolist(), "n_q": density.tolist()}}
    return results, ["q", "p", "cos_theta", "psi"], psi_rows, density_rows


def cmd_scatter(args, run):
    if args.dump_half_offshell and len(args.k) != 1:
        raise ValidationError("--dump-half-offshell needs exactly one --k")
    cfg = ChannelConfig(eps2=args.eps2)
    rows = []
    last = None
    for k in args.k:
        channel = ElasticChannel(cfg=cfg, k=k)
        sol = solve(channel, make_grid(args.grid_n, args.map_scale))
        u = args.unit_scale
        rows.append((k * u, sol.on_shell.real, sol.on_shell.imag, sol.cross_section))
        last = sol
    if args.dump_half_offshell:
        dump_rows = [(y, hv.real, hv.imag)
                     for y, hv in zip(last.grid.nodes * args.unit_scale, last.h)]
        emit({}, "csv", args.dump_half_offshell, run, 0.0,
             columns=["y", "re_h", "im_h"], rows=dump_rows)
    results = {"eps2": args.eps2 * args.unit_scale**2,
               "channels": [{"k": r[0], "re_h": r[1], "im_h": r[2],
                             "cross_section": r[3]} for r in rows]}
    return results, ["k", "re_h_onshell", "im_h_onshell", "cross_section"], rows


def cmd_scaling_curve(args, run):
    points = scaling_curve(args.eps2, args.level, _settings(args))
    u2 = args.unit_scale**2
    rows = [(p.eps2 * u2, p.e_n * u2, p.e_n1 * u2, p.x, p.y) for p in points]
    results = {"level": args.level,
               "points": [{"eps2": r[0], "level_N_energy": r[1],
                           "level_N1_energy": r[2], "x": r[3], "y": r[4]}
                          for r in rows]}
    return results, ["eps2", "level_N_energy", "level_N1_energy", "x", "y"], rows


def cmd_threshold(args, run):
    value = threshold_locate(args.level, _settings(args),
                             bracket=(args.bracket_lo, args.bracket_hi))
    results = {"level": args.level, "eps2_over_eps3": value}
    return results, ["level", "eps2_over_eps3"], [(args.level, value)]


def cmd_feshbach(args, run):
    params = FeshbachParams(a_bg=args.abg, b0=args.b0, delta_b=args.delta_b)
    if args.b is not None:
        fields = [args.b]
    elif args.b_min is not None and args.b_max is not None:
        fields = np.linspace(args.b_min, args.b_max, args.b_num).tolist()
    else:
        raise ValidationError("feshbach needs --b or both --b-min and --b-max")
    rows = [(b, feshbach_a(b, params)) for b in fields]
    results = {"a_bg": args.abg, "b0": args.b0, "delta_b": args.delta_b,
               "sweep": [{"B": b, "a": a} for b, a in rows]}
    return results, ["B", "a"], rows


def cmd_selftest(args, run):
    """Closed-form checks of the core operations; prints one line each."""
    import math

    from .bound_state import angular_log, det_at
    from .integral_eq import assemble, logdet_sign
    from .quadrature import gauss_legendre
    from .twobody import tau, tau_inverse

    checks = []
    nodes, weights = gauss_legendre(1)
    checks.append(("gauss n=1 midpoint rule",
                   nodes[0] == 0.0 and weights[0] == 2.0))
    nodes, weights = gauss_legendre(2)
    checks.append(("gauss n=2 nodes +-1/sqrt(3)",
                   abs(nodes[1] - 1 / math.sqrt(3)) < 1e-15
                   and abs(weights[0] - 1.0) < 1e-15))
    checks.append(("tau_inverse zero at dimer pole",
                   tau_inverse(-4.0, ChannelConfig(eps2=4.0)) == 0.0))
    checks.append(("tau at unitarity = -1/(2 pi^2)",
                   abs(tau(-1.0, ChannelConfig(eps2=0.0)) + 1 / (2 * math.pi**2)) < 1e-15))
    checks.append(("angular integral spot value ln(3/5)",
                   abs(angular_log(-2.0, 1.0, 1.0) - math.log(3 / 5)) < 1e-12))
    grid = make_grid(32)
    identity = assemble(lambda y, x, e: np.zeros_like(y), grid)
    checks.append(("zero kernel assembles to identity",
                   logdet_sign(identity) == (1, 0.0)))
    problem = BoundStateProblem(cfg=ChannelConfig(eps2=2.0), grid=make_grid(64))
    checks.append(("determinant is exactly 1 at the regulator energy",
                   det_at(-1.0, problem) == (1, 0.0)))
    failed = 0
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failed += 0 if ok else 1
    if failed:
        raise NumericsError(f"{failed} selftest check(s) failed")
    return {"checks": len(checks), "failed": failed}, ["check", "ok"], [
        (name, ok) for name, ok in checks]


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "spectator": cmd_spectator,
    "wavefunction": cmd_wavefunction,
    "scatter": cmd_scatter,
    "scaling-curve": cmd_scaling_curve,
    "threshold": cmd_threshold,
    "feshbach": cmd_feshbach,
    "selftest": cmd_selftest,
}


def run(argv=None) -> int:
    """Parse argv, dispatch, write outputs; returns the process exit code."""
    try:
        args = build_parser().parse_args(argv)
        args = _apply_config_file(argv, args)
    except ValidationError as exc:
        print(f"stm3: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        # argparse: 0 for --help/--version, 1 for usage errors (see _Parser)
        return exc.code if isinstance(exc.code, int) else 1
    run_cfg = make_run_config(args.command, _params_dict(args))
    started = time.perf_counter()
    try:
        out = _COMMANDS[args.command](args, run_cfg)
    except ValidationError as exc:
        print(f"stm3: {exc}", file=sys.stderr)
        return 1
    except NumericsError as exc:
        print(f"stm3: numerical quality: {exc}", file=sys.stderr)
        return 2
    wall = time.perf_counter() - started

    results, columns, rows = out[0], out[1], out[2]
    try:
        if args.command == "wavefunction" and args.format == "csv" and args.output:
            emit(results, "csv", args.output, run_cfg, wall, columns, rows)
            emit(results, "csv", args.output + ".density.csv", run_cfg, wall,
                 ["q", "n_q"], out[3])
        else:
            emit(results, args.format, args.output, run_cfg, wall, columns, rows)
    except ValidationError as exc:
        print(f"stm3: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
