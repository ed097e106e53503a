"""Command-line front end.

Five subcommands: disk-solve, coupling-sweep, dispersion, gate-sim,
reproduce-tables.  Output is CSV with #-prefixed metadata lines (or a
JSON mirror via --format json), written to stdout or --out.  Runs are
deterministic: same inputs, byte-identical output, and the metadata is
sufficient to re-run the command.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical
failure, 3 reference-table check failure.
"""

from __future__ import annotations

import argparse
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import json
import math
import sys
from typing import Optional

import numpy as np

from . import __version__
from .chain import (QuadratureError, coupling_kappa, dispersion,
                    fit_loglinear, overlap_integrals)
from .config import ConfigError, SimConfig, load_config
from .core import CONSTANTS
from .dynamics import (GateFailure, RegisterState, StepConvergenceError,
                       extract_phases, logical_populations, run_cz)
from .verify import run_all
from .wgm import (BelowCutoffError, NoSolutionError, radial_residual,
                  solve_disk, solve_mode)

_NUMERICAL_ERRORS = (NoSolutionError, BelowCutoffError, QuadratureError,
                     StepConvergenceError, GateFailure, FloatingPointError)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass
class ResultTable:
    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _write_table(table: ResultTable, stream, fmt: str) -> None:
    if fmt == "csv":
        for key, value in table.metadata.items():
            stream.write(f"# {key}: {value}\n")
        stream.write(",".join(table.columns) + "\n")
        for row in table.rows:
            stream.write(",".join(_fmt(v) for v in row) + "\n")
    else:
        doc = {
            "metadata": {k: (_fmt(v) if isinstance(v, float) else v)
                         for k, v in table.metadata.items()},
            "columns": table.columns,
            "rows": [[(_fmt(v) if isinstance(v, float) else v) for v in row]
                     for row in table.rows],
        }
        json.dump(doc, stream, sort_keys=True, indent=1)
        stream.write("\n")


def _emit(table: ResultTable, args) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            _write_table(table, fh, args.format)
    else:
        _write_table(table, sys.stdout, args.format)


def _map_ordered(fn, items, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _base_metadata(command: str, cfg: SimConfig, args) -> dict:
    return {
        "generator": f"diskchain {__version__}",
        "command": command,
        "config": args.config if args.config else "<embedded defaults>",
        # nothing here draws random numbers; the field is kept so outputs
        # stay comparable if a stochastic stage is ever added
        "seed": "none",
        "wavelength_um": _fmt(cfg.wavelength),
        "refractive_index": _fmt(cfg.disk.refractive_index),
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_disk_solve(cfg: SimConfig, args) -> int:
    k0 = 2.0 * math.pi / cfg.wavelength
    n_c = cfg.disk.refractive_index

    def one(row):
        m, radius = row
        try:
            n_eff, h = solve_disk(radius, m, cfg.wavelength, n_c)
        except (NoSolutionError, BelowCutoffError):
            return [m, radius, None, None, None, "no solution"]
        resid = abs(radial_residual(m, k0, n_eff, radius))
        return [m, radius, n_eff, h, resid, "ok"]

    rows = _map_ordered(one, cfg.solve_rows, args.threads)
    meta = _base_metadata("disk-solve", cfg, args)
    meta["rows"] = len(rows)
    table = ResultTable(
        columns=["m", "R_um", "n_eff", "h_um", "residual", "status"],
        rows=rows, metadata=meta)
    _emit(table, args)
    return 0


def _sweep_rows(cfg: SimConfig, threads: int):
    mode = solve_mode(cfg.disk.radius, cfg.disk.azimuthal_number,
                      cfg.wavelength, cfg.disk.refractive_index)
    omega = 2.0 * math.pi * CONSTANTS.speed_of_light / cfg.wavelength

    def one(lr):
        ints = overlap_integrals(mode, lr * cfg.disk.radius)
        return coupling_kappa(ints, omega), ints

    results = _map_ordered(one, cfg.l_over_r, threads)
    return mode, omega, results


def cmd_coupling_sweep(cfg: SimConfig, args) -> int:
    mode, omega, results = _sweep_rows(cfg, args.threads)
    radius = cfg.disk.radius
    rows = []
    for lr, (res, ints) in zip(cfg.l_over_r, results):
        ratio = abs(res.kappa_ev) / CONSTANTS.zpl_energy
        rows.append([lr, lr * radius, res.kappa, res.kappa_ev,
                     math.log10(ratio) if ratio > 0.0 else None])

    slope, intercept, r2 = fit_loglinear(
        [r[1] for r in rows], [r[2] for r in rows])
    meta = _base_metadata("coupling-sweep", cfg, args)
    meta.update({
        "m": cfg.disk.azimuthal_number,
        "R_um": _fmt(radius),
        "n_eff": _fmt(mode.n_eff),
        "h_um": _fmt(mode.geometry.thickness),
        "fit_slope_per_um": _fmt(slope),
        "fit_intercept": _fmt(intercept),
        "fit_r2": _fmt(r2),
        "quadrature": f"{results[-1][1].n_radial} x {results[-1][1].n_azimuthal}",
    })
    table = ResultTable(
        columns=["l_over_r", "L_um", "kappa_rad_s", "kappa_ev",
                 "log10_kappa_over_e0"],
        rows=rows, metadata=meta)
    _emit(table, args)
    return 0


def cmd_dispersion(cfg: SimConfig, args) -> int:
    mode = solve_mode(cfg.disk.radius, cfg.disk.azimuthal_number,
                      cfg.wavelength, cfg.disk.refractive_index)
    omega = 2.0 * math.pi * CONSTANTS.speed_of_light / cfg.wavelength
    spacing = cfg.chain.spacing
    ints = overlap_integrals(mode, spacing)
    res = coupling_kappa(ints, omega)

    kl = np.linspace(-math.pi, math.pi, 41)
    band = dispersion(omega, ints, kl)
    rows = [[float(x), float(w)] for x, w in zip(kl, band)]

    meta = _base_metadata("dispersion", cfg, args)
    meta.update({
        "m": cfg.disk.azimuthal_number,
        "R_um": _fmt(cfg.disk.radius),
        "L_um": _fmt(spacing),
        "omega_rad_s": _fmt(omega),
        "kappa_rad_s": _fmt(res.kappa),
        "kappa_ev": _fmt(res.kappa_ev),
        "band_width_rad_s": _fmt(res.band_width),
    })
    table = ResultTable(columns=["KL_rad", "omega_rad_s"], rows=rows,
                        metadata=meta)
    _emit(table, args)
    return 0


def cmd_gate_sim(cfg: SimConfig, args) -> int:
    params = cfg.gate
    basis_runs = [run_cz(RegisterState.basis(i), params) for i in range(4)]
    sup = run_cz(RegisterState.logical_superposition(), params)

    traj = sup.trajectory
    report = extract_phases(traj)
    pops = logical_populations(traj.amplitudes)
    aux = 1.0 - pops.sum(axis=1)
    scale = params.omega_a0

    rows = []
    for n, t in enumerate(traj.times):
        row = [t * scale, float(pops[n, 0]), float(pops[n, 1]),
               float(pops[n, 2]), float(pops[n, 3]), float(aux[n])]
        for i in range(4):
            row.append(float(report.phases[n, i])
                       if report.valid[n, i] else None)
        rows.append(row)

    meta = _base_metadata("gate-sim", cfg, args)
    meta.update({
        "g1_rad_s": _fmt(params.g1),
        "g2_rad_s": _fmt(params.g2),
        "delta_max_rad_s": _fmt(params.delta_max),
        "guard": params.guard,
        "duration_s": _fmt(sup.schedule.duration),
        "time_unit_s": _fmt(1.0 / scale),
    })
    targets = (math.pi, math.pi, math.pi, 0.0)
    lines = []
    for i, run in enumerate(basis_runs):
        phase = run.phase_report.final[i]
        dev = abs(math.remainder(phase - targets[i], 2.0 * math.pi))
        ret = float(np.abs(run.final.amplitudes[i]) ** 2)
        meta[f"truth_state_{i}"] = (
            f"phase={phase:.6f} rad, dev={dev:.2e} rad, "
            f"return={ret:.6f}, leakage={run.leakage:.3e}")
        lines.append((i, phase, dev, ret, run.leakage))

    table = ResultTable(
        columns=["t", "p00", "p01", "p10", "p11", "p_aux",
                 "phase00", "phase01", "phase10", "phase11"],
        rows=rows, metadata=meta)
    _emit(table, args)

    if args.out:
        print("CZ truth table (target diag(-1,-1,-1,+1)):")
        print("state  phase/rad   deviation   return      leakage")
        for i, phase, dev, ret, leak in lines:
            label = ("|g1,g2>", "|g1,+2>", "|+1,g2>", "|+1,+2>")[i]
            print(f"{label}  {phase:+.5f}  {dev:.3e}  {ret:.6f}  {leak:.3e}")
        print(f"superposition leakage {sup.leakage:.3e}, "
              f"trajectory written to {args.out}")
    return 0


def cmd_reproduce_tables(cfg: SimConfig, args) -> int:
    results = run_all(cfg, args.tolerance)
    failures = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        failures += 0 if r.passed else 1
        print(f"{status}  [{r.criterion}] {r.name}: measured {r.measured}, "
              f"expected {r.expected}"
              + (f"  ({r.detail})" if r.detail else ""))
    print(f"{len(results) - failures}/{len(results)} checks passed")

    if args.out:
        rows = [[r.criterion, r.name, "pass" if r.passed else "fail",
                 str(r.measured), str(r.expected), r.detail]
                for r in results]
        meta = _base_metadata("reproduce-tables", cfg, args)
        meta["tolerance"] = (_fmt(args.tolerance)
                             if args.tolerance is not None else "<defaults>")
        table = ResultTable(
            columns=["criterion", "name", "status", "measured", "expected",
                     "detail"],
            rows=rows, metadata=meta)
        _emit(table, args)
    return 3 if failures else 0


# ---------------------------------------------------------------------------


_COMMANDS = {
    "disk-solve": (cmd_disk_solve, "solve the resonant disk thickness table"),
    "coupling-sweep": (cmd_coupling_sweep,
                       "inter-disk hopping vs spacing for one disk design"),
    "dispersion": (cmd_dispersion, "chain band Omega(KL) at the configured "
                                   "spacing"),
    "gate-sim": (cmd_gate_sim, "run the controlled-Z sequence and export the "
                               "trajectory"),
    "reproduce-tables": (cmd_reproduce_tables,
                         "check solver output against the bundled reference "
                         "values"),
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="diskchain",
                     description="diamond microdisk chain simulator")
    sub = parser.add_subparsers(dest="command", metavar="command")
    for name, (_, help_text) in _COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", default=None, metavar="PATH",
                        help="INI configuration (defaults are embedded)")
        sp.add_argument("--out", default=None, metavar="PATH",
                        help="write the result table here instead of stdout")
        sp.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="table format (default csv)")
        sp.add_argument("--tolerance", type=float, default=None,
                        help="override the relative tolerance of the "
                             "reference-table comparisons")
        sp.add_argument("--threads", type=int, default=1,
                        help="worker threads for row-parallel commands")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            parser.print_usage(sys.stderr)
            print("diskchain: a command is required", file=sys.stderr)
            return 1
        if args.threads < 1:
            raise _UsageError("--threads must be >= 1")
        cfg = load_config(args.config)
        handler = _COMMANDS[args.command][0]
        return handler(cfg, args)
    except _UsageError as exc:
        print(f"diskchain: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"diskchain: configuration error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"diskchain: {exc}", file=sys.stderr)
        return 1
    except _NUMERICAL_ERRORS as exc:
        print(f"diskchain: numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
