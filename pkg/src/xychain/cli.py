"""Command-line entry point and CSV/JSON emission.

Each subcommand drives one experiment and writes a CSV (17 significant
digits, LF endings) plus a JSON sidecar echoing the full configuration,
so any output file can be regenerated from its sidecar alone.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, compressed, experiments
from .experiments import SweepTable
from .model import ModelParams, dispersion
from .verification import run_verification

__all__ = ["main", "write_csv", "read_csv", "write_sidecar"]


def _format_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(table: SweepTable, path: str) -> None:
    """Write a sweep table: header row, one row per point, LF endings."""
    if not table.rows:
        raise ValueError("refusing to write an empty table")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(table.columns) + "\n")
        for row in table.rows:
            fh.write(",".join(_format_cell(v) for v in row) + "\n")


def read_csv(path: str) -> SweepTable:
    """Parse a CSV written by write_csv (floats where possible)."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    columns = tuple(lines[0].split(","))
    rows = []
    for ln in lines[1:]:
        row = []
        for cell in ln.split(","):
            try:
                row.append(int(cell))
            except ValueError:
                try:
                    row.append(float(cell))
                except ValueError:
                    row.append(cell)
        rows.append(tuple(row))
    return SweepTable(columns=columns, rows=rows)


def write_sidecar(path: str, command: str, config: dict, wall_time_s: float) -> None:
    """JSON sidecar with everything needed to re-run the job."""
    meta = {
        "command": command,
        "config": config,
        "version": __version__,
        "wall_time_s": wall_time_s,
    }
    with open(path + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _out_path(args, default_name: str) -> str:
    if args.out:
        return args.out
    outdir = os.environ.get("XYCHAIN_OUTDIR", ".")
    os.makedirs(outdir, exist_ok=True)
    return os.path.join(outdir, default_name)


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip() != ""]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip() != ""]


def _grid(spec: str) -> list[float]:
    """Parse a grid spec: either 'lo:hi:count' or a comma list."""
    if ":" in spec:
        lo, hi, count = spec.split(":")
        return list(np.linspace(float(lo), float(hi), int(count)))
    return _float_list(spec)


def _emit(args, table: SweepTable, command: str, config: dict, t0: float) -> str:
    path = _out_path(args, f"{command}.csv")
    write_csv(table, path)
    write_sidecar(path, command, config, time.time() - t0)
    print(f"wrote {path} ({len(table.rows)} rows)")
    return path


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output CSV path (default: <command>.csv in $XYCHAIN_OUTDIR)")
    p.add_argument("--workers", type=int, default=None, help="thread-pool size for sweeps")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="xychain",
        description="Compressed simulation of the transverse-field XY chain.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="dispersion arrays and mode energies")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.0)
    _add_common(p)

    p = sub.add_parser("magnetization", help="thermal magnetization sweep")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, default=0.2)
    p.add_argument("--g-grid", default="0.01:1.99:100")
    p.add_argument("--T-list", default="0.0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    _add_common(p)

    p = sub.add_parser("excited", help="eigenstate magnetization traces")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, default=0.2)
    p.add_argument("--g-grid", default="0.34:5.0:80")
    p.add_argument("--k-list", default="all", help="'all' or comma list of mode words")
    _add_common(p)

    p = sub.add_parser("quench", help="defect density through the field ramp")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gmax", type=float, default=10.0)
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--k", type=int, default=None, help="initial mode word instead of T")
    p.add_argument("--t-list", default=None, help="comma list; default 12 log-spaced in [1, 300]")
    p.add_argument("--steps-per-unit", type=float, default=100.0)
    p.add_argument("--record-points", type=int, default=101)
    p.add_argument("--open-chain", action="store_true", help="drop the fermionic wrap coupling")
    p.add_argument("--adiabatic", action="store_true", help="append the infinitely slow reference trace")
    _add_common(p)

    p = sub.add_parser("kz", help="decay-exponent fit of ramp endpoints")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gmax", type=float, default=10.0)
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--t-list", default=None)
    p.add_argument("--steps-per-unit", type=float, default=100.0)
    p.add_argument("--window", default=None, help="t_min,t_max fit window override")
    p.add_argument("--open-chain", action="store_true")
    _add_common(p)

    p = sub.add_parser("kz-temp", help="decay exponent vs initial temperature")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gmax", type=float, default=10.0)
    p.add_argument("--T-grid", default="0.0,0.25,0.5,0.75,1.0,1.25,1.5,1.75,2.0")
    p.add_argument("--t-list", default=None)
    p.add_argument("--window", default=None)
    p.add_argument("--open-chain", action="store_true")
    _add_common(p)

    p = sub.add_parser("correlations", help="string correlations around the chain center")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--g-list", default="0.8")
    p.add_argument("--T-list", default="0.0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    p.add_argument("--anchor", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("evolve", help="expectation value along exact time evolution")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--initial", default="vacuum", help="vacuum | eigen:<k> | plus:<q>")
    p.add_argument("--observable", default="magnetization")
    p.add_argument("--t-grid", default="0.0:10.0:101")
    _add_common(p)

    p = sub.add_parser("gatecost", help="elementary-gate accounting of the compressed circuit")
    p.add_argument("--n-list", default="16,32,64,128,256,512,1024")
    p.add_argument("--g", type=float, default=1.5)
    p.add_argument("--delta", type=float, default=0.0)
    _add_common(p)

    p = sub.add_parser("verify", help="oracle-equivalence suite (exit 1 on any breach)")
    p.add_argument("--n", type=int, default=4)
    _add_common(p)

    return ap


def _cmd_spectrum(args, t0: float) -> int:
    params = ModelParams(n=args.n, g=args.g, delta=args.delta)
    spec = dispersion(params)
    rows = [
        (args.n, args.g, args.delta, j, spec.alpha[j], spec.beta[j], spec.theta[j],
         spec.eps[j], spec.e0)
        for j in range(args.n)
    ]
    table = SweepTable(
        columns=("n", "g", "delta", "j", "alpha", "beta", "theta", "eps", "e0"),
        rows=rows,
    )
    _emit(args, table, "spectrum", {"n": args.n, "g": args.g, "delta": args.delta}, t0)
    return 0


def _cmd_magnetization(args, t0: float) -> int:
    g_grid = _grid(args.g_grid)
    T_list = _float_list(args.T_list)
    table = experiments.magnetization_sweep(args.n, args.delta, g_grid, T_list, args.workers)
    _emit(args, table, "magnetization",
          {"n": args.n, "delta": args.delta, "g_grid": g_grid, "T_list": T_list}, t0)
    return 0


def _cmd_excited(args, t0: float) -> int:
    g_grid = _grid(args.g_grid)
    if args.k_list == "all":
        if args.n > 12:
            raise ValueError(f"--k-list all enumerates 2^{args.n} states; pass an explicit list")
        k_list = list(range(1 << args.n))
    else:
        k_list = _int_list(args.k_list)
    table = experiments.excited_magnetization(args.n, args.delta, g_grid, k_list, args.workers)
    _emit(args, table, "excited",
          {"n": args.n, "delta": args.delta, "g_grid": g_grid, "k_list": k_list}, t0)
    return 0


def _quench_times(args) -> list[float]:
    if args.t_list is None:
        return list(experiments.default_quench_times())
    return _float_list(args.t_list)


def _cmd_quench(args, t0: float) -> int:
    t_list = _quench_times(args)
    T = 0.0 if args.T is None and args.k is None else args.T
    table = experiments.quench_run(
        args.n, args.gmax, t_list, T=T, mode_word=args.k,
        steps_per_unit=args.steps_per_unit, record_points=args.record_points,
        boundary=not args.open_chain, workers=args.workers,
    )
    rows = [row + ("ramp",) for row in table.rows]
    if args.adiabatic:
        gs = sorted({row[4] for row in table.rows})
        ref = experiments.adiabatic_reference(args.n, gs, args.workers)
        label = T if args.k is None else args.k
        rows += [(args.n, args.gmax, label, 0.0, g, nu, "adiabatic") for _, g, nu in ref.rows]
    table = SweepTable(columns=table.columns + ("kind",), rows=rows, meta=table.meta)
    _emit(args, table, "quench",
          {"n": args.n, "gmax": args.gmax, "T": T, "k": args.k, "t_list": t_list,
           "steps_per_unit": args.steps_per_unit, "record_points": args.record_points,
           "boundary": not args.open_chain, "adiabatic": args.adiabatic}, t0)
    return 0


def _cmd_kz(args, t0: float) -> int:
    t_list = _quench_times(args)
    T = 0.0 if args.T is None and args.k is None else args.T
    table = experiments.quench_run(
        args.n, args.gmax, t_list, T=T, mode_word=args.k,
        steps_per_unit=args.steps_per_unit, record_points=0,
        boundary=not args.open_chain, workers=args.workers,
    )
    endpoints = experiments.kz_endpoints(table)
    window = tuple(_float_list(args.window)) if args.window else None
    fit = experiments.kz_fit(endpoints, window)
    label = T if args.k is None else args.k
    rows = [
        (args.n, args.gmax, label, t, nu, fit.p, fit.intercept, fit.t_min_fit,
         fit.t_max_fit, fit.residual_rms, fit.points)
        for t, nu in endpoints
    ]
    table = SweepTable(
        columns=("n", "g_max", "T" if args.k is None else "k", "t", "nu", "p",
                 "intercept", "t_min_fit", "t_max_fit", "residual_rms", "fit_points"),
        rows=rows,
    )
    _emit(args, table, "kz",
          {"n": args.n, "gmax": args.gmax, "T": T, "k": args.k, "t_list": t_list,
           "steps_per_unit": args.steps_per_unit, "window": args.window,
           "boundary": not args.open_chain}, t0)
    print(f"fitted p = {fit.p:.4f} over t in [{fit.t_min_fit:g}, {fit.t_max_fit:g}]")
    return 0


def _cmd_kz_temp(args, t0: float) -> int:
    T_grid = _float_list(args.T_grid)
    t_list = _quench_times(args)
    window = tuple(_float_list(args.window)) if args.window else None
    table = experiments.temperature_exponent_sweep(
        args.n, T_grid, t_list, args.gmax, window, boundary=not args.open_chain
    )
    _emit(args, table, "kz-temp",
          {"n": args.n, "gmax": args.gmax, "T_grid": T_grid, "t_list": t_list,
           "window": args.window, "boundary": not args.open_chain}, t0)
    return 0


def _cmd_correlations(args, t0: float) -> int:
    g_list = _float_list(args.g_list)
    T_list = _float_list(args.T_list)
    table = experiments.correlation_profile(
        args.n, args.delta, g_list, T_list, args.anchor, args.workers
    )
    _emit(args, table, "correlations",
          {"n": args.n, "delta": args.delta, "g_list": g_list, "T_list": T_list,
           "anchor": args.anchor}, t0)
    return 0


def _cmd_evolve(args, t0: float) -> int:
    t_grid = _grid(args.t_grid)
    table = experiments.time_trace(
        args.n, args.g, args.delta, args.initial, args.observable, t_grid, args.workers
    )
    _emit(args, table, "evolve",
          {"n": args.n, "g": args.g, "delta": args.delta, "initial": args.initial,
           "observable": args.observable, "t_grid": t_grid}, t0)
    return 0


def _cmd_gatecost(args, t0: float) -> int:
    rows = []
    for n in _int_list(args.n_list):
        report = compressed.gate_cost(ModelParams(n=n, g=args.g, delta=args.delta))
        m = report.m
        rows.append(
            (n, m, report.per_factor["bogoliubov"], report.per_factor["fourier_stages"],
             report.per_factor["reorder_s"], report.per_factor["reorder_s0"],
             report.per_factor["reorder_sm"], report.per_factor["reorder_bog"],
             report.fourier_total, report.total, report.total / (n * m))
        )
    table = SweepTable(
        columns=("n", "m", "bogoliubov", "fourier_stages", "reorder_s", "reorder_s0",
                 "reorder_sm", "reorder_bog", "fourier_total", "total", "total_per_nm"),
        rows=rows,
    )
    _emit(args, table, "gatecost", {"n_list": args.n_list, "g": args.g, "delta": args.delta}, t0)
    return 0


def _cmd_verify(args, t0: float) -> int:
    results = run_verification(args.n)
    ok = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: max error {r.error:.3e} (tolerance {r.tol:g})")
        ok = ok and r.passed
    if not ok:
        failing = ", ".join(r.name for r in results if not r.passed)
        print(f"verification failed: {failing}", file=sys.stderr)
        return 1
    print(f"all checks passed at n={args.n} in {time.time()-t0:.1f}s")
    return 0


_HANDLERS = {
    "spectrum": _cmd_spectrum,
    "magnetization": _cmd_magnetization,
    "excited": _cmd_excited,
    "quench": _cmd_quench,
    "kz": _cmd_kz,
    "kz-temp": _cmd_kz_temp,
    "correlations": _cmd_correlations,
    "evolve": _cmd_evolve,
    "gatecost": _cmd_gatecost,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.time()
    try:
        return _HANDLERS[args.command](args, t0)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
