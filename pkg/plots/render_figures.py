#!/usr/bin/env python3
"""Regenerate the six figure families from the simulator's CSV output.

Stand-alone: reads only the documented CSV schemas (see docs/csv-schemas.md
in the repository root), never recomputes physics.  Usage:

    python render_figures.py fig1 magnetization.csv --out fig1.png
    python render_figures.py fig2 quench.csv kz.csv --out fig2.png --check

Exit code 0 on success, 1 on schema errors or failed self-checks.
"""

from __future__ import annotations

import argparse
import math
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6")


class SchemaError(Exception):
    pass


def read_csv(path: str) -> dict[str, list]:
    """Columns of a simulator CSV as name -> list (floats where possible)."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    header = lines[0].split(",")
    columns: dict[str, list] = {name: [] for name in header}
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(header):
            raise SchemaError(f"{path}: row width {len(cells)} != header width {len(header)}")
        for name, cell in zip(header, cells):
            try:
                columns[name].append(float(cell))
            except ValueError:
                columns[name].append(cell)
    return columns


def require(columns: dict[str, list], path: str, *names: str) -> None:
    for name in names:
        if name not in columns:
            raise SchemaError(f"{path}: missing column '{name}'")


def series_by(columns: dict[str, list], key: str, x: str, y: str, where=None):
    """Split (x, y) pairs into one series per distinct key value."""
    out: dict = {}
    for i in range(len(columns[y])):
        if where is not None and not where(i):
            continue
        out.setdefault(columns[key][i], ([], []))
        xs, ys = out[columns[key][i]]
        xs.append(columns[x][i])
        ys.append(columns[y][i])
    return dict(sorted(out.items(), key=lambda kv: kv[0]))


def _count_check(name: str, drawn: int, expected: int) -> None:
    if drawn != expected:
        raise SchemaError(f"{name}: drew {drawn} series, expected {expected}")


def fig1(paths: list[str], out: str, check: bool) -> None:
    """Thermal magnetization vs field, one curve per temperature."""
    cols = read_csv(paths[0])
    require(cols, paths[0], "g", "T", "magnetization")
    series = series_by(cols, "T", "g", "magnetization")
    fig, ax = plt.subplots(figsize=(5, 4))
    for T, (xs, ys) in series.items():
        ax.plot(xs, ys, lw=1.2, label=f"T={T:g}")
    ax.set_xlabel("g")
    ax.set_ylabel("magnetization")
    ax.legend(fontsize=6, ncol=2)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    if check:
        _count_check("fig1", len(series), len(set(cols["T"])))


def fig2(paths: list[str], out: str, check: bool) -> None:
    """Ramp traces (left) and the endpoint power-law fit (right)."""
    trace_cols = fit_cols = None
    for path in paths:
        cols = read_csv(path)
        if "p" in cols:
            require(cols, path, "t", "nu", "p", "intercept", "t_min_fit", "t_max_fit")
            fit_cols = cols
        else:
            require(cols, path, "t", "g", "nu")
            trace_cols = cols
    panels = sum(x is not None for x in (trace_cols, fit_cols))
    fig, axes = plt.subplots(1, panels, figsize=(5 * panels, 4))
    axes = [axes] if panels == 1 else list(axes)
    drawn = 0

    if trace_cols is not None:
        ax = axes.pop(0)
        kinds = trace_cols.get("kind", ["ramp"] * len(trace_cols["t"]))
        ramp = series_by(
            trace_cols, "t", "g", "nu", where=lambda i: kinds[i] == "ramp"
        )
        for t, (xs, ys) in ramp.items():
            ax.plot(xs, ys, lw=1.0, label=f"t={t:g}")
            drawn += 1
        adiabatic = series_by(
            trace_cols, "t", "g", "nu", where=lambda i: kinds[i] == "adiabatic"
        )
        for _, (xs, ys) in adiabatic.items():
            ax.plot(xs, ys, "k--", lw=1.0, label="adiabatic")
        ax.invert_xaxis()
        ax.set_xlabel("g")
        ax.set_ylabel("nu")
        ax.legend(fontsize=6)
        if check:
            expected = len({t for t, k in zip(trace_cols["t"], kinds) if k == "ramp"})
            _count_check("fig2 traces", drawn, expected)

    if fit_cols is not None:
        ax = axes.pop(0)
        ts = fit_cols["t"]
        nus = fit_cols["nu"]
        lo, hi = fit_cols["t_min_fit"][0], fit_cols["t_max_fit"][0]
        inside = [lo <= t <= hi for t in ts]
        x = [math.log(1.0 / t) for t in ts]
        y = [math.log(v) for v in nus]
        ax.plot(
            [a for a, m in zip(x, inside) if not m],
            [b for b, m in zip(y, inside) if not m],
            "o", mfc="none", color="C0",
        )
        ax.plot(
            [a for a, m in zip(x, inside) if m],
            [b for b, m in zip(y, inside) if m],
            "o", color="C0",
        )
        p, c = fit_cols["p"][0], fit_cols["intercept"][0]
        xs = [min(x), max(x)]
        ax.plot(xs, [p * v + c for v in xs], "k--", lw=1.0)
        ax.annotate(f"p = {p:.3f}", xy=(0.05, 0.9), xycoords="axes fraction")
        ax.set_xlabel("ln(1/t)")
        ax.set_ylabel("ln(nu)")
    fig.savefig(out, dpi=150, bbox_inches="tight")


def fig3(paths: list[str], out: str, check: bool) -> None:
    """Fitted decay exponent vs initial temperature."""
    cols = read_csv(paths[0])
    require(cols, paths[0], "T", "p")
    fig, ax = plt.subplots(figsize=(5, 4))
    pairs = sorted(zip(cols["T"], cols["p"]))
    ax.plot([a for a, _ in pairs], [b for _, b in pairs], "o-")
    ax.set_xlabel("T")
    ax.set_ylabel("p")
    fig.savefig(out, dpi=150, bbox_inches="tight")
    if check:
        _count_check("fig3", len(pairs), len(set(cols["T"])))


def fig4(paths: list[str], out: str, check: bool) -> None:
    """Endpoint fits for ramps started from excited states, one panel per k."""
    cols = read_csv(paths[0])
    require(cols, paths[0], "k", "t", "nu", "p", "intercept")
    ks = sorted(set(cols["k"]))
    fig, axes = plt.subplots(1, len(ks), figsize=(4 * len(ks), 4), squeeze=False)
    for ax, k in zip(axes[0], ks):
        rows = [i for i in range(len(cols["k"])) if cols["k"][i] == k]
        x = [math.log(1.0 / cols["t"][i]) for i in rows]
        y = [math.log(cols["nu"][i]) for i in rows]
        ax.plot(x, y, "o", mfc="none")
        p, c = cols["p"][rows[0]], cols["intercept"][rows[0]]
        ax.plot([min(x), max(x)], [p * v + c for v in (min(x), max(x))], "k--")
        ax.set_title(f"k = {k:g}, p = {p:.3f}")
        ax.set_xlabel("ln(1/t)")
        ax.set_ylabel("ln(nu)")
    fig.savefig(out, dpi=150, bbox_inches="tight")
    if check:
        _count_check("fig4", len(ks), len(set(cols["k"])))


def fig5(paths: list[str], out: str, check: bool) -> None:
    """String correlations vs site: per-T curves (left), per-g at T=0 (right)."""
    cols = read_csv(paths[0])
    require(cols, paths[0], "g", "T", "j", "correlation")
    g0 = min(cols["g"])
    left = series_by(cols, "T", "j", "correlation", where=lambda i: cols["g"][i] == g0)
    right = series_by(cols, "g", "j", "correlation", where=lambda i: cols["T"][i] == 0.0)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for T, (xs, ys) in left.items():
        ax1.plot(xs, ys, lw=1.0, label=f"T={T:g}")
    for g, (xs, ys) in right.items():
        ax2.plot(xs, ys, lw=1.0, label=f"g={g:g}")
    for ax in (ax1, ax2):
        ax.set_xlabel("site j")
        ax.set_ylabel("correlation")
        ax.legend(fontsize=6)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    if check:
        _count_check("fig5 temperatures", len(left), len(set(cols["T"])))
        _count_check("fig5 fields", len(right), len(set(cols["g"])))


def fig6(paths: list[str], out: str, check: bool) -> None:
    """Eigenstate magnetization vs inverse field, one curve per state."""
    cols = read_csv(paths[0])
    require(cols, paths[0], "k", "inv_g", "magnetization")
    series = series_by(cols, "k", "inv_g", "magnetization")
    fig, ax = plt.subplots(figsize=(5, 4))
    for _, (xs, ys) in series.items():
        pairs = sorted(zip(xs, ys))
        ax.plot([a for a, _ in pairs], [b for _, b in pairs], lw=0.6, alpha=0.6)
    ax.set_xlabel("1/g")
    ax.set_ylabel("magnetization")
    fig.savefig(out, dpi=150, bbox_inches="tight")
    if check:
        _count_check("fig6", len(series), len(set(cols["k"])))


RENDERERS = {
    "fig1": fig1,
    "fig2": fig2,
    "fig3": fig3,
    "fig4": fig4,
    "fig5": fig5,
    "fig6": fig6,
}


def render(figure: str, paths: list[str], out: str, check: bool = False) -> None:
    if figure not in RENDERERS:
        raise SchemaError(f"unknown figure id: {figure}")
    RENDERERS[figure](paths, out, check)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("figure", choices=FIGURES)
    ap.add_argument("csv", nargs="+", help="input CSV file(s)")
    ap.add_argument("--out", required=True, help="output image path (png/svg)")
    ap.add_argument("--check", action="store_true", help="verify series counts")
    args = ap.parse_args(argv)
    try:
        render(args.figure, args.csv, args.out, args.check)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
