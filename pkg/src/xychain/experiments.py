"""Experiment drivers: sweeps, quench scaling fits, correlations, time traces.

Every driver returns a SweepTable (axis columns plus one value column per
row) or FitResult; nothing here is random, so identical inputs always
produce identical tables.  Independent sweep points can be evaluated on a
thread pool; results are assembled by axis index, never completion order.
"""

from __future__ import annotations

import heapq
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import compressed, states
from .compressed import QuenchSchedule
from .model import ModelParams, Spectrum, dispersion

__all__ = [
    "SweepTable",
    "FitResult",
    "QuenchTransformCache",
    "default_quench_times",
    "default_fit_window",
    "magnetization_sweep",
    "excited_magnetization",
    "ramp_end_spectrum",
    "excitation_rank_modes",
    "adiabatic_reference",
    "quench_run",
    "kz_endpoints",
    "kz_fit",
    "temperature_exponent_sweep",
    "excited_quench",
    "correlation_profile",
    "time_trace",
]


@dataclass(frozen=True)
class SweepTable:
    """Rectangular sweep output: named columns, one row per grid point."""

    columns: tuple[str, ...]
    rows: list[tuple]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("row width does not match the column count")
            if not all(math.isfinite(x) if isinstance(x, float) else True for x in row):
                raise ValueError(f"non-finite value in row {row}")

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([row[i] for row in self.rows])


@dataclass(frozen=True)
class FitResult:
    """Power-law fit of decay endpoints: slope of ln(nu) vs ln(1/t)."""

    p: float
    intercept: float
    t_min_fit: float
    t_max_fit: float
    residual_rms: float
    points: int

    def __post_init__(self):
        if self.points < 3:
            raise ValueError("fit needs at least 3 points")
        if self.t_min_fit > self.t_max_fit:
            raise ValueError("empty fit window")


def _workers(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("XYCHAIN_WORKERS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _ordered_map(fn, items, workers: int | None = None) -> list:
    """Map preserving input order; thread pool when more than one worker."""
    nw = _workers(workers)
    items = list(items)
    if nw == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=nw) as pool:
        return list(pool.map(fn, items))


def default_quench_times(count: int = 12, t_min: float = 1.0, t_max: float = 300.0) -> np.ndarray:
    """Log-spaced quench times."""
    return np.geomspace(t_min, t_max, count)


# ---------------------------------------------------------------------------
# magnetization


def magnetization_sweep(
    n: int,
    delta: float,
    g_grid,
    T_list,
    workers: int | None = None,
) -> SweepTable:
    """Thermal magnetization over a (g, T) grid."""
    g_grid = list(g_grid)
    T_list = list(T_list)
    if not g_grid or not T_list:
        raise ValueError("g grid and T list must be nonempty")
    obs = states.observable_magnetization(n)

    def point(g: float) -> list[float]:
        params = ModelParams(n=n, g=g, delta=delta)
        spec = dispersion(params)
        r = compressed.assemble_r(params, spec)
        return [states.expectation(r, states.thermal_state(spec, T), obs) for T in T_list]

    values = _ordered_map(point, g_grid, workers)
    rows = [
        (n, delta, g, T, values[i][j])
        for i, g in enumerate(g_grid)
        for j, T in enumerate(T_list)
    ]
    return SweepTable(
        columns=("n", "delta", "g", "T", "magnetization"),
        rows=rows,
        meta={"n": n, "delta": delta},
    )


def excited_magnetization(
    n: int,
    delta: float,
    g_grid,
    k_list,
    workers: int | None = None,
) -> SweepTable:
    """Eigenstate magnetization traces vs 1/g, one per mode word k."""
    g_grid = list(g_grid)
    k_list = list(k_list)
    if n > 16 and max(k_list, default=0) >= (1 << 16):
        raise ValueError("mode-word list too large to enumerate")
    obs = states.observable_magnetization(n)
    vac = states.vacuum_state(n)
    signs = {k: _excitation_signs(n, k) for k in k_list}

    def point(g: float) -> list[float]:
        params = ModelParams(n=n, g=g, delta=delta)
        r = compressed.assemble_r(params).matrix
        out = []
        for k in k_list:
            s = vac.S * signs[k]
            w = r @ s @ r.T
            out.append(states.expectation_from_covariance(w, obs))
        return out

    values = _ordered_map(point, g_grid, workers)
    rows = [
        (n, delta, k, g, 1.0 / g, values[i][j])
        for j, k in enumerate(k_list)
        for i, g in enumerate(g_grid)
    ]
    return SweepTable(
        columns=("n", "delta", "k", "g", "inv_g", "magnetization"),
        rows=rows,
        meta={"n": n, "delta": delta},
    )


def _excitation_signs(n: int, mode_word: int) -> np.ndarray:
    """Sign pattern of conjugating a covariance by the mode-word flips."""
    d = np.diag(compressed.r_excitation_modes(n, mode_word).matrix)
    return np.outer(d, d)


# ---------------------------------------------------------------------------
# quenching


def ramp_end_spectrum(n: int) -> Spectrum:
    """Spectrum of the coupling-only chain the ramp ends at."""
    return dispersion(ModelParams(n=n, g=0.0, delta=0.0))


def excitation_rank_modes(spec: Spectrum, rank: int) -> int:
    """Mode word of the rank-th excited state (rank-th smallest non-empty
    subset sum of the mode energies), found by heap expansion."""
    if rank < 1:
        raise ValueError("rank must be >= 1")
    order = np.argsort(spec.eps, kind="stable")
    eps = spec.eps[order]
    heap: list[tuple[float, tuple[int, ...]]] = [(float(eps[0]), (0,))]
    for _ in range(rank - 1):
        s, idx = heapq.heappop(heap)
        last = idx[-1]
        if last + 1 < len(eps):
            heapq.heappush(heap, (s + float(eps[last + 1]), idx + (last + 1,)))
            heapq.heappush(heap, (s - float(eps[last]) + float(eps[last + 1]), idx[:-1] + (last + 1,)))
    _, idx = heap[0]
    word = 0
    for i in idx:
        word |= 1 << int(order[i])
    return word


def _quench_initial_covariance(n: int, T: float | None, mode_word: int | None) -> np.ndarray:
    """Initial covariance of the ramp, before the preparation transform.

    Thermal occupations are measured against the ramp-end spectrum (see
    ramp_end_spectrum); excited starts flip the chosen modes of the
    vacuum.
    """
    if (T is None) == (mode_word is None):
        raise ValueError("exactly one of T / mode word selects the initial state")
    if T is not None:
        return states.thermal_state(ramp_end_spectrum(n), T).S
    return states.vacuum_state(n).S * _excitation_signs(n, mode_word)


def adiabatic_reference(n: int, g_grid, workers: int | None = None) -> SweepTable:
    """Ground-state defect density at fixed field values (infinitely slow ramp)."""
    obs = states.observable_kinks(n)

    def point(g: float) -> float:
        params = ModelParams(n=n, g=g, delta=0.0)
        spec = dispersion(params)
        r = compressed.assemble_r(params, spec)
        return 0.5 * (1.0 - states.expectation(r, states.thermal_state(spec, 0.0), obs))

    g_grid = [float(g) for g in g_grid]
    values = _ordered_map(point, g_grid, workers)
    rows = [(n, g, nu) for g, nu in zip(g_grid, values)]
    return SweepTable(columns=("n", "g", "nu"), rows=rows, meta={"n": n})


def quench_run(
    n: int,
    g_max: float,
    t_list,
    T: float | None = None,
    mode_word: int | None = None,
    steps_per_unit: float = 100.0,
    record_points: int = 0,
    boundary: bool = True,
    workers: int | None = None,
) -> SweepTable:
    """Defect density nu = (1 - <K>)/2 through the field ramp.

    The endpoint at g = 0 is always recorded; with ``record_points`` > 0
    the trace nu(g) is sampled at that many evenly spaced ramp fractions
    (identical g values for every t).
    """
    t_list = [float(t) for t in t_list]
    if any(t <= 0 for t in t_list):
        raise ValueError("quench times must be positive")
    params = ModelParams(n=n, g=g_max, delta=0.0)
    spec = dispersion(params)
    rg = compressed.assemble_r(params, spec).matrix
    obs = states.observable_kinks(n)
    s0 = _quench_initial_covariance(n, T, mode_word)
    w0 = rg @ s0 @ rg.T

    fractions = np.linspace(0.0, 1.0, record_points) if record_points > 0 else np.array([1.0])

    def run_one(t: float) -> list[tuple[float, float]]:
        sched = QuenchSchedule.for_time(g_max, t, steps_per_unit)
        if record_points == 0:
            # endpoint only: accumulate the transform and conjugate once
            m = compressed._quench_accumulate(
                n, sched, np.eye(2 * n), boundary=boundary
            )
            k = states.expectation_from_covariance(m @ w0 @ m.T, obs)
            return [(0.0, 0.5 * (1.0 - k))]
        # label samples by the nominal ramp fraction so every t shares one
        # g grid; the sampled step is the nearest one (off by < g_max/2L)
        want: dict[int, float] = {}
        for f in fractions:
            want.setdefault(int(round(f * sched.L)), float(f))
        samples: list[tuple[float, float]] = []

        def observer(l: int, w: np.ndarray) -> None:
            f = want.get(l)
            if f is not None:
                k = states.expectation_from_covariance(w, obs)
                samples.append((g_max * (1.0 - f), 0.5 * (1.0 - k)))

        compressed.quench_covariance(n, sched, w0, boundary=boundary, observer=observer)
        return samples

    traces = _ordered_map(run_one, t_list, workers)
    col = "T" if T is not None else "k"
    rows = [
        (n, g_max, (T if T is not None else mode_word), t, g, nu)
        for t, samples in zip(t_list, traces)
        for g, nu in samples
    ]
    return SweepTable(
        columns=("n", "g_max", col, "t", "g", "nu"),
        rows=rows,
        meta={"n": n, "g_max": g_max, "steps_per_unit": steps_per_unit, "boundary": boundary},
    )


def kz_endpoints(table: SweepTable) -> list[tuple[float, float]]:
    """(t, nu at g = 0) pairs extracted from a quench table."""
    ts = table.column("t")
    gs = table.column("g")
    nus = table.column("nu")
    out = {}
    for t, g, nu in zip(ts, gs, nus):
        if g == 0.0:
            out[float(t)] = float(nu)
    return sorted(out.items())


def default_fit_window(t_sorted: np.ndarray) -> tuple[float, float]:
    """Upper half of the time list minus the top decile."""
    npts = len(t_sorted)
    lo = npts // 2
    hi = npts - max(1, math.ceil(0.1 * npts))
    if hi - lo < 3:
        lo, hi = max(0, npts - 4), npts - 1
    return float(t_sorted[lo]), float(t_sorted[hi - 1])


def kz_fit(endpoints, window: tuple[float, float] | None = None) -> FitResult:
    """Least-squares slope of ln(nu) vs ln(1/t) inside the window."""
    pts = sorted((float(t), float(nu)) for t, nu in endpoints)
    ts = np.array([t for t, _ in pts])
    if window is None:
        window = default_fit_window(ts)
    lo, hi = window
    sel = [(t, nu) for t, nu in pts if lo <= t <= hi]
    if len(sel) < 3:
        raise ValueError(f"fit window [{lo}, {hi}] holds {len(sel)} < 3 points")
    x = np.log(1.0 / np.array([t for t, _ in sel]))
    y = np.log(np.array([nu for _, nu in sel]))
    slope, intercept = np.polyfit(x, y, 1)
    rms = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return FitResult(
        p=float(slope),
        intercept=float(intercept),
        t_min_fit=float(sel[0][0]),
        t_max_fit=float(sel[-1][0]),
        residual_rms=rms,
        points=len(sel),
    )


class QuenchTransformCache:
    """Shared accumulation of the ramp transform per (n, g_max, t)."""

    def __init__(self, n: int, g_max: float, steps_per_unit: float = 100.0, boundary: bool = True):
        self.n = n
        self.g_max = g_max
        self.steps_per_unit = steps_per_unit
        self.boundary = boundary
        self._cache: dict[float, np.ndarray] = {}

    def matches(self, n: int, g_max: float, boundary: bool) -> bool:
        return self.n == n and self.g_max == g_max and self.boundary == boundary

    def transform(self, t: float) -> np.ndarray:
        t = float(t)
        if t not in self._cache:
            sched = QuenchSchedule.for_time(self.g_max, t, self.steps_per_unit)
            self._cache[t] = compressed._quench_accumulate(
                self.n, sched, np.eye(2 * self.n), boundary=self.boundary
            )
        return self._cache[t]


def _endpoint_series(
    cache: QuenchTransformCache,
    rg: np.ndarray,
    t_list,
    T: float | None,
    mode_word: int | None,
) -> list[float]:
    obs = states.observable_kinks(cache.n)
    s0 = _quench_initial_covariance(cache.n, T, mode_word)
    w0 = rg @ s0 @ rg.T
    out = []
    for t in t_list:
        m = cache.transform(t)
        w = m @ w0 @ m.T
        out.append(0.5 * (1.0 - states.expectation_from_covariance(w, obs)))
    return out


def temperature_exponent_sweep(
    n: int,
    T_grid,
    t_list=None,
    g_max: float = 10.0,
    window: tuple[float, float] | None = None,
    boundary: bool = True,
    cache: QuenchTransformCache | None = None,
) -> SweepTable:
    """Fitted decay exponent p as a function of the initial temperature."""
    T_grid = [float(T) for T in T_grid]
    t_list = list(default_quench_times()) if t_list is None else [float(t) for t in t_list]
    params = ModelParams(n=n, g=g_max, delta=0.0)
    spec = dispersion(params)
    rg = compressed.assemble_r(params, spec).matrix
    if cache is None:
        cache = QuenchTransformCache(n, g_max, boundary=boundary)
    elif not cache.matches(n, g_max, boundary):
        raise ValueError("transform cache was built for a different ramp")
    rows = []
    for T in T_grid:
        nus = _endpoint_series(cache, rg, t_list, T, None)
        fit = kz_fit(list(zip(t_list, nus)), window)
        rows.append((n, g_max, T, fit.p, fit.t_min_fit, fit.t_max_fit, fit.residual_rms))
    return SweepTable(
        columns=("n", "g_max", "T", "p", "t_min_fit", "t_max_fit", "residual_rms"),
        rows=rows,
        meta={"n": n, "g_max": g_max, "t_list": t_list},
    )


def excited_quench(
    n: int,
    ranks,
    t_list=None,
    g_max: float = 10.0,
    window: tuple[float, float] | None = None,
    boundary: bool = True,
    cache: QuenchTransformCache | None = None,
) -> list[FitResult]:
    """Decay-exponent fits for ramps started from low excited states.

    ``ranks`` are energy ranks: rank k selects the k-th excited state of
    the chain at g_max (the k-th smallest non-empty excitation-energy
    subset sum).
    """
    t_list = list(default_quench_times()) if t_list is None else [float(t) for t in t_list]
    params = ModelParams(n=n, g=g_max, delta=0.0)
    spec = dispersion(params)
    rg = compressed.assemble_r(params, spec).matrix
    if cache is None:
        cache = QuenchTransformCache(n, g_max, boundary=boundary)
    elif not cache.matches(n, g_max, boundary):
        raise ValueError("transform cache was built for a different ramp")
    fits = []
    for rank in ranks:
        word = excitation_rank_modes(spec, int(rank))
        nus = _endpoint_series(cache, rg, t_list, None, word)
        fits.append(kz_fit(list(zip(t_list, nus)), window))
    return fits


# ---------------------------------------------------------------------------
# correlations and time traces


def correlation_profile(
    n: int,
    delta: float,
    g_values,
    T_values,
    anchor: int | None = None,
    workers: int | None = None,
) -> SweepTable:
    """String correlations between each site and the chain center."""
    anchor = n // 2 if anchor is None else anchor
    if not 0 <= anchor < n:
        raise ValueError(f"anchor out of range: {anchor}")
    g_values = [float(g) for g in g_values]
    T_values = [float(T) for T in T_values]
    sites = [j for j in range(n) if j != anchor]
    obs = [
        states.observable_correlation(min(j, anchor), max(j, anchor), n) for j in sites
    ]

    def point(arg: tuple[float, float]) -> list[float]:
        g, T = arg
        params = ModelParams(n=n, g=g, delta=delta)
        spec = dispersion(params)
        r = compressed.assemble_r(params, spec).matrix
        w = r @ states.thermal_state(spec, T).S @ r.T
        return [states.expectation_from_covariance(w, o) for o in obs]

    grid = [(g, T) for g in g_values for T in T_values]
    values = _ordered_map(point, grid, workers)
    rows = []
    for (g, T), vals in zip(grid, values):
        for j, c in zip(sites, vals):
            rows.append((n, delta, g, T, j, abs(j - anchor), c))
    return SweepTable(
        columns=("n", "delta", "g", "T", "j", "distance", "correlation"),
        rows=rows,
        meta={"n": n, "delta": delta, "anchor": anchor},
    )


def _initial_descriptor(n: int, descriptor: str) -> tuple[np.ndarray, str]:
    """Covariance and evolution style for a named initial state.

    "vacuum" and "plus:<q>" evolve the bare product state; "eigen:<k>"
    evolves the chain eigenstate prepared from mode word k (stationary).
    """
    if descriptor == "vacuum":
        return states.vacuum_state(n).S, "bare"
    if descriptor.startswith("plus:"):
        q = int(descriptor.split(":", 1)[1])
        plus = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
        zero = np.diag([1.0, 0.0]).astype(complex)
        ones = [plus if i == q else zero for i in range(n)]
        return states.product_state(ones).S, "bare"
    if descriptor.startswith("eigen:"):
        k = int(descriptor.split(":", 1)[1])
        return states.vacuum_state(n).S * _excitation_signs(n, k), "eigen"
    raise ValueError(f"unknown initial-state descriptor: {descriptor}")


def time_trace(
    n: int,
    g: float,
    delta: float,
    initial: str,
    observable: str,
    t_grid,
    workers: int | None = None,
) -> SweepTable:
    """Expectation value along exact time evolution of the chain."""
    params = ModelParams(n=n, g=g, delta=delta)
    spec = dispersion(params)
    rg = compressed.assemble_r(params, spec).matrix
    s0, style = _initial_descriptor(n, initial)
    obs = _observable_by_name(observable, n)

    def point(t: float) -> float:
        if style == "eigen":
            m = rg @ compressed.r_time_evolution(spec, float(t)).matrix
        elif t == 0.0:
            # the zero-time transform is the identity exactly
            return states.expectation_from_covariance(s0, obs)
        else:
            rw = compressed.r_time_evolution(spec, float(t)).matrix
            m = rg @ rw @ rg.T
        return states.expectation_from_covariance(m @ s0 @ m.T, obs)

    t_grid = [float(t) for t in t_grid]
    values = _ordered_map(point, t_grid, workers)
    rows = [(n, g, delta, initial, t, v) for t, v in zip(t_grid, values)]
    return SweepTable(
        columns=("n", "g", "delta", "initial", "t", "value"),
        rows=rows,
        meta={"n": n, "g": g, "delta": delta, "observable": observable},
    )


def _observable_by_name(name: str, n: int) -> states.QuadraticObservable:
    if name == "magnetization":
        return states.observable_magnetization(n)
    if name == "kinks":
        return states.observable_kinks(n)
    if name.startswith("correlation:"):
        j, k = (int(x) for x in name.split(":", 1)[1].split(","))
        return states.observable_correlation(j, k, n)
    raise ValueError(f"unknown observable: {name}")
