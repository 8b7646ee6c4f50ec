import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xychain import experiments
from xychain.model import ModelParams, dispersion


def test_kz_fit_recovers_exact_power_law():
    ts = np.geomspace(1.0, 300.0, 12)
    nus = 0.37 * ts**-0.5
    fit = experiments.kz_fit(list(zip(ts, nus)), window=(ts[0], ts[-1]))
    assert fit.p == pytest.approx(0.5, abs=1e-12)
    assert fit.residual_rms == pytest.approx(0.0, abs=1e-12)
    assert fit.points == 12


@settings(max_examples=30, deadline=None)
@given(scale=st.floats(1e-3, 1e3), p_true=st.floats(0.05, 1.5))
def test_kz_fit_scale_invariance(scale, p_true):
    ts = np.geomspace(1.0, 100.0, 10)
    nus = 0.2 * ts**-p_true
    base = experiments.kz_fit(list(zip(ts, nus)))
    scaled = experiments.kz_fit(list(zip(ts, scale * nus)))
    assert scaled.p == pytest.approx(base.p, abs=1e-9)


def test_kz_fit_window_rules():
    ts = np.geomspace(1.0, 300.0, 12)
    lo, hi = experiments.default_fit_window(ts)
    assert lo == pytest.approx(ts[6])
    assert hi == pytest.approx(ts[9])
    with pytest.raises(ValueError):
        experiments.kz_fit([(1.0, 0.3), (2.0, 0.2)], window=(0.5, 3.0))
    with pytest.raises(ValueError):
        experiments.kz_fit([(t, 0.1) for t in ts], window=(400.0, 500.0))


def test_magnetization_sweep_table_and_determinism():
    g_grid = [0.5, 1.0, 1.5]
    T_list = [0.0, 0.5]
    a = experiments.magnetization_sweep(8, 0.2, g_grid, T_list, workers=1)
    b = experiments.magnetization_sweep(8, 0.2, g_grid, T_list, workers=2)
    assert a.columns == ("n", "delta", "g", "T", "magnetization")
    assert len(a.rows) == len(g_grid) * len(T_list)
    assert a.rows == b.rows
    high = experiments.magnetization_sweep(8, 0.0, [500.0], [0.0], workers=1)
    assert high.rows[0][-1] == pytest.approx(1.0, abs=1e-3)


def test_magnetization_jump_located_at_the_critical_field():
    g_grid = list(np.linspace(0.01, 1.99, 100))
    table = experiments.magnetization_sweep(8, 0.2, g_grid, [0.0, 0.9], workers=2)
    curve = {}
    for n, d, g, T, mag in table.rows:
        curve.setdefault(T, []).append(mag)
    jumps0 = np.abs(np.diff(curve[0.0]))
    i = int(np.argmax(jumps0))
    assert g_grid[i] < 1.2 < g_grid[i + 1]
    assert np.max(np.abs(np.diff(curve[0.9]))) < 0.5 * jumps0[i]


def test_excited_magnetization_traces():
    g_grid = [0.5, 0.8, 2.0]
    ks = list(range(16))
    table = experiments.excited_magnetization(4, 0.2, g_grid, ks, workers=1)
    assert len(table.rows) == len(g_grid) * len(ks)
    # ground trace equals the T = 0 thermal trace away from the crossing
    thermal = experiments.magnetization_sweep(4, 0.2, g_grid, [0.0], workers=1)
    k0 = [row for row in table.rows if row[2] == 0]
    for row_e, row_t in zip(k0, thermal.rows):
        assert row_e[-1] == pytest.approx(row_t[-1], abs=1e-12)
    # inv_g column is consistent
    for row in table.rows:
        assert row[4] == pytest.approx(1.0 / row[3])


def test_excitation_rank_modes_ordering():
    spec = dispersion(ModelParams(n=8, g=10.0, delta=0.0))
    assert experiments.excitation_rank_modes(spec, 1) == 1  # mode 0
    second = experiments.excitation_rank_modes(spec, 2)
    third = experiments.excitation_rank_modes(spec, 3)
    assert {second, third} == {1 << 1, 1 << 7}  # modes 1 and n-1
    assert experiments.excitation_rank_modes(spec, 4) in (1 << 2, 1 << 6)
    with pytest.raises(ValueError):
        experiments.excitation_rank_modes(spec, 0)


def test_quench_run_trace_and_endpoints():
    ts = [0.5, 1.0, 2.0]
    table = experiments.quench_run(
        8, 10.0, ts, T=0.0, steps_per_unit=50.0, record_points=5, workers=2
    )
    assert table.columns == ("n", "g_max", "T", "t", "g", "nu")
    gs = sorted({row[4] for row in table.rows})
    for t in ts:
        rows_t = [row for row in table.rows if row[3] == t]
        assert sorted({r[4] for r in rows_t}) == gs
        assert any(r[4] == 0.0 for r in rows_t)
    endpoints = experiments.kz_endpoints(table)
    assert [t for t, _ in endpoints] == ts
    # slower ramps leave fewer defects
    nus = [nu for _, nu in endpoints]
    assert nus[0] > nus[1] > nus[2]


def test_quench_run_near_zero_time_keeps_initial_correlations():
    short = experiments.quench_run(8, 10.0, [1e-4], T=0.0, steps_per_unit=1e4)
    nu_short = short.rows[-1][-1]
    # the polarized initial state has nu ~ 1/2; slow ramps remove kinks,
    # down to the pinned-mode floor of order 1/n for the wrapped coupling
    assert nu_short == pytest.approx(0.5, abs=0.05)
    long = experiments.quench_run(8, 10.0, [50.0], T=0.0, steps_per_unit=20.0)
    assert long.rows[-1][-1] < 0.15
    open_long = experiments.quench_run(
        8, 10.0, [50.0], T=0.0, steps_per_unit=20.0, boundary=False
    )
    assert open_long.rows[-1][-1] < 0.05


def test_quench_initial_state_selection_errors():
    with pytest.raises(ValueError):
        experiments.quench_run(8, 10.0, [1.0], T=None, mode_word=None)
    with pytest.raises(ValueError):
        experiments.quench_run(8, 10.0, [1.0], T=0.5, mode_word=3)
    with pytest.raises(ValueError):
        experiments.quench_run(8, 10.0, [-1.0], T=0.0)


def test_adiabatic_reference_decreases_toward_zero_field():
    table = experiments.adiabatic_reference(16, [0.05, 1.0, 5.0], workers=1)
    nus = [row[2] for row in table.rows]
    assert nus[0] < nus[1] < nus[2]


def test_slow_open_chain_ramp_tracks_the_adiabatic_curve():
    trace = experiments.quench_run(
        8, 10.0, [60.0], T=0.0, steps_per_unit=40.0, record_points=5, boundary=False
    )
    gs = [row[4] for row in trace.rows]
    ref = experiments.adiabatic_reference(8, gs, workers=1)
    for ramp_row, ref_row in zip(trace.rows, ref.rows):
        assert ramp_row[-1] == pytest.approx(ref_row[-1], abs=0.06)


def test_excited_quench_returns_fits_per_rank():
    cache = experiments.QuenchTransformCache(16, 10.0)
    fits = experiments.excited_quench(
        16, [1, 2], t_list=[1.0, 2.0, 4.0, 8.0], window=(1.0, 8.0), cache=cache
    )
    assert len(fits) == 2
    for fit in fits:
        assert fit.points == 4
        assert 0.0 < fit.p < 2.0


def test_temperature_exponent_sweep_small():
    cache = experiments.QuenchTransformCache(16, 10.0)
    table = experiments.temperature_exponent_sweep(
        16, [0.0, 2.0], t_list=np.geomspace(1.0, 30.0, 8), cache=cache
    )
    assert table.columns[:4] == ("n", "g_max", "T", "p")
    ps = {row[2]: row[3] for row in table.rows}
    assert ps[2.0] < ps[0.0]


def test_correlation_profile_shape_and_peak():
    table = experiments.correlation_profile(16, 0.0, [0.8], [0.0, 0.5], workers=2)
    assert len(table.rows) == 15 * 2
    at_t0 = {row[4]: row[6] for row in table.rows if row[3] == 0.0}
    nearest = max(abs(at_t0[7]), abs(at_t0[9]))
    far = max(abs(v) for j, v in at_t0.items() if abs(j - 8) > 2)
    assert far < nearest


def test_time_trace_static_point_and_stationarity():
    table = experiments.time_trace(4, 1.0, 0.2, "vacuum", "magnetization", [0.0, 0.7])
    from xychain import states

    static = states.expectation_from_covariance(
        states.vacuum_state(4).S, states.observable_magnetization(4)
    )
    assert table.rows[0][-1] == static  # exact at t = 0
    eigen = experiments.time_trace(4, 1.0, 0.2, "eigen:3", "magnetization", [0.0, 0.5, 2.0])
    vals = [row[-1] for row in eigen.rows]
    assert max(vals) - min(vals) < 1e-12
    with pytest.raises(ValueError):
        experiments.time_trace(4, 1.0, 0.2, "bogus", "magnetization", [0.0])
    with pytest.raises(ValueError):
        experiments.time_trace(4, 1.0, 0.2, "vacuum", "bogus", [0.0])


def test_sweep_table_validation():
    with pytest.raises(ValueError):
        experiments.SweepTable(columns=("a", "b"), rows=[(1.0,)])
    with pytest.raises(ValueError):
        experiments.SweepTable(columns=("a",), rows=[(float("nan"),)])
