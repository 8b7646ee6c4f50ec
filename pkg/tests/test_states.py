import math

import numpy as np
import pytest

from xychain import compressed, oracle, states
from xychain.model import ModelParams, dispersion


def test_thermal_state_limits_and_example():
    spec = dispersion(ModelParams(n=4, g=1.0, delta=0.0))
    hot = states.thermal_state(spec, math.inf)
    np.testing.assert_allclose(hot.S, 0.0)
    cold = states.thermal_state(dispersion(ModelParams(n=4, g=2.0, delta=0.0)), 0.0)
    np.testing.assert_allclose(cold.S, states.vacuum_state(4).S)
    warm = states.thermal_state(spec, 1.0)
    expected = [0.0, math.tanh(math.sqrt(2.0)), math.tanh(2.0), math.tanh(math.sqrt(2.0))]
    np.testing.assert_allclose(np.diag(warm.S, 1)[0::2], expected, atol=1e-15)
    with pytest.raises(ValueError):
        states.thermal_state(spec, -1.0)


def test_thermal_blocks_decrease_with_temperature():
    spec = dispersion(ModelParams(n=8, g=1.5, delta=0.3))
    temps = [0.1, 0.5, 1.0, 2.0, 5.0]
    blocks = [np.diag(states.thermal_state(spec, T).S, 1)[0::2] for T in temps]
    for a, b in zip(blocks, blocks[1:]):
        assert np.all(b < a)


def test_thermal_covariance_matches_dense_gibbs():
    params = ModelParams(n=4, g=1.0, delta=0.2)
    spec = dispersion(params)
    r = compressed.assemble_r(params, spec).matrix
    hbar = oracle.hamiltonian_spin(params)
    for T in (0.5, 2.0):
        w = r @ states.thermal_state(spec, T).S @ r.T
        dense = oracle.covariance_dense(oracle.gibbs(hbar, T))
        np.testing.assert_allclose(w, dense, atol=1e-9)


def test_vacuum_state_matches_dense_covariance():
    vac = states.vacuum_state(4)
    np.testing.assert_allclose(vac.S, -vac.S.T)
    dense = oracle.covariance_dense(oracle.basis_state(4, 0))
    np.testing.assert_allclose(vac.S, dense, atol=1e-12)


def test_product_state_cases():
    n = 4
    zero = np.diag([1.0, 0.0]).astype(complex)
    mixed = np.diag([0.5, 0.5]).astype(complex)
    plus = np.full((2, 2), 0.5, dtype=complex)
    np.testing.assert_allclose(
        states.product_state([zero] * n).S, states.vacuum_state(n).S
    )
    np.testing.assert_allclose(states.product_state([mixed] * n).S, 0.0)
    st = states.product_state([plus, zero, zero, zero])
    rho = plus
    for _ in range(3):
        rho = np.kron(rho, zero)
    dense = oracle.covariance_dense(oracle.DenseState(n=n, rho=rho))
    np.testing.assert_allclose(st.S, dense, atol=1e-12)
    with pytest.raises(ValueError):
        states.product_state([np.diag([1.2, -0.2]).astype(complex)] + [zero] * 3)


def test_observable_patterns():
    n = 4
    m_obs = states.observable_magnetization(n)
    y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
    np.testing.assert_allclose(2j * m_obs.C, np.kron(np.eye(n), y) / n)
    k_obs = states.observable_kinks(n)
    assert np.count_nonzero(k_obs.C) == 2 * (n - 1)
    for j in range(n - 1):
        assert k_obs.C[2 * j + 1, 2 * j + 2] == pytest.approx(-0.5 / (n - 1))
    c_obs = states.observable_correlation(1, 3, n)
    assert np.count_nonzero(c_obs.C) == 2
    assert c_obs.C[3, 6] == -0.5
    with pytest.raises(ValueError):
        states.observable_correlation(3, 1, n)


def test_expectation_basics_and_limits():
    n = 4
    ident = compressed.OrthogonalGate(n=n, matrix=np.eye(2 * n), label="1")
    hot = states.CovarianceState(n=n, S=np.zeros((2 * n, 2 * n)))
    assert states.expectation(ident, hot, states.observable_magnetization(n)) == 0.0

    params = ModelParams(n=4, g=1000.0, delta=0.0)
    spec = dispersion(params)
    r = compressed.assemble_r(params, spec)
    mag = states.expectation(
        r, states.thermal_state(spec, 0.0), states.observable_magnetization(4)
    )
    assert mag == pytest.approx(1.0, abs=1e-3)


def test_expectation_linearity_and_conjugation_invariance():
    n = 4
    params = ModelParams(n=n, g=0.9, delta=0.1)
    spec = dispersion(params)
    r = compressed.assemble_r(params, spec)
    st = states.thermal_state(spec, 0.7)
    a = states.observable_magnetization(n)
    b = states.observable_kinks(n)
    combo = states.observable_generic(2.0 * a.C + 0.5 * b.C)
    lhs = states.expectation(r, st, combo)
    rhs = 2.0 * states.expectation(r, st, a) + 0.5 * states.expectation(r, st, b)
    assert lhs == pytest.approx(rhs, abs=1e-12)

    # conjugating state and observable together leaves the pairing alone
    q = compressed.assemble_r(ModelParams(n=n, g=1.7, delta=0.6)).matrix
    st2 = states.CovarianceState(n=n, S=q @ st.S @ q.T)
    obs2 = states.observable_generic(q @ a.C @ q.T)
    assert states.expectation(
        compressed.OrthogonalGate(n=n, matrix=r.matrix @ q.T, label="RQ^T"), st2, a
    ) == pytest.approx(states.expectation(r, st, a), abs=1e-12)
    assert states.expectation_from_covariance(
        q @ st.S @ q.T, obs2
    ) == pytest.approx(states.expectation_from_covariance(st.S, a), abs=1e-12)


def test_excited_magnetization_complement_antisymmetry():
    n = 4
    vac = states.vacuum_state(n)
    obs = states.observable_magnetization(n)
    for k in range(1 << n):
        rk = compressed.r_excitation(n, k)
        rkc = compressed.r_excitation(n, (1 << n) - 1 - k)
        mk = states.expectation(rk, vac, obs)
        mkc = states.expectation(rkc, vac, obs)
        assert mk + mkc == pytest.approx(0.0, abs=1e-14)


def test_time_evolution_preserves_mode_blocks_of_vacuum():
    spec = dispersion(ModelParams(n=8, g=1.1, delta=0.5))
    vac = states.vacuum_state(8)
    for t in (0.3, 2.0, 17.0):
        rw = compressed.r_time_evolution(spec, t).matrix
        np.testing.assert_allclose(rw @ vac.S @ rw.T, vac.S, atol=1e-12)


def test_covariance_state_validation():
    with pytest.raises(ValueError):
        states.CovarianceState(n=2, S=np.eye(4))
    big = np.zeros((4, 4))
    big[0, 1] = 2.0
    big[1, 0] = -2.0
    with pytest.raises(ValueError):
        states.CovarianceState(n=2, S=big)
    with pytest.raises(ValueError):
        states.expectation_from_covariance(
            np.zeros((4, 4)), states.observable_magnetization(4)
        )
