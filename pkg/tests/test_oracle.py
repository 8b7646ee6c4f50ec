import numpy as np
import pytest

from xychain import compressed, oracle
from xychain.model import ModelParams


def test_majoranas_clifford_algebra():
    xs = oracle.majoranas(3)
    ident = np.eye(8)
    for j, xj in enumerate(xs):
        np.testing.assert_allclose(xj, xj.conj().T, atol=1e-15)
        for k, xk in enumerate(xs):
            anti = xj @ xk + xk @ xj
            np.testing.assert_allclose(anti, 2.0 * (j == k) * ident, atol=1e-14)


def test_hamiltonian_spin_properties():
    params = ModelParams(n=4, g=0.0, delta=0.0)
    h = oracle.hamiltonian_spin(params)
    np.testing.assert_allclose(h, h.conj().T, atol=1e-12)
    evals = np.linalg.eigvalsh(h)
    np.testing.assert_allclose(np.sort(evals), np.sort(-evals)[::-1] * -1, atol=1e-10)
    np.testing.assert_allclose(np.sort(evals), -np.sort(evals)[::-1], atol=1e-10)
    with pytest.raises(ValueError):
        oracle.hamiltonian_spin(ModelParams(n=16, g=1.0, delta=0.0))


def test_gibbs_limits():
    params = ModelParams(n=4, g=1.5, delta=0.2)
    h = oracle.hamiltonian_spin(params)
    hot = oracle.gibbs(h, 1e12)
    np.testing.assert_allclose(hot.rho, np.eye(16) / 16.0, atol=1e-9)
    cold = oracle.gibbs(h, 0.0)
    evals, evecs = np.linalg.eigh(h)
    ground = evecs[:, :1]
    np.testing.assert_allclose(cold.rho, ground @ ground.conj().T, atol=1e-10)
    assert np.trace(cold.rho).real == pytest.approx(1.0, abs=1e-12)
    # exact level crossing leaves a two-dimensional ground space
    crossing = oracle.gibbs(oracle.hamiltonian_spin(ModelParams(n=4, g=1.2, delta=0.2)), 0.0)
    assert np.linalg.matrix_rank(crossing.rho, tol=1e-8) == 2


def test_expectation_dense_examples():
    n = 4
    vac = oracle.basis_state(n, 0)
    assert oracle.expectation_dense(vac, oracle.magnetization_dense(n)) == pytest.approx(1.0)
    plus = np.full(1 << n, 1.0 / 4.0, dtype=complex)
    st = oracle.DenseState(n=n, vector=plus)
    assert oracle.expectation_dense(st, oracle.kinks_dense(n)) == pytest.approx(1.0)
    assert oracle.expectation_dense(vac, oracle.correlation_dense(0, 2, n)) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        oracle.expectation_dense(vac, np.eye(8))


def test_quench_dense_identity_at_tiny_time():
    n = 4
    params = ModelParams(n=n, g=10.0, delta=0.0)
    rho0 = oracle.gibbs(oracle.hamiltonian_spin(params), 0.5)
    sched = compressed.QuenchSchedule(g_max=10.0, t=1e-9, L=1)
    out = oracle.quench_dense(n, sched, rho0)
    np.testing.assert_allclose(out.rho, rho0.rho, atol=1e-7)


def test_evolve_dense_conserves_energy():
    n = 4
    params = ModelParams(n=n, g=0.8, delta=0.3)
    h = oracle.hamiltonian_spin(params)
    vec = np.zeros(1 << n, dtype=complex)
    vec[3] = 1.0
    st = oracle.DenseState(n=n, vector=vec)
    e0 = oracle.expectation_dense(st, h)
    for t in (0.0, 0.4, 3.0):
        et = oracle.expectation_dense(oracle.evolve_dense(h, t, st), h)
        assert et == pytest.approx(e0, abs=1e-10)
    np.testing.assert_allclose(oracle.evolve_dense(h, 0.0, st).vector, vec, atol=1e-12)


def test_mode_local_evolution_product_matches_exact_propagator():
    from xychain import matchgate
    from xychain.model import dispersion

    params = ModelParams(n=4, g=0.9, delta=0.3)
    spec = dispersion(params)
    u = matchgate.assemble_u(params, spec).matrix
    h = oracle.hamiltonian_spin(params)
    evals, evecs = np.linalg.eigh(h)
    for t in (0.3, 2.0):
        w = oracle.time_evolution_product(spec.eps, t, 4)
        exact = (evecs * np.exp(-1.0j * evals * t)) @ evecs.conj().T
        np.testing.assert_allclose(u @ w @ u.conj().T, exact, atol=1e-9)


def test_dense_state_validation():
    with pytest.raises(ValueError):
        oracle.DenseState(n=2, vector=np.array([1.0, 1.0, 0.0, 0.0]))
    with pytest.raises(ValueError):
        oracle.DenseState(n=2, rho=np.eye(4))
    with pytest.raises(ValueError):
        oracle.DenseState(n=2)
