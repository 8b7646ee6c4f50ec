"""Cross checks of the compressed pipeline against the dense reference.

Each check returns (name, max_error, tolerance); the suite passes when
every error sits below its tolerance.  This is the library behind the
``verify`` subcommand and the acceptance tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import compressed, matchgate, oracle, states
from .model import ModelParams, dispersion, eigenenergy

__all__ = ["CheckResult", "GRID_G", "GRID_DELTA", "GRID_T", "run_verification"]

GRID_G = (0.5, 1.0, 1.2, 2.0)
GRID_DELTA = (0.0, 0.2, 1.0)
GRID_T = (0.0, 0.5, 2.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.error < self.tol


def _diag_hamiltonian(spec) -> np.ndarray:
    n = spec.params.n
    h = np.zeros((1 << n, 1 << n), dtype=complex)
    for j in range(n):
        h -= 0.5 * spec.eps[j] * oracle.pauli_string(n, {j: "Z"})
    return h


def _observable_pairs(n: int):
    return [
        (states.observable_magnetization(n), oracle.magnetization_dense(n)),
        (states.observable_kinks(n), oracle.kinks_dense(n)),
        (states.observable_correlation(0, 2, n), oracle.correlation_dense(0, 2, n)),
    ]


def check_spectrum(n: int, tol: float = 1e-9) -> CheckResult:
    """Eigenenergy multiset against dense diagonalization."""
    worst = 0.0
    for g in GRID_G:
        for delta in GRID_DELTA:
            params = ModelParams(n=n, g=g, delta=delta)
            spec = dispersion(params)
            dense = np.sort(np.linalg.eigvalsh(oracle.hamiltonian_spin(params)))
            ours = np.sort([eigenenergy(spec, k) for k in range(1 << n)])
            worst = max(worst, float(np.max(np.abs(dense - ours))))
    return CheckResult("spectrum multiset", worst, tol)


def check_diagonalization(n: int, tol: float = 1e-9) -> CheckResult:
    """Frobenius error of U H[diag] U^dag against the dense chain Hamiltonian."""
    worst = 0.0
    for g in GRID_G:
        for delta in GRID_DELTA:
            params = ModelParams(n=n, g=g, delta=delta)
            spec = dispersion(params)
            u = matchgate.assemble_u(params, spec).matrix
            lhs = u @ _diag_hamiltonian(spec) @ u.conj().T
            worst = max(worst, float(np.linalg.norm(lhs - oracle.hamiltonian_spin(params))))
    return CheckResult("diagonalization identity", worst, tol)


def check_compression(n: int, tol: float = 1e-9) -> CheckResult:
    """Majorana conjugation identity between the dense circuit and R."""
    xs = oracle.majoranas(n)
    worst = 0.0
    for g in GRID_G:
        for delta in GRID_DELTA:
            params = ModelParams(n=n, g=g, delta=delta)
            spec = dispersion(params)
            u = matchgate.assemble_u(params, spec).matrix
            r = compressed.assemble_r(params, spec).matrix
            for j in range(2 * n):
                lhs = u.conj().T @ xs[j] @ u
                rhs = np.einsum("k,kab->ab", r[j], np.stack(xs))
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return CheckResult("compression identity", worst, tol)


def check_thermal_expectations(n: int, tol: float) -> CheckResult:
    """Compressed vs dense thermal expectation values on the standard grid."""
    worst = 0.0
    pairs = _observable_pairs(n)
    for g in GRID_G:
        for delta in GRID_DELTA:
            params = ModelParams(n=n, g=g, delta=delta)
            spec = dispersion(params)
            r = compressed.assemble_r(params, spec)
            hbar = oracle.hamiltonian_spin(params)
            for T in GRID_T:
                st = states.thermal_state(spec, T)
                rho = oracle.gibbs(hbar, T)
                for obs_c, obs_d in pairs:
                    a = states.expectation(r, st, obs_c)
                    b = oracle.expectation_dense(rho, obs_d)
                    worst = max(worst, abs(a - b))
    return CheckResult("thermal expectations", worst, tol)


def check_excited_expectations(n: int, tol: float, k_values=None) -> CheckResult:
    """Compressed vs dense eigenstate expectation values."""
    k_values = range(min(16, 1 << n)) if k_values is None else k_values
    worst = 0.0
    pairs = _observable_pairs(n)
    vac = states.vacuum_state(n)
    for g in GRID_G:
        for delta in GRID_DELTA:
            params = ModelParams(n=n, g=g, delta=delta)
            spec = dispersion(params)
            r = compressed.assemble_r(params, spec)
            u = matchgate.assemble_u(params, spec).matrix
            for k in k_values:
                rw = compressed.r_excitation(n, k)
                rtot = compressed.OrthogonalGate(
                    n=n, matrix=r.matrix @ rw.matrix, label="R RW"
                )
                psi = (u @ matchgate.excitation_operator(k, n).matrix)[:, 0]
                dense_state = oracle.DenseState(n=n, vector=psi)
                for obs_c, obs_d in pairs:
                    a = states.expectation(rtot, vac, obs_c)
                    b = oracle.expectation_dense(dense_state, obs_d)
                    worst = max(worst, abs(a - b))
    return CheckResult("excited expectations", worst, tol)


def check_product_state(n: int, tol: float) -> CheckResult:
    """Product-state covariances and pipeline expectations against dense."""
    plus = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
    zero = np.diag([1.0, 0.0]).astype(complex)
    mixed = np.diag([0.5, 0.5]).astype(complex)
    tilted = np.array([[0.75, 0.2 + 0.1j], [0.2 - 0.1j, 0.25]], dtype=complex)
    cases = [
        [zero] * n,
        [plus] + [zero] * (n - 1),
        [mixed] * n,
        [tilted, plus] + [zero] * (n - 2),
    ]
    worst = 0.0
    pairs = _observable_pairs(n)
    for ones in cases:
        st = states.product_state(ones)
        rho = ones[0]
        for q in range(1, n):
            rho = np.kron(rho, ones[q])
        dense = oracle.covariance_dense(oracle.DenseState(n=n, rho=rho))
        worst = max(worst, float(np.max(np.abs(st.S - dense))))
        # full preparation pipeline on the same state
        for g, delta in ((0.8, 0.2), (1.5, 0.0)):
            params = ModelParams(n=n, g=g, delta=delta)
            spec = dispersion(params)
            r = compressed.assemble_r(params, spec)
            u = matchgate.assemble_u(params, spec).matrix
            rho_c = u @ rho @ u.conj().T
            for obs_c, obs_d in pairs:
                a = states.expectation(r, st, obs_c)
                b = oracle.expectation_dense(oracle.DenseState(n=n, rho=rho_c), obs_d)
                worst = max(worst, abs(a - b))
    return CheckResult("product-state covariance", worst, tol)


def check_quench(n: int, tol: float) -> CheckResult:
    """Compressed vs dense Trotterized ramp, both boundary settings."""
    worst = 0.0
    g_max = 10.0
    params = ModelParams(n=n, g=g_max, delta=0.0)
    spec = dispersion(params)
    rg = compressed.assemble_r(params, spec)
    hbar = oracle.hamiltonian_spin(params)
    obs_c = states.observable_kinks(n)
    obs_d = oracle.kinks_dense(n)
    for T in (0.0, 0.5):
        st = states.thermal_state(spec, T)
        rho0 = oracle.gibbs(hbar, T)
        for t, L in ((0.5, 50), (1.5, 150)):
            sched = compressed.QuenchSchedule(g_max=g_max, t=t, L=L)
            for boundary in (False, True):
                rq = compressed.r_quench(n, sched, boundary=boundary)
                rtot = compressed.OrthogonalGate(
                    n=n, matrix=rq.matrix @ rg.matrix, label="RQ R"
                )
                a = states.expectation(rtot, st, obs_c)
                rho_t = oracle.quench_dense(n, sched, rho0, boundary=boundary)
                b = oracle.expectation_dense(rho_t, obs_d)
                worst = max(worst, abs(a - b))
    return CheckResult("quench equivalence", worst, tol)


def check_time_evolution(n: int, tol: float) -> CheckResult:
    """Compressed vs dense exact evolution for three initial states."""
    worst = 0.0
    plus = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
    zero = np.diag([1.0, 0.0]).astype(complex)
    for g, delta in ((1.0, 0.2), (0.7, 0.0)):
        params = ModelParams(n=n, g=g, delta=delta)
        spec = dispersion(params)
        rg = compressed.assemble_r(params, spec).matrix
        hbar = oracle.hamiltonian_spin(params)
        u = matchgate.assemble_u(params, spec).matrix

        prod = states.product_state([plus] + [zero] * (n - 1))
        vec = np.zeros(1 << n, dtype=complex)
        vec[0] = vec[1 << (n - 1)] = 1 / np.sqrt(2)
        psi3 = (u @ matchgate.excitation_operator(3, n).matrix)[:, 0]
        cases = [
            (states.vacuum_state(n).S, "bare", oracle.basis_state(n, 0)),
            (
                compressed.r_excitation(n, 3).matrix @ states.vacuum_state(n).S
                @ compressed.r_excitation(n, 3).matrix.T,
                "eigen",
                oracle.DenseState(n=n, vector=psi3),
            ),
            (prod.S, "bare", oracle.DenseState(n=n, vector=vec)),
        ]
        obs_c = states.observable_magnetization(n)
        obs_d = oracle.magnetization_dense(n)
        for s0, style, dstate in cases:
            for t in (0.1, 1.0, 5.0):
                rw = compressed.r_time_evolution(spec, t).matrix
                m = rg @ rw if style == "eigen" else rg @ rw @ rg.T
                a = states.expectation_from_covariance(m @ s0 @ m.T, obs_c)
                b = oracle.expectation_dense(oracle.evolve_dense(hbar, t, dstate), obs_d)
                worst = max(worst, abs(a - b))
    return CheckResult("time-evolution equivalence", worst, tol)


def run_verification(n: int = 4) -> list[CheckResult]:
    """Full oracle-equivalence suite at one dense-checkable size."""
    if n > oracle.ORACLE_MAX_N:
        raise ValueError(f"verification needs n <= {oracle.ORACLE_MAX_N}")
    tol = 1e-9 if n <= 4 else 1e-8
    results = [
        check_spectrum(n),
        check_diagonalization(n),
        check_compression(n),
        check_thermal_expectations(n, tol),
        check_excited_expectations(n, tol),
        check_product_state(n, tol),
        check_quench(n, tol),
        check_time_evolution(n, tol),
    ]
    return results
