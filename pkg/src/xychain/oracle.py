"""Dense 2**n reference implementation (n <= 8).

Everything the compressed pipeline produces is recomputed here with full
state vectors / density matrices and explicit Pauli strings, so the two
routes share no linear-algebra shortcuts.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .compressed import QuenchSchedule
from .model import ModelParams

__all__ = [
    "DenseState",
    "ORACLE_MAX_N",
    "majoranas",
    "hamiltonian_spin",
    "hamiltonian_field",
    "hamiltonian_coupling",
    "magnetization_dense",
    "kinks_dense",
    "correlation_dense",
    "basis_state",
    "gibbs",
    "expectation_dense",
    "covariance_dense",
    "quench_dense",
    "evolve_dense",
]

ORACLE_MAX_N = 8

_ID = np.eye(2, dtype=complex)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_PAULI = {"I": _ID, "X": _X, "Y": _Y, "Z": _Z}


def _check_size(n: int) -> None:
    if n > ORACLE_MAX_N:
        raise ValueError(f"dense oracle is capped at n = {ORACLE_MAX_N}, got {n}")


def pauli_string(n: int, ops: dict[int, str]) -> np.ndarray:
    """Dense operator with the given single-qubit Paulis, identity elsewhere.

    Qubit 0 is the most significant bit of the state index.
    """
    out = np.ones((1, 1), dtype=complex)
    for q in range(n):
        out = np.kron(out, _PAULI[ops.get(q, "I")])
    return out


@lru_cache(maxsize=16)
def majoranas(n: int) -> tuple[np.ndarray, ...]:
    """The 2n dense Majorana operators in the Jordan-Wigner representation."""
    _check_size(n)
    ms = []
    for k in range(n):
        string = {q: "Z" for q in range(k)}
        ms.append(pauli_string(n, {**string, k: "X"}))
        ms.append(pauli_string(n, {**string, k: "Y"}))
    return tuple(ms)


@dataclass(frozen=True)
class DenseState:
    """A 2**n state vector or density matrix, validated on construction."""

    n: int
    vector: np.ndarray | None = None
    rho: np.ndarray | None = None

    def __post_init__(self):
        if (self.vector is None) == (self.rho is None):
            raise ValueError("exactly one of vector/rho must be given")
        if self.vector is not None:
            if abs(np.linalg.norm(self.vector) - 1.0) > 1e-10:
                raise ValueError("state vector is not normalized")
        else:
            rho = self.rho
            if abs(np.trace(rho) - 1.0) > 1e-10:
                raise ValueError("density matrix trace differs from 1")
            if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
                raise ValueError("density matrix is not Hermitian")
            if np.linalg.eigvalsh(rho).min() < -1e-10:
                raise ValueError("density matrix is not positive semidefinite")

    def density(self) -> np.ndarray:
        if self.rho is not None:
            return self.rho
        return np.outer(self.vector, self.vector.conj())


def basis_state(n: int, index: int) -> DenseState:
    """Computational basis state with the given vector index (qubit 0 = MSB)."""
    _check_size(n)
    v = np.zeros(1 << n, dtype=complex)
    v[index] = 1.0
    return DenseState(n=n, vector=v)


def hamiltonian_field(n: int, g: float) -> np.ndarray:
    """Transverse-field part -g * sum_j Z_j."""
    _check_size(n)
    h = np.zeros((1 << n, 1 << n), dtype=complex)
    for q in range(n):
        h -= g * pauli_string(n, {q: "Z"})
    return h


def hamiltonian_coupling(n: int, delta: float = 0.0, boundary: bool = False) -> np.ndarray:
    """Open-chain coupling -sum_j (X_j X_{j+1} + delta Y_j Y_{j+1}).

    With ``boundary`` the fermionic boundary term (strings through all
    qubits) is appended, matching the periodic fermion picture.
    """
    _check_size(n)
    h = np.zeros((1 << n, 1 << n), dtype=complex)
    for q in range(n - 1):
        h -= pauli_string(n, {q: "X", q + 1: "X"})
        if delta != 0.0:
            h -= delta * pauli_string(n, {q: "Y", q + 1: "Y"})
    if boundary:
        zall = pauli_string(n, {q: "Z" for q in range(n)})
        xn = zall @ pauli_string(n, {0: "X"})
        yn = zall @ pauli_string(n, {0: "Y"})
        h -= pauli_string(n, {n - 1: "X"}) @ xn
        if delta != 0.0:
            h -= delta * pauli_string(n, {n - 1: "Y"}) @ yn
    return h


def hamiltonian_spin(params: ModelParams) -> np.ndarray:
    """Full chain Hamiltonian with the fermionic boundary term included."""
    return hamiltonian_field(params.n, params.g) + hamiltonian_coupling(
        params.n, params.delta, boundary=True
    )


def magnetization_dense(n: int) -> np.ndarray:
    """(1/n) sum_j Z_j."""
    _check_size(n)
    out = np.zeros((1 << n, 1 << n), dtype=complex)
    for q in range(n):
        out += pauli_string(n, {q: "Z"})
    return out / n


def kinks_dense(n: int) -> np.ndarray:
    """(1/(n-1)) sum_j X_j X_{j+1} over the open chain."""
    _check_size(n)
    out = np.zeros((1 << n, 1 << n), dtype=complex)
    for q in range(n - 1):
        out += pauli_string(n, {q: "X", q + 1: "X"})
    return out / (n - 1)


def correlation_dense(j: int, k: int, n: int) -> np.ndarray:
    """X_j Z_{j+1} ... Z_{k-1} X_k for j < k."""
    _check_size(n)
    if not 0 <= j < k < n:
        raise ValueError(f"need 0 <= j < k < n, got j={j}, k={k}, n={n}")
    ops = {q: "Z" for q in range(j + 1, k)}
    return pauli_string(n, {**ops, j: "X", k: "X"})


def gibbs(H: np.ndarray, T: float) -> DenseState:
    """Normalized exp(-H/T); T = 0 returns the ground-space projector."""
    if T < 0.0:
        raise ValueError(f"temperature must be >= 0, got {T}")
    n = int(np.log2(H.shape[0]))
    evals, evecs = np.linalg.eigh(H)
    if T == 0.0:
        mask = evals - evals[0] < 1e-10
        w = mask.astype(float)
    else:
        w = np.exp(-(evals - evals[0]) / T)
    w /= w.sum()
    rho = (evecs * w) @ evecs.conj().T
    return DenseState(n=n, rho=rho)


def expectation_dense(state: DenseState, observable: np.ndarray) -> float:
    """tr(rho A); the imaginary part must vanish."""
    if observable.shape[0] != (1 << state.n):
        raise ValueError("observable dimension does not match the state")
    if state.vector is not None:
        val = complex(state.vector.conj() @ (observable @ state.vector))
    else:
        val = complex(np.trace(state.rho @ observable))
    if abs(val.imag) > 1e-10:
        raise ValueError(f"expectation value has imaginary part {val.imag}")
    return val.real


def covariance_dense(state: DenseState) -> np.ndarray:
    """Majorana covariance tr(-i x_r x_s rho) evaluated with dense operators."""
    xs = majoranas(state.n)
    rho = state.density()
    d = len(xs)
    S = np.zeros((d, d))
    for r in range(d):
        rho_xr = rho @ xs[r]
        for s in range(d):
            if r == s:
                continue
            # tr(x_r x_s rho) = tr(rho x_r x_s) = sum((rho x_r) * x_s^T)
            val = -1.0j * np.sum(rho_xr * xs[s].T)
            S[r, s] = val.real
    return S


def quench_dense(
    n: int,
    sched: QuenchSchedule,
    initial: DenseState,
    boundary: bool = False,
) -> DenseState:
    """Trotterized field ramp applied to a dense state.

    Each of the L+1 steps applies exp(-i H_field(g_l) D) exp(-i H_coup D)
    with D = t/(L+1), mirroring the factor order of the compressed quench
    gate.
    """
    _check_size(n)
    hc = hamiltonian_coupling(n, 0.0, boundary=boundary)
    evals, evecs = np.linalg.eigh(hc)
    uc = (evecs * np.exp(-1.0j * evals * sched.delta)) @ evecs.conj().T
    zdiag = np.zeros(1 << n)
    for q in range(n):
        zdiag += np.real(np.diag(pauli_string(n, {q: "Z"})))
    rho = initial.density().copy()
    for gl in sched.g_values:
        # field part is diagonal: exp(-i * (-g Z) D) = exp(i g D z)
        phase = np.exp(1.0j * gl * sched.delta * zdiag)
        step = phase[:, None] * uc
        rho = step @ rho @ step.conj().T
    return DenseState(n=n, rho=rho)


def evolve_dense(H: np.ndarray, t: float, state: DenseState) -> DenseState:
    """Exact dense evolution exp(-iHt) via Hermitian eigendecomposition."""
    evals, evecs = np.linalg.eigh(H)
    u = (evecs * np.exp(-1.0j * evals * t)) @ evecs.conj().T
    if state.vector is not None:
        return DenseState(n=state.n, vector=u @ state.vector)
    return DenseState(n=state.n, rho=u @ state.rho @ u.conj().T)


def time_evolution_product(spec_eps: np.ndarray, t: float, n: int) -> np.ndarray:
    """Mode-local form of exp(-i H t) in the diagonal basis: a product of
    single-qubit Z rotations with angles eps_j * t."""
    _check_size(n)
    out = np.ones((1, 1), dtype=complex)
    for j in range(n):
        out = np.kron(out, scipy.linalg.expm(0.5j * spec_eps[j] * t * _Z))
    return out
