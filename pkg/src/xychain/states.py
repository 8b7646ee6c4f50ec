"""Covariance-matrix states, quadratic observables and expectation values.

A state enters the compressed pipeline only through the real antisymmetric
matrix S with entries tr(-i x_r x_s rho); an observable enters through the
real antisymmetric coefficient matrix C of A = i sum C_jk x_j x_k.  The
expectation value of A on the state prepared by a transform R is then the
real trace pairing tr(C R S R^T).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .compressed import OrthogonalGate
from .model import Spectrum

__all__ = [
    "CovarianceState",
    "QuadraticObservable",
    "thermal_state",
    "vacuum_state",
    "product_state",
    "observable_magnetization",
    "observable_kinks",
    "observable_correlation",
    "observable_generic",
    "expectation",
    "expectation_from_covariance",
]


@dataclass(frozen=True)
class CovarianceState:
    """Antisymmetric two-point matrix S_rs = tr(-i x_r x_s rho)."""

    n: int
    S: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        if self.S.shape != (2 * self.n, 2 * self.n):
            raise ValueError(f"expected shape {(2 * self.n,) * 2}, got {self.S.shape}")
        if np.max(np.abs(self.S + self.S.T)) > 1e-12:
            raise ValueError("covariance matrix is not antisymmetric")
        if np.linalg.norm(self.S, 2) > 1.0 + 1e-10:
            raise ValueError("covariance matrix exceeds unit spectral norm")
        self.S.flags.writeable = False


@dataclass(frozen=True)
class QuadraticObservable:
    """Coefficient matrix C of the quadratic observable i sum C_jk x_j x_k."""

    n: int
    C: np.ndarray
    label: str

    def __post_init__(self):
        if self.C.shape != (2 * self.n, 2 * self.n):
            raise ValueError(f"expected shape {(2 * self.n,) * 2}, got {self.C.shape}")
        if np.max(np.abs(self.C + self.C.T)) > 1e-12:
            raise ValueError("coefficient matrix is not antisymmetric")
        self.C.flags.writeable = False


def _pair_blocks(n: int, values: np.ndarray) -> np.ndarray:
    """Antisymmetric matrix with the given values at entries (2l, 2l+1)."""
    S = np.zeros((2 * n, 2 * n))
    idx = np.arange(0, 2 * n, 2)
    S[idx, idx + 1] = values
    S[idx + 1, idx] = -values
    return S


def thermal_state(spec: Spectrum, T: float) -> CovarianceState:
    """Mode-diagonal thermal covariance with blocks tanh(eps_l / 2T)."""
    if T < 0.0:
        raise ValueError(f"temperature must be >= 0, got {T}")
    eps = spec.eps
    if T == 0.0:
        vals = np.where(eps > 0.0, 1.0, 0.0)
    else:
        vals = np.tanh(eps / (2.0 * T))
    return CovarianceState(n=spec.params.n, S=_pair_blocks(spec.params.n, vals))


def vacuum_state(n: int) -> CovarianceState:
    """Covariance of the all-empty (all spins up) product state."""
    return CovarianceState(n=n, S=_pair_blocks(n, np.ones(n)))


def product_state(onebody: list[np.ndarray]) -> CovarianceState:
    """Covariance of an arbitrary product of single-qubit density matrices.

    Built from the local Bloch components; entries between sites a < b are
    (string of <Z> factors) times the transverse components at the ends.
    """
    n = len(onebody)
    mx = np.empty(n)
    my = np.empty(n)
    mz = np.empty(n)
    for q, rho in enumerate(onebody):
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (2, 2):
            raise ValueError(f"site {q}: expected a 2x2 density matrix")
        if abs(np.trace(rho) - 1.0) > 1e-10 or np.max(np.abs(rho - rho.conj().T)) > 1e-10:
            raise ValueError(f"site {q}: not a valid density matrix")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise ValueError(f"site {q}: not positive semidefinite")
        mx[q] = (rho[0, 1] + rho[1, 0]).real
        my[q] = (1j * (rho[0, 1] - rho[1, 0])).real
        mz[q] = (rho[0, 0] - rho[1, 1]).real

    S = np.zeros((2 * n, 2 * n))
    idx = np.arange(0, 2 * n, 2)
    S[idx, idx + 1] = mz
    # left factor of x_{2a+alpha} x_{2b+beta} carries an extra Z at site a
    left = {0: -my, 1: mx}
    right = {0: mx, 1: my}
    for a in range(n):
        string = 1.0
        for b in range(a + 1, n):
            for alpha in (0, 1):
                for beta in (0, 1):
                    S[2 * a + alpha, 2 * b + beta] = left[alpha][a] * string * right[beta][b]
            string *= mz[b]
            if string == 0.0:
                break
    S = np.triu(S)
    S = S - S.T
    return CovarianceState(n=n, S=S)


def observable_magnetization(n: int) -> QuadraticObservable:
    """Mean transverse polarization (1/n) sum_j Z_j."""
    return QuadraticObservable(n=n, C=_pair_blocks(n, np.full(n, -0.5 / n)), label="M")


def observable_kinks(n: int) -> QuadraticObservable:
    """Mean nearest-neighbour XX alignment over the open chain."""
    C = np.zeros((2 * n, 2 * n))
    idx = np.arange(1, 2 * n - 2, 2)
    C[idx, idx + 1] = -0.5 / (n - 1)
    C[idx + 1, idx] = 0.5 / (n - 1)
    return QuadraticObservable(n=n, C=C, label="K")


def observable_correlation(j: int, k: int, n: int) -> QuadraticObservable:
    """String correlator X_j Z ... Z X_k between sites j < k."""
    if not 0 <= j < k < n:
        raise ValueError(f"need 0 <= j < k < n, got j={j}, k={k}")
    C = np.zeros((2 * n, 2 * n))
    C[2 * j + 1, 2 * k] = -0.5
    C[2 * k, 2 * j + 1] = 0.5
    return QuadraticObservable(n=n, C=C, label=f"C({j},{k})")


def observable_generic(C: np.ndarray, label: str = "A") -> QuadraticObservable:
    """Wrap an arbitrary real antisymmetric coefficient matrix."""
    C = np.array(C, dtype=float)
    return QuadraticObservable(n=C.shape[0] // 2, C=C, label=label)


def expectation(R: OrthogonalGate, state: CovarianceState, obs: QuadraticObservable) -> float:
    """tr(C R S R^T) for the state prepared from S by the transform R."""
    if not R.n == state.n == obs.n:
        raise ValueError(
            f"dimension mismatch: R has n={R.n}, state n={state.n}, observable n={obs.n}"
        )
    w = R.matrix @ state.S @ R.matrix.T
    return expectation_from_covariance(w, obs)


def expectation_from_covariance(cov: np.ndarray, obs: QuadraticObservable) -> float:
    """tr(C W) for an already-evolved covariance matrix W."""
    if cov.shape != obs.C.shape:
        raise ValueError(f"dimension mismatch: {cov.shape} vs {obs.C.shape}")
    return float(np.sum(obs.C * cov.T))
