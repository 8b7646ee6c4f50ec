"""Compressed 2n x 2n orthogonal gates and their assembly.

Every two-qubit gate of the dense circuit conjugates the 2n Majorana
operators by a real orthogonal matrix; products of gates multiply those
matrices in the same order.  This module builds the orthogonal factor of
each circuit layer, the assembled transform R(g, delta), the quench and
time-evolution transforms, and the elementary-gate cost accounting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import matchgate
from .model import ModelParams, Spectrum, dispersion

__all__ = [
    "OrthogonalGate",
    "QuenchSchedule",
    "GateCostReport",
    "R_MAX_N",
    "r_from_quadratic",
    "r_of_gate",
    "r_bogoliubov",
    "r_fourier_stage",
    "r_swap",
    "r_reorder",
    "r_reorder_naive",
    "assemble_r",
    "r_excitation",
    "r_excitation_modes",
    "r_quench",
    "quench_covariance",
    "r_time_evolution",
    "gate_cost",
]

R_MAX_N = 1 << 14

# local Majoranas of a qubit pair: X1, Y1, Z X2, Z Y2
_XLOC = [
    np.kron(np.array([[0, 1], [1, 0]]), np.eye(2)).astype(complex),
    np.kron(np.array([[0, -1j], [1j, 0]]), np.eye(2)),
    np.kron(np.diag([1.0, -1.0]), np.array([[0, 1], [1, 0]])).astype(complex),
    np.kron(np.diag([1.0, -1.0]), np.array([[0, -1j], [1j, 0]])),
]


@dataclass(frozen=True)
class OrthogonalGate:
    """Dense real orthogonal matrix on the 2n Majorana indices."""

    n: int
    matrix: np.ndarray
    label: str
    det_sign: int = field(init=False)

    def __post_init__(self):
        m = self.matrix
        if m.shape != (2 * self.n, 2 * self.n):
            raise ValueError(f"{self.label}: expected shape {(2 * self.n,) * 2}, got {m.shape}")
        if np.max(np.abs(m.T @ m - np.eye(2 * self.n))) > 1e-10:
            raise ValueError(f"{self.label}: matrix is not orthogonal")
        object.__setattr__(self, "det_sign", int(round(np.linalg.det(m))))
        m.flags.writeable = False


def _check_n(n: int) -> None:
    if n > R_MAX_N:
        raise ValueError(f"dense orthogonal gates are capped at n = {R_MAX_N}, got {n}")


def r_from_quadratic(h: np.ndarray, alpha: float) -> OrthogonalGate:
    """exp(4*alpha*h) for a real antisymmetric generator h."""
    if np.max(np.abs(h + h.T)) > 1e-12:
        raise ValueError("generator is not antisymmetric")
    n2 = h.shape[0]
    return OrthogonalGate(n=n2 // 2, matrix=scipy.linalg.expm(4.0 * alpha * h), label="exp")


def r_of_gate(gate4: np.ndarray) -> np.ndarray:
    """4x4 Majorana conjugation block of a parity-preserving two-qubit gate.

    R[j, k] = tr(G^dag x_j G x_k) / 4 on the pair's local Majoranas.
    """
    gd = gate4.conj().T
    r = np.empty((4, 4))
    for j in range(4):
        a = gd @ _XLOC[j] @ gate4
        for k in range(4):
            val = np.sum(a * _XLOC[k].T) / 4.0
            if abs(val.imag) > 1e-12:
                raise ValueError("gate does not conjugate Majoranas to real combinations")
            r[j, k] = val.real
    return r


# ---------------------------------------------------------------------------
# structured application helpers (all O(n^2))


def _apply_blockdiag_left(blocks: np.ndarray, mat: np.ndarray) -> np.ndarray:
    """Left-multiply by a block-diagonal matrix of consecutive 4x4 blocks."""
    d = mat.shape[0]
    out = np.einsum("bij,bjk->bik", blocks, mat.reshape(d // 4, 4, d))
    return out.reshape(d, d)


def _perm_matrix(perm: np.ndarray) -> np.ndarray:
    """Permutation matrix P with P e_col = e_perm[col]."""
    d = perm.shape[0]
    p = np.zeros((d, d))
    p[perm, np.arange(d)] = 1.0
    return p


def _mode_perm_to_majorana(perm_modes: np.ndarray) -> np.ndarray:
    """Lift a permutation of the n mode indices to the 2n Majorana indices."""
    out = np.empty(2 * perm_modes.shape[0], dtype=int)
    out[0::2] = 2 * perm_modes
    out[1::2] = 2 * perm_modes + 1
    return out


# ---------------------------------------------------------------------------
# circuit factors


def _bog_blocks(spec: Spectrum) -> np.ndarray:
    """Consecutive 4x4 blocks of the Bogoliubov layer in Majorana space.

    Each block is the conjugation action of the corresponding mode-pair
    gate; this orientation (the transpose of the exp(4h) form) is the one
    the dense cross check fixes.
    """
    n = spec.params.n
    blocks = np.zeros((n // 2, 4, 4))
    for l in range(n // 2):
        p = matchgate.r_of_mode(n, l)
        if l == 0:
            blocks[p] = np.eye(4)
            continue
        c = np.cos(spec.theta[l] / 2.0)
        s = np.sin(spec.theta[l] / 2.0)
        blocks[p] = np.array(
            [
                [c, 0, 0, s],
                [0, c, s, 0],
                [0, -s, c, 0],
                [-s, 0, 0, c],
            ]
        )
    return blocks


def _b0_diagonal(n: int) -> np.ndarray:
    """Diagonal +-1 conjugation signs of the below-critical zero-mode gate."""
    d = -np.ones(2 * n)
    d[[0, 2, 3]] = 1.0
    return d


def r_bogoliubov(spec: Spectrum, params: ModelParams | None = None) -> OrthogonalGate:
    """Orthogonal factor of the full Bogoliubov layer."""
    params = params if params is not None else spec.params
    n = params.n
    _check_n(n)
    mat = np.zeros((2 * n, 2 * n))
    blocks = _bog_blocks(spec)
    for p in range(n // 2):
        mat[4 * p : 4 * p + 4, 4 * p : 4 * p + 4] = blocks[p]
    if params.g < 1.0 + params.delta:
        mat = mat * _b0_diagonal(n)[None, :]
    return OrthogonalGate(n=n, matrix=mat, label="RB")


def _fourier_blocks(m: int, s: int) -> np.ndarray:
    """Consecutive 4x4 Majorana blocks of Fourier stage s."""
    n = 1 << m
    blocks = np.empty((n // 2, 4, 4))
    for l in range(n // 2):
        blocks[l] = r_of_gate(matchgate.fourier_gate(m, l, s).matrix)
    return blocks


def r_fourier_stage(m: int, s: int) -> OrthogonalGate:
    """Orthogonal factor of Fourier stage s."""
    n = 1 << m
    _check_n(n)
    blocks = _fourier_blocks(m, s)
    mat = np.zeros((2 * n, 2 * n))
    for l in range(n // 2):
        mat[4 * l : 4 * l + 4, 4 * l : 4 * l + 4] = blocks[l]
    return OrthogonalGate(n=n, matrix=mat, label=f"RF{s}")


def r_swap(n: int, j: int, k: int) -> OrthogonalGate:
    """Orthogonal factor of the mode transposition (j, k)."""
    if j == k:
        raise ValueError("swap indices must differ")
    if not 0 <= j < k < n:
        raise ValueError(f"need 0 <= j < k < n, got j={j}, k={k}")
    perm = np.arange(n)
    perm[[j, k]] = perm[[k, j]]
    return OrthogonalGate(
        n=n, matrix=_perm_matrix(_mode_perm_to_majorana(perm)), label=f"RS({j},{k})"
    )


def _swap_bits(value: int, a: int, b: int) -> int:
    if ((value >> a) ^ (value >> b)) & 1:
        value ^= (1 << a) | (1 << b)
    return value


def reorder_mode_permutation(m: int, which: str, s: int | None = None) -> np.ndarray:
    """Mode-index permutation of a reordering network in compact form.

    The array p satisfies R e_q = e_p[q] for the network's orthogonal
    factor restricted to mode space.
    """
    n = 1 << m
    if which == "s":
        if s is None or not 1 <= s <= m - 1:
            raise ValueError(f"stage out of range: {s}")
        return np.array([_swap_bits(q, 0, m - s) for q in range(n)])
    if which == "sm":
        return np.array([matchgate._bit_reverse(q, m) for q in range(n)])
    if which == "s0":
        perm = np.arange(n)
        # product over stages 1..m-1, rightmost factor (stage m-1) first
        for stage in range(m - 1, 0, -1):
            stage_perm = reorder_mode_permutation(m, "s", stage)
            perm = stage_perm[perm]
        return perm
    if which == "bog":
        half = 1 << (m - 1)
        quarter_mask = (1 << max(m - 2, 0)) - 1
        perm = np.arange(n)
        for q in range(n):
            top = (q >> (m - 1)) & 1
            low = q & 1
            mid = (q >> 1) & quarter_mask
            if top == low:
                continue
            if top == 0:  # odd mode below n/2 -> even mode >= n/2, middle complemented
                perm[q] = half | ((quarter_mask ^ mid) << 1)
            else:  # even mode >= n/2 -> odd mode < n/2, middle complemented then incremented
                perm[q] = ((((quarter_mask ^ mid) + 1) & quarter_mask) << 1) | 1
        return perm
    raise ValueError(f"unknown reordering selector: {which}")


def r_reorder(m: int, which: str, s: int | None = None) -> OrthogonalGate:
    """Compact orthogonal factor of a reordering network."""
    n = 1 << m
    _check_n(n)
    perm = reorder_mode_permutation(m, which, s)
    label = f"R{which}" + (f"({s})" if s is not None else "")
    return OrthogonalGate(n=n, matrix=_perm_matrix(_mode_perm_to_majorana(perm)), label=label)


def r_reorder_naive(m: int, which: str, s: int | None = None) -> OrthogonalGate:
    """Same factor built as the explicit product of mode transpositions."""
    n = 1 << m
    _check_n(n)
    mat = np.eye(2 * n)
    if which == "s":
        for j, k in matchgate.omega_stage(m, s):
            mat = mat @ r_swap(n, *sorted((j, k))).matrix
    elif which == "sm":
        for t in range(m // 2 - 1, -1, -1):
            for j, k in matchgate.omega_transpose(m, t):
                mat = mat @ r_swap(n, *sorted((j, k))).matrix
    elif which == "s0":
        for stage in range(1, m):
            mat = mat @ r_reorder_naive(m, "s", stage).matrix
    elif which == "bog":
        sig = matchgate.sigma_indices(n)
        for j in range(1, n // 2):
            mat = mat @ r_swap(n, *sorted((int(sig[0]), int(sig[j])))).matrix
    else:
        raise ValueError(f"unknown reordering selector: {which}")
    label = f"R{which}-naive" + (f"({s})" if s is not None else "")
    return OrthogonalGate(n=n, matrix=mat, label=label)


def _inverse_perm(perm: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.shape[0])
    return inv


def assemble_r(params: ModelParams, spec: Spectrum | None = None) -> OrthogonalGate:
    """Full compressed transform of the diagonalizing circuit.

    Factors are composed in circuit order with permutations applied as
    index gathers and the mixing layers as block-diagonal products, so
    assembly costs O(n^2 log n).  For a permutation factor P with
    P e_q = e_p[q], (P M)[r, :] = M[inv(p)[r], :] and
    (P^T M)[r, :] = M[p[r], :].
    """
    n, m = params.n, params.m
    _check_n(n)
    spec = spec if spec is not None else dispersion(params)

    def majorana_perm(which: str, s: int | None = None) -> np.ndarray:
        return _mode_perm_to_majorana(reorder_mode_permutation(m, which, s))

    bog = majorana_perm("bog")
    mat = _perm_matrix(bog)
    mat = _apply_blockdiag_left(_bog_blocks(spec), mat)
    if params.g < 1.0 + params.delta:
        mat = _b0_diagonal(n)[:, None] * mat
    mat = mat[bog, :]  # transposed Bogoliubov reordering
    mat = mat[_inverse_perm(majorana_perm("s0")), :]
    for s in range(m):
        mat = _apply_blockdiag_left(_fourier_blocks(m, s), mat)
        if s + 1 <= m - 1:
            mat = mat[_inverse_perm(majorana_perm("s", s + 1)), :]
    mat = mat[_inverse_perm(majorana_perm("sm")), :]
    return OrthogonalGate(n=n, matrix=np.ascontiguousarray(mat), label="R")


def r_excitation(n: int, k: int) -> OrthogonalGate:
    """Diagonal +-1 transform of the X-flip product for basis state k."""
    _check_n(n)
    if not 0 <= k < (1 << n):
        raise ValueError(f"basis index out of range: {k}")
    flips = np.array([(k >> (n - 1 - j)) & 1 for j in range(n)])
    return _excitation_from_flips(n, flips, label=f"RW({k})")


def r_excitation_modes(n: int, mode_word: int) -> OrthogonalGate:
    """Same transform addressed by mode word (bit l flips mode l)."""
    _check_n(n)
    if not 0 <= mode_word < (1 << n):
        raise ValueError(f"mode word out of range: {mode_word}")
    flips = np.array([(mode_word >> j) & 1 for j in range(n)])
    return _excitation_from_flips(n, flips, label=f"RWm({mode_word})")


def _excitation_from_flips(n: int, flips: np.ndarray, label: str) -> OrthogonalGate:
    # sign at Majorana r is the flip parity over qubits j with 2j < r
    cum = np.concatenate([[0], np.cumsum(flips)])
    diag = np.empty(2 * n)
    diag[0::2] = (-1.0) ** cum[:-1]
    diag[1::2] = (-1.0) ** cum[1:]
    return OrthogonalGate(n=n, matrix=np.diag(diag), label=label)


# ---------------------------------------------------------------------------
# quench and time evolution


@dataclass(frozen=True)
class QuenchSchedule:
    """Linear field ramp from g_max to 0 in L+1 steps of length t/(L+1)."""

    g_max: float
    t: float
    L: int
    delta: float = field(init=False)

    def __post_init__(self):
        if self.t <= 0.0 or self.L < 1:
            raise ValueError("quench needs t > 0 and L >= 1")
        object.__setattr__(self, "delta", self.t / (self.L + 1))

    @property
    def g_values(self) -> np.ndarray:
        l = np.arange(self.L + 1)
        return self.g_max * (1.0 - l / self.L)

    @classmethod
    def for_time(cls, g_max: float, t: float, steps_per_unit: float = 100.0) -> "QuenchSchedule":
        """Default step rule L = round(steps_per_unit * t)."""
        return cls(g_max=g_max, t=t, L=max(1, round(steps_per_unit * t)))


def _rotate_slices(a: np.ndarray, b: np.ndarray, scratch: np.ndarray, c: float, s: float) -> None:
    """In-place plane rotation of two equal-shape row blocks."""
    np.copyto(scratch, a)
    a *= c
    a += s * b
    b *= c
    b -= s * scratch


def _rotate_boundary(mat: np.ndarray, c: float, s: float, axis: int) -> None:
    """Plane rotation of the wrap-around pair (last row, first row)."""
    a = mat[-1] if axis == 0 else mat[:, -1]
    b = mat[0] if axis == 0 else mat[:, 0]
    tmp = a.copy()
    a *= c
    a += s * b
    b *= c
    b -= s * tmp


def _quench_accumulate(
    n: int,
    sched: QuenchSchedule,
    mat: np.ndarray,
    boundary: bool = False,
    observer=None,
    conjugate: bool = False,
) -> np.ndarray:
    """Apply the ramp factors to ``mat`` in place (rows only, or congruence).

    The field factor rotates row pairs (2j, 2j+1) and the coupling factor
    pairs (2j+1, 2j+2); both are consecutive, so the updates run on
    reshaped views.
    """
    d = sched.delta
    c1, s1 = np.cos(2.0 * d), np.sin(2.0 * d)
    nn = 2 * n

    # strided row/column views of the rotation pairs (always true views)
    fa, fb = mat[0::2], mat[1::2]
    ka, kb = mat[1 : nn - 1 : 2], mat[2::2]
    scratch = np.empty((n, nn))
    if conjugate:
        ca_, cb_ = mat[:, 0::2], mat[:, 1::2]
        cka, ckb = mat[:, 1 : nn - 1 : 2], mat[:, 2::2]
        cscratch = np.empty((nn, n))

    for l, gl in enumerate(sched.g_values):
        c0, s0 = np.cos(2.0 * gl * d), np.sin(2.0 * gl * d)
        _rotate_slices(ka, kb, scratch[: n - 1], c1, s1)
        if boundary:
            _rotate_boundary(mat, c1, s1, axis=0)
        _rotate_slices(fa, fb, scratch, c0, s0)
        if conjugate:
            _rotate_slices(cka, ckb, cscratch[:, : n - 1], c1, s1)
            if boundary:
                _rotate_boundary(mat, c1, s1, axis=1)
            _rotate_slices(ca_, cb_, cscratch, c0, s0)
        if observer is not None:
            observer(l, mat)
    return mat


def r_quench(n: int, sched: QuenchSchedule, boundary: bool = False) -> OrthogonalGate:
    """Compressed transform of the Trotterized field ramp."""
    _check_n(n)
    mat = _quench_accumulate(n, sched, np.eye(2 * n), boundary=boundary)
    return OrthogonalGate(n=n, matrix=mat, label=f"RQ(t={sched.t})")


def quench_covariance(
    n: int,
    sched: QuenchSchedule,
    cov: np.ndarray,
    boundary: bool = False,
    observer=None,
) -> np.ndarray:
    """Evolve a covariance matrix through the ramp by congruence updates.

    ``observer(l, cov)`` is invoked after every step when given; the array
    passed to it is the live buffer and must not be mutated.
    """
    _check_n(n)
    out = np.array(cov, dtype=float, copy=True)
    return _quench_accumulate(n, sched, out, boundary=boundary, observer=observer, conjugate=True)


def r_time_evolution(spec: Spectrum, t: float) -> OrthogonalGate:
    """Block-diagonal mode rotations by angles eps_j * t."""
    n = spec.params.n
    _check_n(n)
    mat = np.zeros((2 * n, 2 * n))
    c = np.cos(spec.eps * t)
    s = np.sin(spec.eps * t)
    idx = np.arange(0, 2 * n, 2)
    mat[idx, idx] = c
    mat[idx + 1, idx + 1] = c
    mat[idx, idx + 1] = s
    mat[idx + 1, idx] = -s
    return OrthogonalGate(n=n, matrix=mat, label=f"RW(t={t})")


# ---------------------------------------------------------------------------
# elementary-gate accounting


def _controlled_cost(controls: int) -> int:
    """Elementary gates for a single-qubit operation with the given number
    of controls: 1 for <= 1 control, linear in the control count beyond."""
    if controls <= 1:
        return 1
    return 6 * (controls - 1)


@dataclass(frozen=True)
class GateCostReport:
    """Elementary one- and two-qubit gate counts per compressed factor."""

    n: int
    m: int
    per_factor: dict[str, int]

    @property
    def total(self) -> int:
        return sum(self.per_factor.values())

    @property
    def fourier_total(self) -> int:
        keys = ("fourier_stages", "reorder_s", "reorder_s0", "reorder_sm")
        return sum(self.per_factor[k] for k in keys)


def gate_cost(params: ModelParams) -> GateCostReport:
    """Count elementary gates of the compressed circuit factor by factor.

    The diagonal of the Bogoliubov layer needs n/2 - 1 single-qubit gates
    controlled on m-1 qubits, which dominates everything else at
    O(n log n).
    """
    n, m = params.n, params.m
    per = {
        # V_B, V_B^dag and the diagonal of the Bogoliubov layer
        "bogoliubov": 2 + (n // 2 - 1) * _controlled_cost(m - 1),
        # R_G, V_F, V_F^dag per stage plus 2s two-controlled phase gates
        "fourier_stages": sum(3 + 2 * s * _controlled_cost(2) for s in range(m)),
        "reorder_s": m - 1,
        "reorder_s0": m - 1,
        "reorder_sm": m // 2,
        # two controlled middle-register operations (complement and
        # complement-plus-increment) plus the outer two-qubit frame
        "reorder_bog": 2 * (2 + 2 * (m - 2) * _controlled_cost(2) + sum(_controlled_cost(2 + j) for j in range(max(m - 3, 0)))),
    }
    if params.g < 1.0 + params.delta:
        per["bogoliubov_zero"] = 2 * m
    return GateCostReport(n=n, m=m, per_factor=per)
