"""Dense construction of the diagonalizing two-qubit-gate circuit.

The circuit factors into a Bogoliubov layer, log2(n) Fourier stages and
fermionic-swap reordering networks.  Dense assembly is only meant for the
small-n cross checks; the permutation bookkeeping, however, is exact at
any size and is reused by the compressed module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams, Spectrum, dispersion

__all__ = [
    "TwoQubitGate",
    "DenseOperator",
    "PermutationSpec",
    "U_MAX_N",
    "bogoliubov_gate",
    "bogoliubov_zero_gate",
    "fourier_gate",
    "fourier_phase",
    "fermionic_swap",
    "permutation_spec",
    "reorder_circuit",
    "reorder_permutation",
    "assemble_u",
    "excitation_operator",
    "apply_circuit",
]

U_MAX_N = 8

_MATCHGATE_ZEROS = np.array(
    [
        [False, True, True, False],
        [True, False, False, True],
        [True, False, False, True],
        [False, True, True, False],
    ]
)


@dataclass(frozen=True)
class TwoQubitGate:
    """A 4x4 gate acting on the qubit pair (p, p+1)."""

    matrix: np.ndarray
    p: int
    label: str
    matchgate: bool = True

    def __post_init__(self):
        m = self.matrix
        if np.max(np.abs(m @ m.conj().T - np.eye(4))) > 1e-12:
            raise ValueError(f"gate {self.label} is not unitary")
        if self.matchgate:
            if np.max(np.abs(m[_MATCHGATE_ZEROS])) > 1e-12:
                raise ValueError(f"gate {self.label} violates the sparsity pattern")
            det_a = m[0, 0] * m[3, 3] - m[0, 3] * m[3, 0]
            det_b = m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
            if abs(det_a - det_b) > 1e-12:
                raise ValueError(f"gate {self.label} has det(A) != det(B)")
        self.matrix.flags.writeable = False


@dataclass(frozen=True)
class DenseOperator:
    """Dense 2**n operator with unitarity/hermiticity verified on construction."""

    n: int
    matrix: np.ndarray
    unitary: bool = True
    hermitian: bool = False

    def __post_init__(self):
        m = self.matrix
        if self.unitary and np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))) > 1e-10:
            raise ValueError("operator is not unitary")
        if self.hermitian and np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise ValueError("operator is not Hermitian")


# ---------------------------------------------------------------------------
# elementary gates


def bogoliubov_gate(spec: Spectrum, l: int) -> TwoQubitGate:
    """Mode-pair mixing gate for modes (l, n-l), placed at qubits (2*r_l, 2*r_l+1)."""
    n = spec.params.n
    if not 1 <= l <= n // 2 - 1:
        raise ValueError(f"mode index out of range: {l}")
    u, v = spec.u[l], spec.v[l]
    m = np.array(
        [
            [u, 0, 0, 1j * v],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [1j * v, 0, 0, u],
        ],
        dtype=complex,
    )
    return TwoQubitGate(matrix=m, p=2 * r_of_mode(n, l), label=f"B{l}")


def bogoliubov_zero_gate(params: ModelParams) -> TwoQubitGate:
    """Gate for the self-paired modes (0, n/2): identity above the critical
    field, X(x)Z below it (where it stops being a matchgate)."""
    if params.g >= 1.0 + params.delta:
        return TwoQubitGate(matrix=np.eye(4, dtype=complex), p=0, label="B0")
    m = np.kron(np.array([[0, 1], [1, 0]]), np.diag([1.0, -1.0])).astype(complex)
    return TwoQubitGate(matrix=m, p=0, label="B0", matchgate=False)


def fourier_phase(m: int, l: int, s: int) -> float:
    """Phase fraction phi(l, s) built from the top s bits of the pair index l."""
    phi = 0.0
    for j in range(s):
        phi += 2.0 ** (j - s) * ((l >> (m - 2 - j)) & 1)
    return phi


def fourier_gate(m: int, l: int, s: int) -> TwoQubitGate:
    """Stage-s Fourier mixing gate at qubit pair (2l, 2l+1).

    The relative phase exp(-i*pi*phi(l, s)) between the two mixed modes is
    the one that makes the assembled circuit diagonalize the chain; the
    cross check against the dense reference pins its sign.
    """
    if not 0 <= s <= m - 1:
        raise ValueError(f"stage out of range: {s}")
    if not 0 <= l < (1 << (m - 1)):
        raise ValueError(f"pair index out of range: {l}")
    a = np.exp(-1j * np.pi * fourier_phase(m, l, s))
    r = 1.0 / np.sqrt(2.0)
    mat = np.array(
        [
            [1, 0, 0, 0],
            [0, -a * r, r, 0],
            [0, a * r, r, 0],
            [0, 0, 0, -a],
        ],
        dtype=complex,
    )
    return TwoQubitGate(matrix=mat, p=2 * l, label=f"F{l}^{s}")


def fermionic_swap(p: int) -> TwoQubitGate:
    """Adjacent mode swap carrying the -1 on the doubly occupied state."""
    m = np.array(
        [
            [1, 0, 0, 0],
            [0, 0, 1, 0],
            [0, 1, 0, 0],
            [0, 0, 0, -1],
        ],
        dtype=complex,
    )
    return TwoQubitGate(matrix=m, p=p, label=f"S{p}")


# ---------------------------------------------------------------------------
# permutation bookkeeping


def r_of_mode(n: int, l: int) -> int:
    """Position of the pair (l, n-l) in the Bogoliubov ordering."""
    return l // 2 if l % 2 == 0 else (n - 1 - l) // 2


def _insert_zero_bit(value: int, pos: int) -> int:
    high = value >> pos
    low = value & ((1 << pos) - 1)
    return (high << (pos + 1)) | low


def r_pair_index(m: int, l: int, s: int) -> int:
    """Lower mode index mixed by the stage-s gate at pair l."""
    return _insert_zero_bit(l, m - s - 1)


def _bit_reverse(value: int, m: int) -> int:
    out = 0
    for _ in range(m):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


def stage_order(m: int, s: int) -> np.ndarray:
    """Qubit-to-mode assignment used while the stage-s gates act."""
    n = 1 << m
    lam = np.empty(n, dtype=int)
    for l in range(n // 2):
        r = r_pair_index(m, l, s)
        lam[2 * l] = r
        lam[2 * l + 1] = r + (1 << (m - s - 1))
    return lam


def bogoliubov_order(n: int) -> np.ndarray:
    """Qubit-to-mode assignment pairing (l, n-l) and (0, n/2)."""
    lam = np.empty(n, dtype=int)
    lam[0], lam[1] = 0, n // 2
    for l in range(1, n // 2):
        r = r_of_mode(n, l)
        lam[2 * r] = l
        lam[2 * r + 1] = n - l
    return lam


def sigma_indices(n: int) -> np.ndarray:
    """Alternating index sequence around n/2 that generates the Bogoliubov order."""
    j = np.arange(n // 2)
    return n // 2 + np.where(j % 2 == 0, j, -j)


def omega_stage(m: int, s: int) -> list[tuple[int, int]]:
    """Disjoint position pairs swapped between stages s-1 and s (1 <= s <= m-1)."""
    if not 1 <= s <= m - 1:
        raise ValueError(f"stage out of range: {s}")
    pairs = []
    width = m - s - 1
    for r in range(1 << (m - 2)):
        high = r >> width
        low = r & ((1 << width) - 1)
        z1 = (high << (m - s + 1)) | (1 << (m - s)) | (low << 1)
        z2 = (high << (m - s + 1)) | (low << 1) | 1
        pairs.append((z1, z2))
    return pairs


def omega_transpose(m: int, t: int) -> list[tuple[int, int]]:
    """Disjoint position pairs that swap bit t with bit m-1-t."""
    if not 0 <= t < m // 2:
        raise ValueError(f"bit-swap index out of range: {t}")
    hi, lo = m - 1 - t, t
    pairs = []
    rest = [b for b in range(m) if b not in (hi, lo)]
    for r in range(1 << (m - 2)):
        base = 0
        for i, b in enumerate(rest):
            if (r >> i) & 1:
                base |= 1 << b
        pairs.append((base | (1 << lo), base | (1 << hi)))
    return pairs


@dataclass(frozen=True)
class PermutationSpec:
    """All mode orderings and swap sets used by the circuit for one size."""

    n: int
    m: int
    lambda_bog: np.ndarray
    lambda_s: list[np.ndarray]
    lambda_prime: np.ndarray
    sigma: np.ndarray
    omega_s: dict[int, list[tuple[int, int]]]
    omega_t: dict[int, list[tuple[int, int]]]
    r_l: np.ndarray


def permutation_spec(params: ModelParams) -> PermutationSpec:
    n, m = params.n, params.m
    lambda_s = [np.arange(n)] + [stage_order(m, s) for s in range(m)]
    return PermutationSpec(
        n=n,
        m=m,
        lambda_bog=bogoliubov_order(n),
        lambda_s=lambda_s,
        lambda_prime=np.array([_bit_reverse(p, m) for p in range(n)]),
        sigma=sigma_indices(n),
        omega_s={s: omega_stage(m, s) for s in range(1, m)},
        omega_t={t: omega_transpose(m, t) for t in range(m // 2)},
        r_l=np.array([r_of_mode(n, l) for l in range(n // 2)]),
    )


def _transposition_swaps(j: int, k: int) -> list[int]:
    """Adjacent-swap positions (application order) realizing the transposition
    of positions j < k while restoring everything in between."""
    down = list(range(k - 1, j - 1, -1))
    up = list(range(j + 1, k))
    return down + up


def reorder_circuit(which: str, m: int, s: int | None = None) -> list[TwoQubitGate]:
    """Fermionic-swap list (application order) for one reordering network.

    ``which`` selects the network: "bog" prepares the Bogoliubov pairing,
    "s" (with stage s) moves stage s-1 to stage s, "s0" prepares stage 0
    from the natural order and "sm" undoes the final bit reversal.
    """
    n = 1 << m
    swaps: list[int] = []
    if which == "bog":
        sig = sigma_indices(n)
        for j in range(n // 2 - 1, 0, -1):
            a, b = sorted((int(sig[0]), int(sig[j])))
            swaps.extend(_transposition_swaps(a, b))
    elif which == "s":
        if s is None:
            raise ValueError("stage index required for the 's' network")
        for j, k in omega_stage(m, s):
            a, b = sorted((j, k))
            swaps.extend(_transposition_swaps(a, b))
    elif which == "s0":
        for stage in range(m - 1, 0, -1):
            swaps.extend(g.p for g in reorder_circuit("s", m, stage))
    elif which == "sm":
        for t in range(m // 2):
            for j, k in omega_transpose(m, t):
                a, b = sorted((j, k))
                swaps.extend(_transposition_swaps(a, b))
    else:
        raise ValueError(f"unknown reordering selector: {which}")
    return [fermionic_swap(p) for p in swaps]


def reorder_permutation(gates: list[TwoQubitGate], n: int) -> np.ndarray:
    """Apply a swap list to the identity index vector."""
    vec = np.arange(n)
    for g in gates:
        p = g.p
        vec[p], vec[p + 1] = vec[p + 1], vec[p]
    return vec


# ---------------------------------------------------------------------------
# dense assembly


def _apply_gate_matrix(op: np.ndarray, gate: TwoQubitGate, n: int) -> np.ndarray:
    """Left-multiply a dense operator by a two-qubit gate at (p, p+1)."""
    p = gate.p
    dim = 1 << n
    op = op.reshape(1 << p, 4, (dim >> p) >> 2, dim)
    out = np.einsum("ij,ajbc->aibc", gate.matrix, op)
    return out.reshape(dim, dim)


def apply_circuit(gates: list[TwoQubitGate], n: int) -> np.ndarray:
    """Dense product of a gate list given in application order."""
    op = np.eye(1 << n, dtype=complex)
    for g in gates:
        op = _apply_gate_matrix(op, g, n)
    return op


def bogoliubov_circuit(spec: Spectrum) -> list[TwoQubitGate]:
    """All mode-pair gates of the Bogoliubov layer (disjoint targets)."""
    n = spec.params.n
    gates = [bogoliubov_zero_gate(spec.params)]
    gates += [bogoliubov_gate(spec, l) for l in range(1, n // 2)]
    return gates


def fourier_circuit(m: int, s: int) -> list[TwoQubitGate]:
    """All pair gates of Fourier stage s (disjoint targets)."""
    return [fourier_gate(m, l, s) for l in range(1 << (m - 1))]


def circuit_factors(spec: Spectrum) -> list[tuple[str, list[TwoQubitGate]]]:
    """The labelled factors of the full circuit in application order."""
    params = spec.params
    m = params.m
    bog = reorder_circuit("bog", m)
    factors = [
        ("Sbog", bog),
        ("B", bogoliubov_circuit(spec)),
        ("Sbog^T", list(reversed(bog))),
        ("S0", reorder_circuit("s0", m)),
    ]
    for s in range(m):
        factors.append((f"F{s}", fourier_circuit(m, s)))
        if s + 1 <= m - 1:
            factors.append((f"S{s + 1}", reorder_circuit("s", m, s + 1)))
    factors.append(("Sm", reorder_circuit("sm", m)))
    return factors


def assemble_u(params: ModelParams, spec: Spectrum | None = None) -> DenseOperator:
    """Dense diagonalizing circuit, for n small enough to afford it."""
    if params.n > U_MAX_N:
        raise ValueError(f"dense assembly is capped at n = {U_MAX_N}, got {params.n}")
    spec = spec if spec is not None else dispersion(params)
    gates = [g for _, fgates in circuit_factors(spec) for g in fgates]
    return DenseOperator(n=params.n, matrix=apply_circuit(gates, params.n))


def excitation_operator(k: int, n: int) -> DenseOperator:
    """Product of X flips taking the all-zero state to basis state k
    (qubit j is flipped when bit n-1-j of k is set)."""
    if n > U_MAX_N:
        raise ValueError(f"dense assembly is capped at n = {U_MAX_N}, got {n}")
    if not 0 <= k < (1 << n):
        raise ValueError(f"basis index out of range: {k}")
    from .oracle import pauli_string

    ops = {j: "X" for j in range(n) if (k >> (n - 1 - j)) & 1}
    return DenseOperator(n=n, matrix=pauli_string(n, ops), hermitian=True)
