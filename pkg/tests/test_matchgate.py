import numpy as np
import pytest

from xychain import matchgate, oracle
from xychain.model import ModelParams, dispersion, eigenenergy


def diag_hamiltonian(spec):
    n = spec.params.n
    h = np.zeros((1 << n, 1 << n), dtype=complex)
    for j in range(n):
        h -= 0.5 * spec.eps[j] * oracle.pauli_string(n, {j: "Z"})
    return h


def apply_swaps(gates, vec):
    vec = np.array(vec)
    for g in gates:
        vec[[g.p, g.p + 1]] = vec[[g.p + 1, g.p]]
    return vec


# ---------------------------------------------------------------------------
# elementary gates


def test_bogoliubov_gate_trivial_angle_is_identity():
    spec = dispersion(ModelParams(n=8, g=3.0, delta=1.0))  # all theta = 0
    assert np.all(spec.theta == 0.0)
    for l in range(1, 4):
        g = matchgate.bogoliubov_gate(spec, l)
        np.testing.assert_allclose(g.matrix, np.eye(4), atol=1e-15)


def test_bogoliubov_gate_pi_angle_pairs_vacuum_with_double_occupation():
    spec = dispersion(ModelParams(n=8, g=1.0, delta=1.0))
    assert spec.theta[1] == pytest.approx(np.pi)
    g = matchgate.bogoliubov_gate(spec, 1)
    expected = np.zeros((4, 4), dtype=complex)
    expected[1, 1] = expected[2, 2] = 1.0
    expected[3, 0] = expected[0, 3] = 1.0j
    np.testing.assert_allclose(g.matrix, expected, atol=1e-12)


def test_bogoliubov_gate_example_placement_and_range():
    spec = dispersion(ModelParams(n=4, g=1.0, delta=0.0))
    g = matchgate.bogoliubov_gate(spec, 1)
    assert g.p == 2 * matchgate.r_of_mode(4, 1) == 2
    assert g.matrix[0, 0] == pytest.approx(np.cos(spec.theta[1] / 2.0))
    with pytest.raises(ValueError):
        matchgate.bogoliubov_gate(spec, 0)
    with pytest.raises(ValueError):
        matchgate.bogoliubov_gate(spec, 2)


@pytest.mark.parametrize(
    "g,delta,is_identity",
    [(2.0, 0.2, True), (1.2, 0.2, True), (0.5, 0.2, False)],
)
def test_bogoliubov_zero_gate_branches(g, delta, is_identity):
    gate = matchgate.bogoliubov_zero_gate(ModelParams(n=8, g=g, delta=delta))
    if is_identity:
        np.testing.assert_allclose(gate.matrix, np.eye(4))
        assert gate.matchgate
    else:
        xz = np.kron(np.array([[0, 1], [1, 0]]), np.diag([1.0, -1.0]))
        np.testing.assert_allclose(gate.matrix, xz)
        assert not gate.matchgate


def test_fourier_gate_phase_and_forms():
    # empty phase sum at stage 0
    for l in range(4):
        assert matchgate.fourier_phase(3, l, 0) == 0.0
        g = matchgate.fourier_gate(3, l, 0)
        assert g.matrix[3, 3] == pytest.approx(-1.0)
    # l = 0b10, m = 3, s = 1 picks up the half phase
    assert matchgate.fourier_phase(3, 2, 1) == pytest.approx(0.5)
    g = matchgate.fourier_gate(3, 2, 1)
    assert g.matrix[3, 3] == pytest.approx(1.0j)  # -exp(-i pi/2)


def test_fourier_gate_matchgate_condition():
    for m in (2, 3, 4):
        for s in range(m):
            for l in range(1 << (m - 1)):
                mat = matchgate.fourier_gate(m, l, s).matrix
                det_a = mat[0, 0] * mat[3, 3] - mat[0, 3] * mat[3, 0]
                det_b = mat[1, 1] * mat[2, 2] - mat[1, 2] * mat[2, 1]
                assert abs(det_a - det_b) < 1e-12


def test_fermionic_swap_properties():
    s = matchgate.fermionic_swap(0).matrix
    np.testing.assert_allclose(s @ s, np.eye(4), atol=1e-15)
    assert s[3, 3] == -1.0
    assert s[2, 1] == 1.0 and s[1, 2] == 1.0


def test_emitted_gates_are_matchgates_except_flagged_zero_mode():
    for g, delta in ((0.5, 0.2), (2.0, 0.0)):
        spec = dispersion(ModelParams(n=8, g=g, delta=delta))
        for _, gates in matchgate.circuit_factors(spec):
            for gate in gates:
                if not gate.matchgate:
                    assert gate.label == "B0" and g < 1.0 + delta


# ---------------------------------------------------------------------------
# reordering networks


@pytest.mark.parametrize("n", [4, 8, 16, 64, 256, 1024])
def test_reorder_networks_hit_their_targets(n):
    params = ModelParams(n=n, g=1.0, delta=0.0)
    m = params.m
    ps = matchgate.permutation_spec(params)

    assert np.array_equal(
        apply_swaps(matchgate.reorder_circuit("bog", m), np.arange(n)), ps.lambda_bog
    )
    assert np.array_equal(
        apply_swaps(matchgate.reorder_circuit("s0", m), np.arange(n)), ps.lambda_s[1]
    )
    for s in range(1, m):
        got = apply_swaps(matchgate.reorder_circuit("s", m, s), ps.lambda_s[s])
        assert np.array_equal(got, ps.lambda_s[s + 1])
    got = apply_swaps(matchgate.reorder_circuit("sm", m), ps.lambda_prime)
    assert np.array_equal(got, np.arange(n))


@pytest.mark.parametrize("n", [8, 16, 128])
def test_permutation_spec_invariants(n):
    params = ModelParams(n=n, g=1.0, delta=0.0)
    ps = matchgate.permutation_spec(params)
    assert ps.lambda_bog[0] == 0 and ps.lambda_bog[1] == n // 2
    for l in range(1, n // 2):
        r = ps.r_l[l]
        assert ps.lambda_bog[2 * r] == l and ps.lambda_bog[2 * r + 1] == n - l
    for lam in ps.lambda_s + [ps.lambda_bog, ps.lambda_prime]:
        assert sorted(lam) == list(range(n))
    for pairs in list(ps.omega_s.values()) + list(ps.omega_t.values()):
        flat = [i for pair in pairs for i in pair]
        assert len(pairs) == n // 4
        assert len(set(flat)) == len(flat)


def test_stage_zero_composes_later_stages():
    params = ModelParams(n=16, g=1.0, delta=0.0)
    m = params.m
    id_vec = np.arange(16)
    composed = id_vec
    for s in range(m - 1, 0, -1):
        composed = apply_swaps(matchgate.reorder_circuit("s", m, s), composed)
    direct = apply_swaps(matchgate.reorder_circuit("s0", m), id_vec)
    assert np.array_equal(direct, composed)


# ---------------------------------------------------------------------------
# dense assembly


@pytest.mark.parametrize("g", [0.5, 1.0, 1.2, 2.0])
@pytest.mark.parametrize("delta", [0.0, 0.2, 1.0])
def test_assembled_circuit_diagonalizes_the_chain(g, delta):
    params = ModelParams(n=4, g=g, delta=delta)
    spec = dispersion(params)
    u = matchgate.assemble_u(params, spec)
    assert u.unitary
    lhs = u.matrix @ diag_hamiltonian(spec) @ u.matrix.conj().T
    assert np.linalg.norm(lhs - oracle.hamiltonian_spin(params)) < 1e-9


def test_assembled_circuit_diagonalizes_at_n8():
    for g, delta in ((0.9, 0.3), (1.2, 0.2), (2.0, 1.0)):
        params = ModelParams(n=8, g=g, delta=delta)
        spec = dispersion(params)
        u = matchgate.assemble_u(params, spec).matrix
        lhs = u @ diag_hamiltonian(spec) @ u.conj().T
        assert np.linalg.norm(lhs - oracle.hamiltonian_spin(params)) < 1e-9


def test_columns_are_eigenvectors_with_mode_word_energies():
    params = ModelParams(n=4, g=0.8, delta=0.2)
    spec = dispersion(params)
    u = matchgate.assemble_u(params, spec).matrix
    hbar = oracle.hamiltonian_spin(params)
    for idx in range(16):
        word = int(f"{idx:04b}"[::-1], 2)  # statevector index -> mode word
        vec = u[:, idx]
        np.testing.assert_allclose(
            hbar @ vec, eigenenergy(spec, word) * vec, atol=1e-9
        )


def test_assemble_rejects_large_n():
    with pytest.raises(ValueError):
        matchgate.assemble_u(ModelParams(n=16, g=1.0, delta=0.0))


def test_excitation_operator_properties():
    n = 4
    ident = matchgate.excitation_operator(0, n).matrix
    np.testing.assert_allclose(ident, np.eye(16))
    zero = np.zeros(16)
    zero[0] = 1.0
    for k in (1, 3, 9, 15):
        w = matchgate.excitation_operator(k, n).matrix
        got = w @ zero
        assert got[k] == pytest.approx(1.0)
        np.testing.assert_allclose(w @ w, np.eye(16), atol=1e-15)
