"""Pauli-string algebra against dense linear algebra."""

import itertools

import numpy as np
import pytest

from ansatzforge.paulis import PAULI, PauliHamiltonian, _string_action


def random_state(rng, n):
    vec = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return vec / np.linalg.norm(vec)


def dense_string(string):
    """Kronecker build with qubit 0 as the least significant bit."""
    mat = np.ones((1, 1), dtype=complex)
    for op in reversed(string):
        mat = np.kron(mat, PAULI[op])
    return mat


@pytest.mark.parametrize("string", ["X", "Y", "Z", "XY", "ZZ", "IXYZ", "YYXZ"])
def test_string_action_matches_dense_matrix(string, rng):
    n = len(string)
    perm, phase = _string_action(string, n)
    state = random_state(rng, n)
    via_action = (phase * state)[perm]
    assert np.allclose(via_action, dense_string(string) @ state, atol=1e-12)


def test_every_two_qubit_string_applies_correctly(rng):
    state = random_state(rng, 2)
    for pair in itertools.product("IXYZ", repeat=2):
        string = "".join(pair)
        ham = PauliHamiltonian([(1.0, string)])
        assert np.allclose(ham.apply(state), dense_string(string) @ state, atol=1e-12)


def test_qubit_zero_is_least_significant_bit():
    # X on qubit 0 of |00> must set basis index 1, not index 2
    ham = PauliHamiltonian([(1.0, "XI")])
    state = np.zeros(4, dtype=complex)
    state[0] = 1.0
    flipped = ham.apply(state)
    assert flipped[1] == 1.0
    assert np.count_nonzero(flipped) == 1


def test_expectation_of_z_on_basis_states():
    z = PauliHamiltonian([(1.0, "Z")])
    up = np.array([1.0, 0.0], dtype=complex)
    down = np.array([0.0, 1.0], dtype=complex)
    assert z.expectation(up) == pytest.approx(1.0, abs=1e-12)
    assert z.expectation(down) == pytest.approx(-1.0, abs=1e-12)


def test_expectation_rejects_unnormalized_state():
    z = PauliHamiltonian([(1.0, "Z")])
    with pytest.raises(ValueError, match="norm"):
        z.expectation(np.array([1.0, 1.0], dtype=complex))


def test_expectation_matches_dense_quadratic_form(rng):
    terms = [(0.3, "XZY"), (-1.2, "ZZI"), (0.7, "IYX"), (0.25, "III")]
    ham = PauliHamiltonian(terms)
    mat = sum(c * dense_string(s) for c, s in terms)
    for _ in range(5):
        state = random_state(rng, 3)
        expected = np.vdot(state, mat @ state).real
        assert ham.expectation(state) == pytest.approx(expected, abs=1e-12)


def test_duplicate_terms_merge_and_cancellations_drop():
    ham = PauliHamiltonian([(1.0, "ZZ"), (2.0, "ZZ"), (0.5, "XX"), (-0.5, "XX")])
    assert ham.terms == ((3.0, "ZZ"),)


def test_empty_hamiltonian_needs_explicit_size():
    with pytest.raises(ValueError):
        PauliHamiltonian([])
    zero = PauliHamiltonian([], n_qubits=3)
    assert zero.dim == 8
    assert len(zero) == 0
    energy, vec = zero.ground_state()
    assert energy == 0.0
    assert np.linalg.norm(vec) == pytest.approx(1.0)


def test_rejects_bad_strings_and_complex_coefficients():
    with pytest.raises(ValueError):
        PauliHamiltonian([(1.0, "AB")])
    with pytest.raises(ValueError):
        PauliHamiltonian([(1.0, "XX"), (1.0, "XXX")])
    with pytest.raises(ValueError):
        PauliHamiltonian([(1.0 + 0.5j, "X")])
    # a tiny imaginary dust from an upstream projection is tolerated
    ham = PauliHamiltonian([(1.0 + 1e-14j, "X")])
    assert ham.terms == ((1.0, "X"),)


def test_ground_state_of_ising_pair():
    ham = PauliHamiltonian([(1.0, "ZZ")])
    energy, vec = ham.ground_state()
    assert energy == pytest.approx(-1.0, abs=1e-12)
    assert ham.expectation(vec) == pytest.approx(-1.0, abs=1e-12)


def test_matrix_is_cached_and_capped():
    ham = PauliHamiltonian([(1.0, "ZZ")])
    assert ham.matrix() is ham.matrix()
    big = PauliHamiltonian([(1.0, "I" * 11)])
    with pytest.raises(ValueError, match="10 qubits"):
        big.matrix()


def test_addition_and_scaling(rng):
    a = PauliHamiltonian([(1.0, "XZ"), (0.5, "YY")])
    b = PauliHamiltonian([(-1.0, "XZ"), (2.0, "ZI")])
    total = a + b
    assert np.allclose(total.matrix(), a.matrix() + b.matrix())
    assert np.allclose((2.5 * a).matrix(), 2.5 * a.matrix())
    assert np.allclose((a * -1).matrix(), -a.matrix())
    with pytest.raises(ValueError):
        a + PauliHamiltonian([(1.0, "X")])


def test_apply_rejects_wrong_shape():
    ham = PauliHamiltonian([(1.0, "ZZ")])
    with pytest.raises(ValueError, match="shape"):
        ham.apply(np.zeros(3, dtype=complex))
