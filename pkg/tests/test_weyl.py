import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quditstab.errors import SizeGuardError
from quditstab.gf import all_vectors, symplectic_product
from quditstab.weyl import (
    PauliElement,
    commutation_phase,
    group_elements,
    pauli_dagger,
    pauli_matrix,
    pauli_mul,
    pauli_pow,
    weyl_matrix,
)


def omega(p):
    return np.exp(2j * np.pi / p)


def clock_shift_oracle(x, p):
    """W_x built from single-qudit shift X|q> = |q+1> and clock Z|q> = w^q |q>."""
    n = len(x) // 2
    X = np.roll(np.eye(p), 1, axis=0)
    Z = np.diag(omega(p) ** np.arange(p))
    inv2 = (p + 1) // 2
    out = np.eye(1)
    for i in range(n):
        v, w = x[i], x[n + i]
        # W_{v,w} = tau^{vw} X^w Z^v on one qudit
        local = omega(p) ** (inv2 * v * w % p) * np.linalg.matrix_power(X, w) @ np.linalg.matrix_power(Z, v)
        out = np.kron(out, local)
    return out


def test_single_qudit_matrices():
    w = omega(3)
    assert np.allclose(weyl_matrix([1, 0], 3), np.diag([1, w, w**2]), atol=1e-12)
    shift = np.zeros((3, 3))
    shift[[1, 2, 0], [0, 1, 2]] = 1
    assert np.allclose(weyl_matrix([0, 1], 3), shift, atol=1e-12)


@pytest.mark.parametrize("p,n", [(3, 1), (3, 2), (5, 1)])
def test_weyl_matrix_matches_tensor_of_clock_and_shift(p, n):
    for x in all_vectors(p, 2 * n):
        assert np.abs(weyl_matrix(x, p) - clock_shift_oracle(x, p)).max() <= 1e-12


def test_trace_orthogonality():
    p, n = 3, 1
    labels = all_vectors(p, 2 * n)
    for x in labels:
        for y in labels:
            tr = np.trace(weyl_matrix(y, p).conj().T @ weyl_matrix(x, p))
            assert abs(tr - (p**n if np.array_equal(x, y) else 0)) <= 1e-12


def test_pauli_mul_examples():
    a = PauliElement(3, 0, (1, 0))
    b = PauliElement(3, 0, (0, 1))
    c = pauli_mul(a, b)
    assert c.phase_exp == 2 and c.label == (1, 1)
    assert pauli_mul(a, PauliElement.identity(1, 3)) == a
    x = PauliElement(5, 0, (1, 2, 3, 4))
    assert pauli_mul(x, PauliElement(5, 0, (4, 3, 2, 1))) == PauliElement.identity(2, 5)


def test_pow_and_dagger_examples():
    a = PauliElement(3, 1, (1, 1))
    assert pauli_pow(a, 2) == PauliElement(3, 2, (2, 2))
    assert pauli_pow(a, 3) == PauliElement.identity(1, 3)
    assert pauli_dagger(pauli_dagger(a)) == a
    assert pauli_dagger(a) == PauliElement(3, 2, (2, 2))


def labels(p, n):
    return st.lists(st.integers(0, p - 1), min_size=2 * n, max_size=2 * n)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([3, 5]), st.integers(1, 2), st.data())
def test_symbolic_product_matches_matrices(p, n, data):
    a = PauliElement(p, data.draw(st.integers(0, p - 1)), tuple(data.draw(labels(p, n))))
    b = PauliElement(p, data.draw(st.integers(0, p - 1)), tuple(data.draw(labels(p, n))))
    assert np.abs(pauli_matrix(a) @ pauli_matrix(b) - pauli_matrix(pauli_mul(a, b))).max() <= 1e-12
    m = data.draw(st.integers(-3, 7))
    assert np.abs(np.linalg.matrix_power(pauli_matrix(a), m % p) - pauli_matrix(pauli_pow(a, m))).max() <= 1e-12
    assert np.abs(pauli_matrix(a).conj().T - pauli_matrix(pauli_dagger(a))).max() <= 1e-12


def test_all_products_n1_and_random_n2():
    p = 3
    w = omega(p)
    for x in all_vectors(p, 2):
        for y in all_vectors(p, 2):
            c = pauli_mul(PauliElement(p, 0, tuple(x)), PauliElement(p, 0, tuple(y)))
            lhs = weyl_matrix(x, p) @ weyl_matrix(y, p)
            assert np.abs(lhs - w**c.phase_exp * weyl_matrix(c.label, p)).max() <= 1e-12
    rng = np.random.default_rng(0)
    for _ in range(50):
        x, y = rng.integers(0, p, 4), rng.integers(0, p, 4)
        c = pauli_mul(PauliElement(p, 0, tuple(x)), PauliElement(p, 0, tuple(y)))
        lhs = weyl_matrix(x, p) @ weyl_matrix(y, p)
        assert np.abs(lhs - w**c.phase_exp * weyl_matrix(c.label, p)).max() <= 1e-12


def test_commutation_phase():
    p = 3
    rng = np.random.default_rng(1)
    for _ in range(40):
        x, y = rng.integers(0, p, 4), rng.integers(0, p, 4)
        c = commutation_phase(x, y, p)
        assert c == symplectic_product(x, y, p)
        Wx, Wy = weyl_matrix(x, p), weyl_matrix(y, p)
        assert np.abs(Wx @ Wy - omega(p) ** c * Wy @ Wx).max() <= 1e-12


def test_labels_are_periodic_mod_p():
    p = 5
    rng = np.random.default_rng(2)
    for _ in range(10):
        x = rng.integers(0, p, 4)
        z = rng.integers(-3, 4, 4)
        assert np.array_equal(weyl_matrix(x, p), weyl_matrix(x + p * z, p))


def test_commuting_iff_generator_matrices_symmetric():
    p, n = 3, 2
    rng = np.random.default_rng(3)
    for _ in range(100):
        X = rng.integers(0, p, (n, 2 * n))
        V, W = X[:, :n].T, X[:, n:].T
        commute = all(symplectic_product(X[i], X[j], p) == 0 for i in range(n) for j in range(n))
        assert commute == (not ((V.T @ W - W.T @ V) % p).any())


def test_group_elements_count():
    gens = [PauliElement(3, 1, (1, 0, 0, 0)), PauliElement(3, 0, (0, 0, 0, 1))]
    elems = group_elements(gens)
    assert len(elems) == 9 and len({e.label for e in elems}) == 9


def test_weyl_matrix_guard():
    with pytest.raises(SizeGuardError):
        weyl_matrix(np.zeros(18, dtype=int), 3)
