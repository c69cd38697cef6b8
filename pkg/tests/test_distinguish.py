import numpy as np
import pytest

from quditstab.distinguish import (
    acceptance_probability,
    acceptance_probability_dense,
    algorithm3,
    compute_m,
    cubic_phase_gate,
    doped_circuit,
    fourier_gate,
    haar_concentration_experiment,
    is_clifford_gate,
    multiplier_gate,
    phase_gate,
    povm_sample,
    random_clifford_circuit,
    random_haar_gate,
    run,
    sigma_p2,
    sum_gate,
    swap_operator_dense,
)
from quditstab.errors import SizeGuardError
from quditstab.gf import all_vectors
from quditstab.stab import random_group, stabilizer_fidelity_bruteforce, state_closed_form, unsigned_stabilizer_group
from quditstab.state import RngStream, basis_state, haar_random
from quditstab.weyl import weyl_matrix


def clifford_oracle(U, p):
    """U W_x U^dag is a multiple of some W_y for every x: scan all y."""
    k = round(np.log(U.shape[0]) / np.log(p))
    Ws = [weyl_matrix(y, p) for y in all_vectors(p, 2 * k)]
    for x in all_vectors(p, 2 * k):
        C = U @ weyl_matrix(x, p) @ U.conj().T
        if not any(abs(abs(np.trace(W.conj().T @ C)) - p**k) <= 1e-9 for W in Ws):
            return False
    return True


def test_gate_examples():
    for p in (3, 5):
        gates = [fourier_gate(p), phase_gate(p), multiplier_gate(p, 2), sum_gate(p), np.eye(p)]
        for U in gates:
            assert np.abs(U @ U.conj().T - np.eye(len(U))).max() <= 1e-12
            assert is_clifford_gate(U, p) and clifford_oracle(U, p)
        assert not is_clifford_gate(cubic_phase_gate(p), p)
        assert not clifford_oracle(cubic_phase_gate(p), p)
    with pytest.raises(ValueError):
        multiplier_gate(3, 0)


def test_random_gates_agree_with_oracle():
    for i in range(5):
        U = random_haar_gate(3, RngStream(1, i))
        assert is_clifford_gate(U, 3) == clifford_oracle(U, 3) == False  # noqa: E712


def test_acceptance_probability_examples():
    for i in range(10):
        psi = state_closed_form(random_group(3, 2, RngStream(2, i)))
        assert abs(acceptance_probability(psi) - 1) <= 1e-9
    # uniform p_psi plug-in: sum p^2 = p^{-2n} gives 1/2 + p^{-n}/2
    p, n = 3, 2
    assert abs(0.5 + 0.5 * p**n * p ** (2 * n) * p ** (-4 * n) - (0.5 + 0.5 * p**-n)) <= 1e-15
    for i in range(10):
        P = acceptance_probability(haar_random(2, 3, RngStream(3, i)))
        assert 0.5 <= P <= 1


def test_dense_oracle_matches_shortcut():
    V = swap_operator_dense(3, 1)
    assert np.abs(V @ V - np.eye(81)).max() <= 1e-9
    assert np.abs(V - V.conj().T).max() <= 1e-9
    for i in range(10):
        psi = haar_random(1, 3, RngStream(4, i))
        assert abs(acceptance_probability_dense(psi) - acceptance_probability(psi)) <= 1e-9
    with pytest.raises(SizeGuardError):
        swap_operator_dense(3, 2)


def test_povm_sample():
    stab = state_closed_form(random_group(3, 2, RngStream(5)))
    rs = RngStream(6)
    assert all(povm_sample(stab, rs) for _ in range(200))
    psi = haar_random(1, 3, RngStream(7))
    P = acceptance_probability(psi)
    N = 10_000
    rate = np.mean([povm_sample(psi, rs, P) for _ in range(N)])
    assert abs(rate - P) <= 0.02
    a = [povm_sample(psi, RngStream(8), P) for _ in range(5)]
    b = [povm_sample(psi, RngStream(8), P) for _ in range(5)]
    assert a == b


def test_compute_m():
    assert compute_m(1, 0.01) == 96
    assert 4 * compute_m(1, 0.01) == 384
    with pytest.raises(ValueError):
        compute_m(0.5, 0.1)


def test_algorithm3_stabiliser_and_haar():
    for i in range(10):
        res = algorithm3(state_closed_form(random_group(3, 3, RngStream(9, i))), 1, 0.01, RngStream(10, i))
        assert res.verdict == "high_fidelity" and res.X == 1.0 and res.copies == 384
        res = algorithm3(haar_random(3, 3, RngStream(11, i)), 1, 0.01, RngStream(12, i))
        assert res.verdict == "haar"


def test_algorithm3_statistic_mean():
    psi = haar_random(1, 3, RngStream(13))
    P = acceptance_probability(psi)
    xs = [algorithm3(psi, 1, 0.01, RngStream(14, i)).X for i in range(400)]
    sd = np.sqrt(4 * P * (1 - P) / 96 / 400)
    assert abs(np.mean(xs) - (2 * P - 1)) <= 4 * sd


def test_clifford_circuit_unitary_is_clifford():
    for i in range(5):
        C = random_clifford_circuit(3, 2, 10, RngStream(15, i))
        assert is_clifford_gate(C.unitary(), 3)


def test_doped_t0_is_stabiliser_state():
    for i in range(10):
        psi = run(doped_circuit(3, 3, 0, 15, "cubic-phase", RngStream(16, i)))
        assert unsigned_stabilizer_group(psi).dim == 3
        assert abs(acceptance_probability(psi) - 1) <= 1e-9


def test_doped_t1_dimension_and_fidelity():
    for i in range(10):
        psi = run(doped_circuit(3, 3, 1, 15, "cubic-phase", RngStream(17, i)))
        assert unsigned_stabilizer_group(psi).dim >= 1
    for i in range(5):
        psi = run(doped_circuit(3, 2, 1, 10, "random-haar", RngStream(18, i)))
        value, _ = stabilizer_fidelity_bruteforce(psi)
        assert value >= 3**-2 - 1e-12


def test_run_starts_from_zero():
    circ = doped_circuit(3, 2, 0, 0, "cubic-phase", RngStream(19))
    assert np.array_equal(run(circ).amps, basis_state([0, 0], 3).amps)


def test_haar_concentration():
    rs = RngStream(20)
    medians = []
    for n in (2, 3, 4):
        rep = haar_concentration_experiment(3, n, 20, rs)
        assert np.all(rep.sigma_p2 >= 3 ** (-2 * n) - 1e-15)
        medians.append(np.median(rep.sigma_p2))
    assert medians[0] > medians[1] > medians[2]
    psi = haar_random(2, 3, RngStream(21))
    rep = haar_concentration_experiment(3, 2, 1, RngStream(21))
    assert abs(rep.sigma_p2[0] - sigma_p2(psi)) <= 1e-12
