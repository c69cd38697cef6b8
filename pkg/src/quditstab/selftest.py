"""Fast invariant suite behind ``quditstab selftest``.

Each check returns (passed, detail).  ``fault="phase-convention"`` swaps in a
corrupted commutation phase so the suite can be seen to catch it.
"""

from __future__ import annotations

from typing import Callable, List, Optional, Tuple

import numpy as np

from . import distinguish, fourier, gf, learn, sampling, stab, state, weyl
from .state import RngStream

Check = Tuple[str, Callable[[], Tuple[bool, str]]]


def _lagrangian_counts():
    got = {(p, n): len(gf.enumerate_lagrangians(n, p)) for p, n in [(3, 1), (3, 2), (5, 1)]}
    ok = all(v == gf.lagrangian_count(n, p) for (p, n), v in got.items())
    return ok, str(got)


def _complements():
    rng = RngStream(101).generator
    for _ in range(30):
        X = gf.random_subspace(3, 4, int(rng.integers(0, 5)), rng)
        if X.perp().perp() != X or X.symp_complement().symp_complement() != X:
            return False, "double complement is not the identity"
        if X.symp_complement().involute() != X.involute().symp_complement():
            return False, "involution does not commute with the symplectic complement"
        if X.size * X.symp_complement().size != 3**4:
            return False, "complement size"
    return True, "30 random subspaces"


def _weyl_products():
    p, n = 3, 1
    om = gf.field(p).omega_powers
    worst = 0.0
    for x in gf.all_vectors(p, 2 * n):
        for y in gf.all_vectors(p, 2 * n):
            a = weyl.PauliElement(p, 0, tuple(x))
            b = weyl.PauliElement(p, 0, tuple(y))
            c = weyl.pauli_mul(a, b)
            lhs = weyl.weyl_matrix(x, p) @ weyl.weyl_matrix(y, p)
            worst = max(worst, np.abs(lhs - om[c.phase_exp] * weyl.weyl_matrix(c.label, p)).max())
    return worst <= 1e-12, f"max error {worst:.2e}"


def _commutation(phase_fn):
    def check():
        p, n = 3, 2
        om = gf.field(p).omega_powers
        rng = RngStream(102).generator
        worst = 0.0
        for _ in range(30):
            x, y = rng.integers(0, p, 2 * n), rng.integers(0, p, 2 * n)
            Wx, Wy = weyl.weyl_matrix(x, p), weyl.weyl_matrix(y, p)
            worst = max(worst, np.abs(Wx @ Wy - om[phase_fn(x, y, p)] * Wy @ Wx).max())
        return worst <= 1e-12, f"max error {worst:.2e}"

    return check


def _corrupted_phase(x, y, p):
    return (-weyl.commutation_phase(x, y, p)) % p


def _closed_form():
    worst = 0.0
    for i in range(30):
        G = stab.random_group(3, 2, RngStream(103, i))
        psi = stab.state_closed_form(G)
        worst = max(worst, state.equal_up_to_phase(psi, stab.state_projector_oracle(G)), stab.stabilizes(G, psi))
        if not all(stab.check_group_properties(G).values()):
            return False, f"matrix identities fail for {G}"
    return worst <= 1e-9, f"max error {worst:.2e}"


def _fourier():
    worst = 0.0
    for i in range(5):
        psi = state.haar_random(2, 3, RngStream(104, i))
        pd = fourier.characteristic_distribution(psi)
        worst = max(worst, np.abs(fourier.sft(pd).values - pd.values / 9).max())
        b = fourier.weyl_distribution(psi)
        worst = max(worst, b.max_abs_diff(fourier.weyl_distribution_fourier(psi)))
        worst = max(worst, b.max_abs_diff(sampling.exact_bell_difference_oracle(psi)))
    return worst <= 1e-9, f"max error {worst:.2e}"


def _bell_invariance():
    p, n = 3, 2
    phi = sampling.bell_state(np.zeros(2 * n, dtype=np.int64), p)
    worst = 0.0
    for x in gf.all_vectors(p, 2 * n):
        U = np.kron(weyl.weyl_matrix(x, p), weyl.weyl_matrix(gf.involution(x, p), p))
        worst = max(worst, np.abs(U @ phi.amps - phi.amps).max())
    return worst <= 1e-12, f"max error {worst:.2e}"


def _learners():
    p, n = 3, 2
    for i in range(5):
        G = stab.random_group(p, n, RngStream(105, (i, 0)))
        r1 = learn.algorithm1(learn.CopyOracle(G), RngStream(105, (i, 1)))
        if r1.copies_used != (3 * n, 2 * n) or (r1.success and not learn.validate_recovery(G, r1.recovered)):
            return False, f"algorithm1 trial {i}"
        r2 = learn.algorithm2(learn.CopyOracle(G), None, RngStream(105, (i, 2)))
        want = learn.expected_copies_algorithm2(n, r2.diagnostics["r"], p)
        if r2.copies_S != want or (r2.success and not learn.validate_recovery(G, r2.recovered)):
            return False, f"algorithm2 trial {i}"
    return True, "copy accounting and recoveries"


def _povm():
    V = distinguish.swap_operator_dense(3, 1)
    inv = np.abs(V @ V - np.eye(V.shape[0])).max()
    psi = state.haar_random(1, 3, RngStream(106))
    gap = abs(distinguish.acceptance_probability(psi) - distinguish.acceptance_probability_dense(psi))
    G = stab.random_group(3, 2, RngStream(107))
    one = abs(distinguish.acceptance_probability(stab.state_closed_form(G)) - 1)
    return max(inv, gap, one) <= 1e-9, f"V^2-I {inv:.1e}, shortcut {gap:.1e}, stabiliser {one:.1e}"


def _clifford_gates():
    p = 3
    gates = [distinguish.fourier_gate(p), distinguish.phase_gate(p), distinguish.multiplier_gate(p, 2), distinguish.sum_gate(p)]
    ok = all(distinguish.is_clifford_gate(g, p) for g in gates)
    ok &= not distinguish.is_clifford_gate(distinguish.cubic_phase_gate(p), p)
    return ok, "F, D, M_2, SUM Clifford; cubic phase not"


def checks(fault: Optional[str] = None) -> List[Check]:
    phase_fn = _corrupted_phase if fault == "phase-convention" else weyl.commutation_phase
    return [
        ("gf: Lagrangian counts", _lagrangian_counts),
        ("gf: complements", _complements),
        ("weyl: matrix products", _weyl_products),
        ("weyl: commutation phase", _commutation(phase_fn)),
        ("stab: closed form vs projector", _closed_form),
        ("fourier: invariance and Bell difference", _fourier),
        ("sampling: Bell-pair invariance", _bell_invariance),
        ("learn: accounting and recovery", _learners),
        ("distinguish: accept operator", _povm),
        ("distinguish: Clifford gates", _clifford_gates),
    ]


def run_selftest(fault: Optional[str] = None) -> List[Tuple[str, bool, str]]:
    rows = []
    for name, fn in checks(fault):
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        rows.append((name, bool(ok), detail))
    return rows
