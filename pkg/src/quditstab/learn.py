"""Stabiliser-state learners run against a simulated source of state copies.

``algorithm1`` Bell-samples |S>|S*> pairs to learn the Lagrangian, then reads
out each generator phase.  ``algorithm2`` uses copies of |S> only: computational
measurements give col(W), a controlled-shift / Fourier interference step gives
the matching v-parts, and eigenphase readout gives the phases.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import reduce
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import NotEigenstate, QuditError, check_size
from .gf import Subspace, find_zero_sum_of_three_squares, rank, solve_linear
from .sampling import bell_sample
from .stab import StabilizerGroup, canonical_key, group_from_arrays, state_closed_form
from .state import (
    MULTI_COPY_LIMIT,
    RngLike,
    StateVector,
    apply_local_unitary,
    as_generator,
    conjugate,
    controlled_shift,
    measure_computational,
    measure_weyl_eigenphase,
    qft_matrix,
    tensor,
    uniform_superposition,
)


class CopyOracle:
    """Hands out fresh copies of a hidden stabiliser state and counts them.

    Learners may only use ``p``, ``n`` and the copy methods; the hidden group
    stays private to the harness.
    """

    def __init__(self, hidden: StabilizerGroup):
        self._hidden = hidden
        self._state = state_closed_form(hidden)
        self.copies_S = 0
        self.copies_S_conj = 0

    @property
    def p(self) -> int:
        return self._hidden.p

    @property
    def n(self) -> int:
        return self._hidden.n

    def copy(self) -> StateVector:
        self.copies_S += 1
        return self._state.copy()

    def conjugate_copy(self) -> StateVector:
        self.copies_S_conj += 1
        return conjugate(self._state)

    def take(self, k: int) -> List[StateVector]:
        return [self.copy() for _ in range(k)]

    def take_conjugate(self, k: int) -> List[StateVector]:
        return [self.conjugate_copy() for _ in range(k)]


@dataclass(frozen=True)
class Failure:
    reason: str


@dataclass
class LearnResult:
    recovered: Union[StabilizerGroup, Failure]
    copies_S: int
    copies_S_conj: int
    wall_time: float
    seed: Optional[int] = None
    diagnostics: dict = field(default_factory=dict, repr=False)

    @property
    def success(self) -> bool:
        return isinstance(self.recovered, StabilizerGroup)

    @property
    def copies_used(self) -> Tuple[int, int]:
        return self.copies_S, self.copies_S_conj

    def to_dict(self) -> dict:
        out = {
            "success": self.success,
            "copies_S": self.copies_S,
            "copies_S_conj": self.copies_S_conj,
            "seed": self.seed,
            "group": self.recovered.to_dict() if self.success else None,
        }
        if not self.success:
            out["failure"] = self.recovered.reason
        return out


def _read_phases(labels: np.ndarray, copies: Sequence[StateVector]) -> List[int]:
    return [measure_weyl_eigenphase(x, c) for x, c in zip(labels, copies)]


def _finish(labels, copies, p) -> Union[StabilizerGroup, Failure]:
    try:
        phases = _read_phases(labels, copies)
    except NotEigenstate:
        return Failure("phase readout not eigenstate")
    try:
        return group_from_arrays(phases, labels, p)
    except QuditError as exc:
        return Failure(f"invalid generators: {exc}")


# ---------------------------------------------------------------------------
# Bell sampling with conjugate copies
# ---------------------------------------------------------------------------

def algorithm1(oracle: CopyOracle, rng: RngLike, seed: Optional[int] = None) -> LearnResult:
    """Learn |S> from 3n copies of |S> and 2n copies of |S*>.

    The full input (3n, 2n) is drawn up front, so the copy count is the same
    whether or not the run succeeds.
    """
    t0 = time.perf_counter()
    gen = as_generator(rng)
    p, n = oracle.p, oracle.n
    S = oracle.take(3 * n)
    S_conj = oracle.take_conjugate(2 * n)
    samples = np.array([bell_sample(tensor(S[i], S_conj[i]), gen) for i in range(2 * n)])
    span = Subspace.span(samples, p, 2 * n)
    if span.dim < n:
        recovered: Union[StabilizerGroup, Failure] = Failure("rank-deficient span")
    else:
        recovered = _finish(span.basis, S[2 * n :], p)
    return LearnResult(
        recovered,
        oracle.copies_S,
        oracle.copies_S_conj,
        time.perf_counter() - t0,
        seed,
        {"samples": samples},
    )


# ---------------------------------------------------------------------------
# quadratic-phase learner
# ---------------------------------------------------------------------------

def ceil_log(r: int, p: int) -> int:
    """Smallest k with p^k >= r, taken as 0 for r <= 1."""
    k = 0
    while p**k < r:
        k += 1
    return k


def rounds_for(n: int, r: int, p: int) -> int:
    """m = 2n + ceil(log_p r); the interference step runs m + 1 rounds."""
    return 2 * n + ceil_log(r, p)


def expected_copies_algorithm2(n: int, r: int, p: int) -> int:
    return 3 * (rounds_for(n, r, p) + n) + 4


def interference_round(
    control: StateVector, copies: Sequence[StateVector], deltas: Sequence[int], rng: RngLike
) -> Tuple[np.ndarray, List[np.ndarray]]:
    """One round: controlled shifts into three copies, inverse QFT on the control, measure all."""
    p, n = control.p, control.n
    check_size(p ** (4 * n), MULTI_COPY_LIMIT, "interference register p^(4n)")
    Psi = reduce(tensor, copies, control)
    ctrl = list(range(n))
    for i, d in enumerate(deltas):
        Psi = controlled_shift(Psi, ctrl, list(range(n * (i + 1), n * (i + 2))), d)
    F_inv = reduce(np.kron, [qft_matrix(p, inverse=True)] * n)
    Psi = apply_local_unitary(F_inv, ctrl, Psi)
    out = measure_computational(Psi, rng)
    return out[:n], [out[n * (i + 1) : n * (i + 2)] for i in range(len(copies))]


def algorithm2(
    oracle: CopyOracle, deltas: Optional[Sequence[int]] = None, rng: RngLike = 0, seed: Optional[int] = None
) -> LearnResult:
    """Learn |S> from 3(m + n) + 4 copies of |S>, m = 2n + ceil(log_p r)."""
    t0 = time.perf_counter()
    gen = as_generator(rng)
    p, n = oracle.p, oracle.n
    deltas = tuple(find_zero_sum_of_three_squares(p) if deltas is None else deltas)
    if len(deltas) != 3 or not any(d % p for d in deltas) or sum(d * d for d in deltas) % p:
        raise ValueError(f"deltas {deltas} must be nonzero with zero sum of squares mod p")

    # (1) the support u + col(W) from computational samples
    b = np.array([measure_computational(oracle.copy(), gen) for _ in range(2 * n + 1)])
    colW = Subspace.span((b[1:] - b[0]) % p, p, n)
    r = colW.dim
    w_rows = colW.basis
    # (2) generators with w = 0 complete the group
    z_rows = colW.perp().basis

    # (3) interference rounds
    m = rounds_for(n, r, p)
    control = uniform_superposition(np.zeros(n, dtype=np.int64), colW)
    rounds = []
    for _ in range(m + 1):
        c, qs = interference_round(control, oracle.take(3), deltas, gen)
        rounds.append((c, qs))
    phase_copies = oracle.take(n)
    diag = {"b": b, "r": r, "m": m, "deltas": deltas, "rounds": rounds}

    def result(rec):
        return LearnResult(rec, oracle.copies_S, oracle.copies_S_conj, time.perf_counter() - t0, seed, diag)

    # (4) v-parts from  v_k . d_l = w_k . (c_l - c_0),  d_l = sum_i delta_i (q_i^l - q_i^0)
    c0, q0 = rounds[0]
    dc = np.array([(c - c0) % p for c, _ in rounds[1:]]).reshape(m, n)
    D = np.array([sum(d * (q[i] - q0[i]) for i, d in enumerate(deltas)) % p for _, q in rounds[1:]]).reshape(m, n)
    if r and rank(D, p) < r:
        return result(Failure("linear system underdetermined"))
    v_rows = []
    for w in w_rows:
        v, _ = solve_linear(D, dc @ w % p, p)
        if v is None:
            return result(Failure("linear system inconsistent"))
        v_rows.append(v)
    labels = np.zeros((n, 2 * n), dtype=np.int64)
    for k, (v, w) in enumerate(zip(v_rows, w_rows)):
        labels[k, :n], labels[k, n:] = v, w
    labels[r:, :n] = z_rows

    # (5) phases
    return result(_finish(labels, phase_copies, p))


def validate_recovery(hidden: StabilizerGroup, recovered: Union[StabilizerGroup, Failure]) -> bool:
    if not isinstance(recovered, StabilizerGroup):
        return False
    return canonical_key(hidden) == canonical_key(recovered)


def hidden_round_residual(hidden: StabilizerGroup, c, qs, deltas) -> np.ndarray:
    """W^T c - sum_i delta_i (s + V^T q_i) mod p for one measured round; zero when consistent."""
    p = hidden.p
    V, W, s = hidden.V, hidden.W, hidden.s
    rhs = sum(d * (s + V.T @ q) for d, q in zip(deltas, qs))
    return (W.T @ c - rhs) % p
