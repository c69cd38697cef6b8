"""Bell and Bell-difference sampling on explicit multi-copy states.

A 2n-qudit state is split into subsystem A (first n qudits) and B (last n);
qudit i of A is paired with qudit i of B.  The Bell basis is

    |W_x> = (W_x (x) I)|Phi+> = p^{-n/2} sum_q omega^{<q,v> + inv2 <v,w>} |q + w>_A |q>_B.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, check_size
from .fourier import PhaseDistribution
from .gf import all_vectors, field, vector_index
from .state import MULTI_COPY_LIMIT, RngLike, StateVector, born_probabilities, sample_index, tensor
from .weyl import weyl_action


@lru_cache(maxsize=8)
def bell_vectors(p: int, n: int) -> np.ndarray:
    """Row x holds the amplitudes of |W_x> (rows in big-endian label order)."""
    d = p**n
    check_size(d**4, MULTI_COPY_LIMIT, "Bell basis p^(4n)")
    om = field(p).omega_powers
    B = np.zeros((d * d, d * d), dtype=complex)
    q = np.arange(d)
    for k, x in enumerate(all_vectors(p, 2 * n)):
        targets, exps = weyl_action(x, p)
        B[k, targets * d + q] = om[exps]
    B /= np.sqrt(d)
    B.setflags(write=False)
    return B


def bell_state(x, p: int) -> StateVector:
    x = np.asarray(x)
    n = x.shape[0] // 2
    return StateVector(bell_vectors(p, n)[int(vector_index(x, p))].copy(), p, 2 * n)


def bell_basis_overlaps(Psi: StateVector) -> PhaseDistribution:
    """q(x) = |<W_x|Psi>|^2 for every label x."""
    if Psi.n % 2:
        raise DimensionMismatch("Bell measurement needs an even number of qudits")
    n = Psi.n // 2
    amps = bell_vectors(Psi.p, n).conj() @ Psi.amps
    return PhaseDistribution(np.abs(amps) ** 2, Psi.p, n)


def bell_sample(Psi: StateVector, rng: RngLike) -> np.ndarray:
    born_probabilities(Psi)  # normalization check
    q = bell_basis_overlaps(Psi)
    k = sample_index(q.values / q.values.sum(), rng)
    return all_vectors(Psi.p, Psi.n)[k].copy()


def bell_difference_sample(psi: StateVector, rng: RngLike) -> np.ndarray:
    """Bell-sample two fresh copies of psi (x) psi and return second minus first."""
    y1 = bell_sample(tensor(psi, psi), rng)
    y2 = bell_sample(tensor(psi, psi), rng)
    return (y2 - y1) % psi.p


def exact_bell_difference_oracle(psi: StateVector) -> PhaseDistribution:
    """b(x) = sum_y q1(y) q1(x + y), q1 the Bell overlaps of psi (x) psi."""
    p, n = psi.p, psi.n
    q1 = bell_basis_overlaps(tensor(psi, psi)).values
    X = all_vectors(p, 2 * n)
    plus = vector_index(X[:, None, :] + X[None, :, :], p)  # plus[x, y] = index(x + y)
    return PhaseDistribution(q1[plus] @ q1, p, n)
