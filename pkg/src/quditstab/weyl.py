"""Weyl (generalised Pauli) operators with exact phase bookkeeping.

A label x = (v, w) in F_p^{2n} names the operator

    W_x |q> = omega^{<q, v> + inv2 <v, w>} |q + w>,

so v carries the clock (Z-type) part and w the shift (X-type) part.
Computational basis states |q> are indexed big-endian: index(q) = sum_i q_i p^{n-i}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch, check_size
from .gf import all_vectors, field, symplectic_product, vec, vector_index

WEYL_MATRIX_LIMIT = 2**14


@dataclass(frozen=True)
class PauliElement:
    """omega^phase_exp * W_label."""

    p: int
    phase_exp: int
    label: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "phase_exp", int(self.phase_exp) % self.p)
        object.__setattr__(self, "label", tuple(int(a) % self.p for a in self.label))
        if len(self.label) % 2:
            raise DimensionMismatch("Weyl labels have even length 2n")

    @classmethod
    def identity(cls, n: int, p: int) -> "PauliElement":
        return cls(p, 0, (0,) * (2 * n))

    @property
    def n(self) -> int:
        return len(self.label) // 2

    @property
    def x(self) -> np.ndarray:
        return np.array(self.label, dtype=np.int64)

    @property
    def v(self) -> np.ndarray:
        return self.x[: self.n]

    @property
    def w(self) -> np.ndarray:
        return self.x[self.n :]

    def __mul__(self, other: "PauliElement") -> "PauliElement":
        return pauli_mul(self, other)

    def __pow__(self, m: int) -> "PauliElement":
        return pauli_pow(self, m)


def _same_space(a: PauliElement, b: PauliElement):
    if a.p != b.p or a.n != b.n:
        raise DimensionMismatch("Pauli elements act on different systems")


def pauli_mul(a: PauliElement, b: PauliElement) -> PauliElement:
    """Product using W_x W_y = tau^{[x,y]} W_{x+y}, tau = omega^{inv2}."""
    _same_space(a, b)
    p = a.p
    phase = a.phase_exp + b.phase_exp + field(p).inv2 * symplectic_product(a.label, b.label, p)
    return PauliElement(p, phase, tuple((a.x + b.x) % p))


def pauli_pow(a: PauliElement, m: int) -> PauliElement:
    # W_x^m = W_{mx} because [x, x] = 0
    return PauliElement(a.p, m * a.phase_exp, tuple((m * a.x) % a.p))


def pauli_dagger(a: PauliElement) -> PauliElement:
    return PauliElement(a.p, -a.phase_exp, tuple((-a.x) % a.p))


def commutation_phase(x, y, p: int) -> int:
    """c with W_x W_y = omega^c W_y W_x; zero iff the operators commute."""
    return symplectic_product(x, y, p)


def weyl_action(x, p: int) -> Tuple[np.ndarray, np.ndarray]:
    """(target index, phase exponent) for every basis index q: W_x|q> = omega^e |t>."""
    x = vec(x, p)
    n = x.shape[0] // 2
    v, w = x[:n], x[n:]
    Q = all_vectors(p, n)
    exps = (Q @ v + field(p).inv2 * int(v @ w)) % p
    targets = vector_index(Q + w, p)
    return targets, exps


def weyl_matrix(x, p: int) -> np.ndarray:
    """Dense p^n x p^n matrix of W_x."""
    x = vec(x, p)
    n = x.shape[0] // 2
    check_size(p**n, WEYL_MATRIX_LIMIT, "weyl_matrix dimension p^n")
    targets, exps = weyl_action(x, p)
    M = np.zeros((p**n, p**n), dtype=complex)
    M[targets, np.arange(p**n)] = field(p).omega_powers[exps]
    return M


def pauli_matrix(a: PauliElement) -> np.ndarray:
    return field(a.p).omega_powers[a.phase_exp] * weyl_matrix(a.label, a.p)


def group_elements(generators: Sequence[PauliElement]) -> list:
    """All products of powers of commuting generators (p^k elements)."""
    if not generators:
        raise ValueError("need at least one generator")
    p = generators[0].p
    elems = [PauliElement.identity(generators[0].n, p)]
    for g in generators:
        powers = [pauli_pow(g, j) for j in range(p)]
        elems = [pauli_mul(e, gj) for e in elems for gj in powers]
    return elems
