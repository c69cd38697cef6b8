"""Stabiliser-testing POVM, the Haar-vs-stabiliser distinguisher, and doped Clifford circuits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import check_size
from .fourier import characteristic_distribution
from .gf import all_vectors, field as gf_field
from .state import (
    RngLike,
    StateVector,
    apply_local_unitary,
    as_generator,
    basis_state,
    haar_random,
    qft_matrix,
    weyl_expectations,
)
from .weyl import weyl_matrix

DENSE_POVM_LIMIT = 2**12


# ---------------------------------------------------------------------------
# the accept/reject measurement
# ---------------------------------------------------------------------------

def sigma_p2(psi: StateVector) -> float:
    """sum_x p_psi(x)^2."""
    return float(np.sum(characteristic_distribution(psi).values ** 2))


def acceptance_probability(psi: StateVector) -> float:
    """P[accept] = 1/2 + (p^n / 2) sum_x p_psi(x)^2 on four copies of psi."""
    return 0.5 + 0.5 * psi.p**psi.n * sigma_p2(psi)


def povm_sample(psi: StateVector, rng: RngLike, prob: Optional[float] = None) -> bool:
    """One accept (True) / reject outcome; uses four copies of psi."""
    if prob is None:
        prob = acceptance_probability(psi)
    return bool(as_generator(rng).random() < prob)


def swap_operator_dense(p: int, n: int) -> np.ndarray:
    """V = p^{-n} sum_x W_x (x) W_x^dag (x) W_x (x) W_x^dag on four registers."""
    d = p**n
    check_size(d**4, DENSE_POVM_LIMIT, "dense four-copy operator p^(4n)")
    V = np.zeros((d**4, d**4), dtype=complex)
    for x in all_vectors(p, 2 * n):
        Wx = weyl_matrix(x, p)
        Wd = Wx.conj().T
        V += reduce(np.kron, [Wx, Wd, Wx, Wd])
    return V / d


def acceptance_probability_dense(psi: StateVector) -> float:
    """Tr[psi^{(x)4} (I + V)/2] from the explicit four-copy operator."""
    V = swap_operator_dense(psi.p, psi.n)
    Psi = reduce(np.kron, [psi.amps] * 4)
    return float(np.real(0.5 * (1 + np.vdot(Psi, V @ Psi))))


def compute_m(k: float, delta: float) -> int:
    """Number of POVM rounds, ceil(ceil(72 k^8 ln(2/delta)) / 4)."""
    if k < 1 or not 0 < delta < 1:
        raise ValueError("need k >= 1 and 0 < delta < 1")
    return math.ceil(math.ceil(72 * k**8 * math.log(2 / delta)) / 4)


@dataclass
class DistinguishResult:
    verdict: str
    X: float
    threshold: float
    m: int
    copies: int
    sigma_p2: float

    def to_dict(self, seed: Optional[int] = None) -> dict:
        return {"seed": seed, "verdict": self.verdict, "X": self.X, "m": self.m, "sigma_p2": self.sigma_p2}


def algorithm3(psi: StateVector, k: float, delta: float, rng: RngLike) -> DistinguishResult:
    """Run m accept/reject rounds and compare (accepts - rejects)/m with 2/(3 k^4)."""
    gen = as_generator(rng)
    m = compute_m(k, delta)
    s2 = sigma_p2(psi)
    prob = 0.5 + 0.5 * psi.p**psi.n * s2
    # m independent accept/reject outcomes; their count is binomial
    accepts = int(gen.binomial(m, min(prob, 1.0)))
    X = (2 * accepts - m) / m
    threshold = 2 / (3 * k**4)
    verdict = "high_fidelity" if X >= threshold else "haar"
    return DistinguishResult(verdict, X, threshold, m, 4 * m, s2)


# ---------------------------------------------------------------------------
# gates
# ---------------------------------------------------------------------------

def fourier_gate(p: int) -> np.ndarray:
    return qft_matrix(p)


def phase_gate(p: int) -> np.ndarray:
    """D|q> = omega^{inv2 q^2}|q>."""
    q = np.arange(p)
    return np.diag(gf_field(p).omega_powers[(gf_field(p).inv2 * q * q) % p])


def multiplier_gate(p: int, a: int) -> np.ndarray:
    """M_a|q> = |a q>, a nonzero."""
    if a % p == 0:
        raise ValueError("multiplier must be nonzero mod p")
    M = np.zeros((p, p), dtype=complex)
    q = np.arange(p)
    M[(a * q) % p, q] = 1
    return M


def sum_gate(p: int) -> np.ndarray:
    """SUM|q, r> = |q, q + r>."""
    M = np.zeros((p * p, p * p), dtype=complex)
    for q in range(p):
        for r in range(p):
            M[q * p + (q + r) % p, q * p + r] = 1
    return M


def cubic_phase_gate(p: int) -> np.ndarray:
    """|q> -> exp(2 pi i q^3 / p^2)|q>."""
    q = np.arange(p)
    return np.diag(np.exp(2j * np.pi * q**3 / p**2))


def random_haar_gate(p: int, rng: RngLike) -> np.ndarray:
    gen = as_generator(rng)
    Z = gen.standard_normal((p, p)) + 1j * gen.standard_normal((p, p))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def is_clifford_gate(U: np.ndarray, p: int, tol: float = 1e-9) -> bool:
    """True iff U W_x U^dag is an omega-power times a Weyl operator for each generator label x."""
    U = np.asarray(U, dtype=complex)
    d = U.shape[0]
    k = int(round(math.log(d, p)))
    if p**k != d:
        raise ValueError("gate dimension is not a power of p")
    labels = all_vectors(p, 2 * k)
    mats = [weyl_matrix(y, p) for y in labels]
    for j in range(2 * k):
        x = np.zeros(2 * k, dtype=np.int64)
        x[j] = 1
        A = U @ weyl_matrix(x, p) @ U.conj().T
        traces = np.array([np.trace(M.conj().T @ A) for M in mats])
        y = int(np.argmax(np.abs(traces)))
        c = traces[y] / d
        if abs(abs(c) - 1) > tol or abs(c**p - 1) > tol:
            return False
        if np.linalg.norm(A - c * mats[y]) > tol * d:
            return False
    return True


# ---------------------------------------------------------------------------
# circuits
# ---------------------------------------------------------------------------

CLIFFORD_GATES = ("F", "D", "M", "SUM")


def gate_matrix(name: str, p: int, param: int = 0) -> np.ndarray:
    if name == "F":
        return fourier_gate(p)
    if name == "D":
        return phase_gate(p)
    if name == "M":
        return multiplier_gate(p, param)
    if name == "SUM":
        return sum_gate(p)
    raise ValueError(f"unknown Clifford gate {name!r}")


@dataclass
class CliffordCircuit:
    p: int
    n: int
    gates: List[Tuple[str, Tuple[int, ...], int]] = field(default_factory=list)

    def apply(self, psi: StateVector) -> StateVector:
        for name, targets, param in self.gates:
            psi = apply_local_unitary(gate_matrix(name, self.p, param), targets, psi)
        return psi

    def unitary(self) -> np.ndarray:
        d = self.p**self.n
        cols = [self.apply(StateVector(np.eye(d)[k], self.p, self.n)).amps for k in range(d)]
        return np.array(cols).T


def random_clifford_circuit(p: int, n: int, depth: int, rng: RngLike) -> CliffordCircuit:
    """Random word in the generators F, D, M_a, SUM (not uniform over the Clifford group)."""
    gen = as_generator(rng)
    names = CLIFFORD_GATES if n >= 2 else CLIFFORD_GATES[:3]
    gates = []
    for _ in range(depth):
        name = names[gen.integers(len(names))]
        if name == "SUM":
            a, b = gen.choice(n, size=2, replace=False)
            gates.append((name, (int(a), int(b)), 0))
        else:
            param = int(gen.integers(1, p)) if name == "M" else 0
            gates.append((name, (int(gen.integers(n)),), param))
    return CliffordCircuit(p, n, gates)


@dataclass
class DopedGate:
    kind: str
    target: int
    matrix: np.ndarray = field(repr=False)


@dataclass
class DopedCircuit:
    """Clifford segments with one non-Clifford single-qudit gate between consecutive segments."""

    p: int
    n: int
    segments: List[CliffordCircuit]
    doped: List[DopedGate]

    @property
    def t(self) -> int:
        return len(self.doped)


def doped_circuit(p: int, n: int, t: int, clifford_depth: int, kind: str, rng: RngLike) -> DopedCircuit:
    gen = as_generator(rng)
    segments = [random_clifford_circuit(p, n, clifford_depth, gen) for _ in range(t + 1)]
    doped = []
    for _ in range(t):
        if kind == "cubic-phase":
            U = cubic_phase_gate(p)
        elif kind == "random-haar":
            U = random_haar_gate(p, gen)
        else:
            raise ValueError(f"unknown doped gate kind {kind!r}")
        if is_clifford_gate(U, p):
            raise ValueError("doped gate turned out to be Clifford")
        doped.append(DopedGate(kind, int(gen.integers(n)), U))
    return DopedCircuit(p, n, segments, doped)


def run(circuit: DopedCircuit) -> StateVector:
    """Apply the circuit to |0...0>."""
    psi = basis_state(np.zeros(circuit.n, dtype=np.int64), circuit.p)
    for i, seg in enumerate(circuit.segments):
        psi = seg.apply(psi)
        if i < len(circuit.doped):
            g = circuit.doped[i]
            psi = apply_local_unitary(g.matrix, [g.target], psi)
    return psi


# ---------------------------------------------------------------------------
# Haar anti-concentration
# ---------------------------------------------------------------------------

@dataclass
class ConcentrationReport:
    p: int
    n: int
    max_weyl: np.ndarray
    sigma_p2: np.ndarray

    @property
    def scaled_sigma_p2(self) -> np.ndarray:
        return self.p**self.n * self.sigma_p2

    def quantiles(self, qs: Sequence[float] = (0.0, 0.5, 0.9, 1.0)) -> dict:
        return {
            "max_weyl": dict(zip(qs, np.quantile(self.max_weyl, qs).tolist())),
            "sigma_p2": dict(zip(qs, np.quantile(self.sigma_p2, qs).tolist())),
        }


def haar_concentration_experiment(p: int, n: int, trials: int, rng: RngLike) -> ConcentrationReport:
    gen = as_generator(rng)
    mx, s2 = [], []
    for _ in range(trials):
        psi = haar_random(n, p, gen)
        E = np.abs(weyl_expectations(psi))
        mx.append(float(E[1:].max()))
        s2.append(float(np.sum((E**2 / p**n) ** 2)))
    return ConcentrationReport(p, n, np.array(mx), np.array(s2))
