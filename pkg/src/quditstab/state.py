"""Dense state vectors over n qudits of prime dimension p.

Operations never mutate their inputs; every gate or measurement works on the
state it is handed and returns a fresh object.  Measuring a state models the
consumption of one physical copy, so callers pass a fresh copy per measurement.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence, Tuple, Union

import numpy as np

from .errors import DimensionMismatch, NotEigenstate, check_size
from .gf import Subspace, all_vectors, field, vec, vector_index
from .weyl import weyl_action

MULTI_COPY_LIMIT = 2**26
EXPECTATION_LIMIT = 2**20
NORM_TOL = 1e-9
EIGEN_TOL = 1e-6


# ---------------------------------------------------------------------------
# random streams
# ---------------------------------------------------------------------------

@dataclass
class RngStream:
    """Deterministic random stream keyed by (master_seed, stream_id).

    Streams with different ids are statistically independent; the same key
    always replays the same draws.  ``counter`` counts children handed out by
    :meth:`spawn`.
    """

    master_seed: int
    stream_id: Tuple[int, ...] = ()
    counter: int = 0
    generator: np.random.Generator = dc_field(init=False, repr=False)

    def __post_init__(self):
        if isinstance(self.stream_id, (int, np.integer)):
            self.stream_id = (int(self.stream_id),)
        self.stream_id = tuple(int(i) for i in self.stream_id)
        seq = np.random.SeedSequence(int(self.master_seed), spawn_key=self.stream_id)
        self.generator = np.random.Generator(np.random.PCG64(seq))

    def child(self, i: int) -> "RngStream":
        return RngStream(self.master_seed, self.stream_id + (int(i),))

    def spawn(self) -> "RngStream":
        out = self.child(self.counter)
        self.counter += 1
        return out


RngLike = Union[RngStream, np.random.Generator, int]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    return RngStream(int(rng)).generator


# ---------------------------------------------------------------------------
# the state type
# ---------------------------------------------------------------------------

class StateVector:
    """Dense amplitudes of length p^n, big-endian basis ordering."""

    __slots__ = ("p", "n", "amps")

    def __init__(self, amps, p: int, n: int | None = None):
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        field(p)
        if n is None:
            n = int(round(np.log(amps.size) / np.log(p))) if amps.size > 1 else 0
        if amps.size != p**n:
            raise DimensionMismatch(f"{amps.size} amplitudes is not p^n for p={p}, n={n}")
        self.p = int(p)
        self.n = int(n)
        self.amps = amps

    @property
    def dim(self) -> int:
        return self.amps.size

    def copy(self) -> "StateVector":
        return StateVector(self.amps.copy(), self.p, self.n)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalize(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.amps / nrm, self.p, self.n)

    def tensor(self, other: "StateVector") -> "StateVector":
        return tensor(self, other)

    def conjugate(self) -> "StateVector":
        return conjugate(self)

    def __repr__(self):
        return f"StateVector(p={self.p}, n={self.n})"


def normalize(psi: StateVector) -> StateVector:
    return psi.normalize()


def basis_state(q, p: int) -> StateVector:
    q = vec(q, p).reshape(-1)
    n = q.size
    amps = np.zeros(p**n, dtype=complex)
    amps[int(vector_index(q, p))] = 1.0
    return StateVector(amps, p, n)


def uniform_superposition(offset, X: Subspace) -> StateVector:
    """Equal-weight superposition over the coset offset + X of F_p^n."""
    p, n = X.p, X.ambient_dim
    pts = (vec(offset, p)[None, :] + X.elements()) % p
    amps = np.zeros(p**n, dtype=complex)
    amps[vector_index(pts, p)] = 1.0 / np.sqrt(X.size)
    return StateVector(amps, p, n)


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>."""
    if a.p != b.p or a.n != b.n:
        raise DimensionMismatch("inner product of states on different systems")
    return complex(np.vdot(a.amps, b.amps))


def tensor(a: StateVector, b: StateVector) -> StateVector:
    if a.p != b.p:
        raise DimensionMismatch("tensor product of different local dimensions")
    check_size(a.dim * b.dim, MULTI_COPY_LIMIT, "tensor product dimension")
    return StateVector(np.kron(a.amps, b.amps), a.p, a.n + b.n)


def conjugate(a: StateVector) -> StateVector:
    return StateVector(a.amps.conj(), a.p, a.n)


def equal_up_to_phase(a: StateVector, b: StateVector) -> float:
    """Vector error after aligning the global phase on a's largest amplitude."""
    k = int(np.argmax(np.abs(a.amps)))
    if abs(b.amps[k]) == 0:
        return float(np.linalg.norm(a.amps - b.amps))
    phase = a.amps[k] / b.amps[k]
    phase /= abs(phase)
    return float(np.linalg.norm(a.amps - phase * b.amps))


# ---------------------------------------------------------------------------
# Weyl operators on states
# ---------------------------------------------------------------------------

def apply_weyl(x, psi: StateVector) -> StateVector:
    x = vec(x, psi.p)
    if x.shape != (2 * psi.n,):
        raise DimensionMismatch(f"label length {x.shape[0]} for {psi.n} qudits")
    targets, exps = weyl_action(x, psi.p)
    out = np.empty_like(psi.amps)
    out[targets] = field(psi.p).omega_powers[exps] * psi.amps
    return StateVector(out, psi.p, psi.n)


def expectation_weyl(psi: StateVector, x) -> complex:
    return inner(psi, apply_weyl(x, psi))


def weyl_expectations(psi: StateVector) -> np.ndarray:
    """<psi|W_x|psi> for every x in F_p^{2n}, in big-endian label order over (v, w)."""
    p, n = psi.p, psi.n
    d = p**n
    check_size(d * d, EXPECTATION_LIMIT, "Weyl expectation table p^(2n)")
    om = field(p).omega_powers
    Q = all_vectors(p, n)
    shift = vector_index(Q[:, None, :] + Q[None, :, :], p)  # shift[q, w] = index(q + w)
    G = psi.amps.conj()[shift] * psi.amps[:, None]  # G[q, w] = conj(psi(q+w)) psi(q)
    chars = om[(Q @ Q.T) % p]  # chars[v, q] = omega^{<q, v>}
    E = chars @ G  # E[v, w]
    E *= om[(field(p).inv2 * (Q @ Q.T)) % p]  # omega^{inv2 <v, w>}
    return E.reshape(-1)


# ---------------------------------------------------------------------------
# gates
# ---------------------------------------------------------------------------

def check_unitary(U: np.ndarray, tol: float = 1e-9) -> None:
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise DimensionMismatch("gate must be a square matrix")
    err = np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0]))
    if err > tol:
        raise ValueError(f"gate is not unitary (||U^dag U - I|| = {err:.3g})")


def apply_local_unitary(U, targets: Sequence[int], psi: StateVector) -> StateVector:
    """Apply a k-qudit gate U (p^k x p^k) to the listed qudits, in that order."""
    U = np.asarray(U, dtype=complex)
    targets = list(targets)
    k = len(targets)
    p, n = psi.p, psi.n
    if U.shape != (p**k, p**k):
        raise DimensionMismatch(f"gate of shape {U.shape} on {k} qudits of dimension {p}")
    if len(set(targets)) != k or any(t < 0 or t >= n for t in targets):
        raise DimensionMismatch(f"bad target qudits {targets} for n={n}")
    check_unitary(U)
    T = psi.amps.reshape((p,) * n)
    Ut = U.reshape((p,) * (2 * k))
    out = np.tensordot(Ut, T, axes=(list(range(k, 2 * k)), targets))
    out = np.moveaxis(out, list(range(k)), targets)
    return StateVector(out.reshape(-1), p, n)


def qft_matrix(p: int, inverse: bool = False) -> np.ndarray:
    """|t> -> p^{-1/2} sum_c omega^{+-tc} |c>; the minus sign for the inverse."""
    t = np.arange(p)
    sign = -1 if inverse else 1
    return field(p).omega_powers[(sign * np.outer(t, t)) % p] / np.sqrt(p)


def qft_qudit(psi: StateVector, i: int, inverse: bool = False) -> StateVector:
    return apply_local_unitary(qft_matrix(psi.p, inverse), [i], psi)


def controlled_shift(psi: StateVector, control: Sequence[int], target: Sequence[int], delta: int) -> StateVector:
    """U_delta : |t, q> -> |t, q - delta t> on equal-length control/target registers."""
    control, target = list(control), list(target)
    p, n = psi.p, psi.n
    k = len(control)
    if len(target) != k or set(control) & set(target):
        raise DimensionMismatch("control and target registers must be disjoint and equally long")
    delta %= p
    if delta == 0 or k == 0:
        return psi.copy()
    rest = [i for i in range(n) if i not in control and i not in target]
    order = control + target + rest
    T = np.transpose(psi.amps.reshape((p,) * n), order).reshape(p**k, p**k, -1)
    Q = all_vectors(p, k)
    # new amplitude at (t, q) is the old amplitude at (t, q + delta t)
    src = vector_index(Q[None, :, :] + delta * Q[:, None, :], p)
    out = np.empty_like(T)
    for t in range(p**k):
        out[t] = T[t, src[t]]
    out = np.transpose(out.reshape((p,) * n), np.argsort(order))
    return StateVector(out.reshape(-1), p, n)


# ---------------------------------------------------------------------------
# measurements and random states
# ---------------------------------------------------------------------------

def born_probabilities(psi: StateVector) -> np.ndarray:
    probs = np.abs(psi.amps) ** 2
    total = probs.sum()
    if abs(total - 1) > NORM_TOL:
        raise ValueError(f"state is not normalized (norm^2 = {total})")
    return probs / total


def sample_index(probs: np.ndarray, rng: RngLike) -> int:
    cdf = np.cumsum(probs)
    u = as_generator(rng).random() * cdf[-1]
    return int(min(np.searchsorted(cdf, u, side="right"), probs.size - 1))


def measure_computational(psi: StateVector, rng: RngLike) -> np.ndarray:
    """Sample q from |<q|psi>|^2."""
    k = sample_index(born_probabilities(psi), rng)
    return _digits(k, psi.p, psi.n)


def _digits(k: int, p: int, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=np.int64)
    for i in range(n - 1, -1, -1):
        k, out[i] = divmod(k, p)
    return out


def measure_weyl_eigenphase(x, psi: StateVector, tol: float = EIGEN_TOL) -> int:
    """Return s with W_x|psi> = omega^{-s}|psi>; psi must be an eigenvector."""
    e = expectation_weyl(psi, x)
    if abs(e) < 1 - tol:
        raise NotEigenstate(f"|<psi|W_x|psi>| = {abs(e):.6g} for x = {vec(x, psi.p).tolist()}")
    k = int(np.rint(np.angle(e) * psi.p / (2 * np.pi)))
    return (-k) % psi.p


def haar_random(n: int, p: int, rng: RngLike) -> StateVector:
    gen = as_generator(rng)
    d = p**n
    g = gen.standard_normal(d) + 1j * gen.standard_normal(d)
    return StateVector(g / np.linalg.norm(g), p, n)
