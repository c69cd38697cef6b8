"""Exact arithmetic and linear algebra over a prime field F_p.

Vectors and matrices are plain numpy integer arrays whose entries are kept
reduced to [0, p).  A :class:`Subspace` stores its reduced row-echelon basis,
so two subspaces are equal exactly when their stored bases are identical.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .errors import DimensionMismatch, check_size

FpVector = np.ndarray
FpMatrix = np.ndarray

LAGRANGIAN_ENUMERATION_LIMIT = 2**20


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p**0.5) + 1))


@dataclass(frozen=True)
class FieldSpec:
    """An odd prime modulus together with the constants derived from it."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or self.p < 3 or not _is_prime(int(self.p)):
            raise ValueError(f"p must be an odd prime, got {self.p!r}")

    @property
    def inv2(self) -> int:
        return (self.p + 1) // 2

    @cached_property
    def inverses(self) -> np.ndarray:
        """Table with inverses[a] = a^{-1} mod p (inverses[0] = 0)."""
        table = np.zeros(self.p, dtype=np.int64)
        for a in range(1, self.p):
            table[a] = pow(a, self.p - 2, self.p)
        return table

    @cached_property
    def omega_powers(self) -> np.ndarray:
        """omega_powers[k] = exp(2 pi i k / p)."""
        return np.exp(2j * np.pi * np.arange(self.p) / self.p)

    def inv(self, a: int) -> int:
        a = int(a) % self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse mod p")
        return int(self.inverses[a])


@lru_cache(maxsize=None)
def field(p: int) -> FieldSpec:
    return FieldSpec(int(p))


def vec(a, p: int) -> FpVector:
    """Coerce to an int64 array reduced mod p."""
    return np.mod(np.asarray(a, dtype=np.int64), p)


# ---------------------------------------------------------------------------
# products
# ---------------------------------------------------------------------------

def scalar_product(a, b, p: int) -> int:
    a = vec(a, p)
    b = vec(b, p)
    if a.shape != b.shape:
        raise DimensionMismatch(f"length mismatch {a.shape} vs {b.shape}")
    return int(np.dot(a, b) % p)


def symplectic_product(x, y, p: int) -> int:
    """[x, y] = sum_i x_i y_{n+i} - x_{n+i} y_i  (mod p)."""
    x = vec(x, p)
    y = vec(y, p)
    if x.shape != y.shape or x.shape[-1] % 2:
        raise DimensionMismatch(f"symplectic vectors must share an even length, got {x.shape}, {y.shape}")
    n = x.shape[-1] // 2
    return int((np.dot(x[:n], y[n:]) - np.dot(x[n:], y[:n])) % p)


def symplectic_form(n: int) -> np.ndarray:
    """Matrix Omega with [x, y] = x^T Omega y."""
    om = np.zeros((2 * n, 2 * n), dtype=np.int64)
    om[:n, n:] = np.eye(n, dtype=np.int64)
    om[n:, :n] = -np.eye(n, dtype=np.int64)
    return om


def involution(x, p: int) -> FpVector:
    """J(v, w) = (-v, w); works on a single label or on rows of a matrix."""
    x = vec(x, p).copy()
    n = x.shape[-1] // 2
    x[..., :n] = (-x[..., :n]) % p
    return x


# ---------------------------------------------------------------------------
# enumeration helpers
# ---------------------------------------------------------------------------

def all_vectors(p: int, k: int) -> np.ndarray:
    """All of F_p^k as rows, in big-endian index order."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    idx = np.arange(p**k, dtype=np.int64)
    powers = p ** np.arange(k - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % p


def vector_index(x, p: int) -> np.ndarray:
    """Inverse of :func:`all_vectors`: big-endian integer index of each row."""
    x = vec(x, p)
    k = x.shape[-1]
    powers = p ** np.arange(k - 1, -1, -1, dtype=np.int64)
    return x @ powers


# ---------------------------------------------------------------------------
# elimination
# ---------------------------------------------------------------------------

def _rref(M, p: int) -> Tuple[np.ndarray, List[int]]:
    inv = field(p).inverses
    R = vec(M, p).copy()
    if R.ndim != 2:
        raise DimensionMismatch("rref expects a 2-D matrix")
    rows, cols = R.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            R[[r, k]] = R[[k, r]]
        R[r] = (R[r] * inv[R[r, c]]) % p
        factors = R[:, c].copy()
        factors[r] = 0
        R = (R - np.outer(factors, R[r])) % p
        pivots.append(c)
        r += 1
    return R, pivots


def rref(M, p: int) -> Tuple[FpMatrix, int]:
    """Reduced row-echelon form of M over F_p and its rank."""
    R, pivots = _rref(M, p)
    return R, len(pivots)


def rank(M, p: int) -> int:
    M = vec(M, p)
    if M.size == 0:
        return 0
    return len(_rref(M, p)[1])


def null_space_basis(A, p: int) -> np.ndarray:
    """Rows spanning {x : A x = 0}."""
    A = vec(A, p)
    cols = A.shape[1]
    R, pivots = _rref(A, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, c in enumerate(pivots):
            basis[i, c] = (-R[r, f]) % p
    return basis


def solve_linear(A, b, p: int) -> Tuple[Optional[FpVector], "Subspace"]:
    """Solve A x = b over F_p.

    Returns ``(x, null)`` where x has every free variable set to 0, or ``None``
    when the system is inconsistent; ``null`` is the null space of A.
    """
    A = vec(A, p)
    b = vec(b, p)
    if A.ndim != 2 or b.shape != (A.shape[0],):
        raise DimensionMismatch(f"incompatible shapes {A.shape} and {b.shape}")
    rows, cols = A.shape
    null = Subspace.span(null_space_basis(A, p), p, cols)
    R, pivots = _rref(np.concatenate([A, b[:, None]], axis=1), p)
    if cols in pivots:
        return None, null
    x = np.zeros(cols, dtype=np.int64)
    for r, c in enumerate(pivots):
        x[c] = R[r, cols]
    return x, null


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------

class Subspace:
    """A subspace of F_p^d stored by its canonical RREF basis (one row per vector)."""

    __slots__ = ("p", "ambient_dim", "basis", "_key")

    def __init__(self, basis: np.ndarray, p: int, ambient_dim: int):
        # callers must pass an RREF basis without zero rows; use span() otherwise
        basis = np.array(basis, dtype=np.int64).reshape(-1, ambient_dim)
        basis.setflags(write=False)
        self.p = int(p)
        self.ambient_dim = int(ambient_dim)
        self.basis = basis
        self._key = (self.p, self.ambient_dim, basis.shape[0], basis.tobytes())

    @classmethod
    def span(cls, vectors, p: int, ambient_dim: Optional[int] = None) -> "Subspace":
        M = vec(vectors, p)
        if ambient_dim is None:
            ambient_dim = M.shape[-1]
        M = M.reshape(-1, ambient_dim)
        if M.shape[0] == 0:
            return cls(M, p, ambient_dim)
        R, pivots = _rref(M, p)
        return cls(R[: len(pivots)], p, ambient_dim)

    @classmethod
    def zero(cls, p: int, ambient_dim: int) -> "Subspace":
        return cls(np.zeros((0, ambient_dim), dtype=np.int64), p, ambient_dim)

    @classmethod
    def full(cls, p: int, ambient_dim: int) -> "Subspace":
        return cls(np.eye(ambient_dim, dtype=np.int64), p, ambient_dim)

    def __eq__(self, other):
        return isinstance(other, Subspace) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Subspace(p={self.p}, ambient_dim={self.ambient_dim}, basis={self.basis.tolist()})"

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def size(self) -> int:
        return self.p**self.dim

    @property
    def pivots(self) -> List[int]:
        return [int(np.nonzero(row)[0][0]) for row in self.basis]

    def _check(self, other: "Subspace"):
        if self.p != other.p or self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("subspaces live in different ambient spaces")

    def contains(self, x) -> bool:
        x = vec(x, self.p).copy()
        if x.shape != (self.ambient_dim,):
            raise DimensionMismatch(f"vector of shape {x.shape} in ambient dimension {self.ambient_dim}")
        for row, c in zip(self.basis, self.pivots):
            if x[c]:
                x = (x - x[c] * row) % self.p
        return not x.any()

    __contains__ = contains

    def elements(self) -> np.ndarray:
        coeffs = all_vectors(self.p, self.dim)
        return (coeffs @ self.basis) % self.p

    def sum(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.span(np.concatenate([self.basis, other.basis]), self.p, self.ambient_dim)

    __add__ = sum

    def perp(self) -> "Subspace":
        """Orthogonal complement for the scalar product."""
        if self.dim == 0:
            return Subspace.full(self.p, self.ambient_dim)
        return Subspace.span(null_space_basis(self.basis, self.p), self.p, self.ambient_dim)

    def intersect(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return self.perp().sum(other.perp()).perp()

    def symp_complement(self) -> "Subspace":
        if self.ambient_dim % 2:
            raise DimensionMismatch("symplectic complement needs an even ambient dimension")
        if self.dim == 0:
            return Subspace.full(self.p, self.ambient_dim)
        om = symplectic_form(self.ambient_dim // 2)
        return Subspace.span(null_space_basis(self.basis @ om, self.p), self.p, self.ambient_dim)

    def involute(self) -> "Subspace":
        return Subspace.span(involution(self.basis, self.p), self.p, self.ambient_dim)

    def is_subspace_of(self, other: "Subspace") -> bool:
        self._check(other)
        return all(other.contains(row) for row in self.basis)

    def is_isotropic(self) -> bool:
        om = symplectic_form(self.ambient_dim // 2)
        return not ((self.basis @ om @ self.basis.T) % self.p).any()

    def is_lagrangian(self) -> bool:
        return 2 * self.dim == self.ambient_dim and self.is_isotropic()


def col_space(M, p: int) -> Subspace:
    M = vec(M, p)
    return Subspace.span(M.T, p, M.shape[0])


def row_space(M, p: int) -> Subspace:
    M = vec(M, p)
    return Subspace.span(M, p, M.shape[1])


def null_space(M, p: int) -> Subspace:
    M = vec(M, p)
    return Subspace.span(null_space_basis(M, p), p, M.shape[1])


def perp(X: Subspace) -> Subspace:
    return X.perp()


def symp_complement(X: Subspace) -> Subspace:
    return X.symp_complement()


def involute(X: Subspace) -> Subspace:
    return X.involute()


def member(x, X: Subspace) -> bool:
    return X.contains(x)


def intersect(X: Subspace, Y: Subspace) -> Subspace:
    return X.intersect(Y)


# ---------------------------------------------------------------------------
# Lagrangians and small searches
# ---------------------------------------------------------------------------

def enumerate_lagrangians(n: int, p: int) -> List[Subspace]:
    """All Lagrangian subspaces of F_p^{2n}, by repeated isotropic extension."""
    check_size(p ** (2 * n), LAGRANGIAN_ENUMERATION_LIMIT, "Lagrangian enumeration p^(2n)")
    inv = field(p).inverses
    level = {Subspace.zero(p, 2 * n)}
    for _ in range(n):
        nxt = set()
        for X in level:
            Y = X.symp_complement().elements()
            for row, c in zip(X.basis, X.pivots):  # reduce modulo X
                Y = (Y - np.outer(Y[:, c], row)) % p
            Y = Y[Y.any(axis=1)]
            lead = Y[np.arange(len(Y)), np.argmax(Y != 0, axis=1)]
            Y = np.unique((Y * inv[lead][:, None]) % p, axis=0)  # one vector per line
            for y in Y:
                nxt.add(Subspace.span(np.vstack([X.basis, y]), p, 2 * n))
        level = nxt
    return sorted(level, key=lambda X: X.basis.tolist())


def lagrangian_count(n: int, p: int) -> int:
    """Closed-form count prod_{i=1..n} (p^i + 1)."""
    out = 1
    for i in range(1, n + 1):
        out *= p**i + 1
    return out


def find_zero_sum_of_three_squares(p: int) -> Tuple[int, int, int]:
    """Lexicographically first nonzero (d1, d2, d3) with d1^2 + d2^2 + d3^2 = 0 mod p."""
    for d in itertools.product(range(p), repeat=3):
        if any(d) and sum(x * x for x in d) % p == 0:
            return d
    raise AssertionError("unreachable for odd primes")


def random_subspace(p: int, ambient_dim: int, dim: int, rng: np.random.Generator) -> Subspace:
    """Span of `dim` random vectors (dimension may come out smaller)."""
    return Subspace.span(rng.integers(0, p, size=(dim, ambient_dim)), p, ambient_dim)


def iter_nonzero(p: int, k: int) -> Iterable[np.ndarray]:
    return iter(all_vectors(p, k)[1:])
