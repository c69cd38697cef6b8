"""Stabiliser groups and their states.

A group is given by n commuting, independent generators omega^{s_i} W_{x_i}.
Its state |S> satisfies omega^{s_i} W_{x_i} |S> = |S>, i.e. W_{x_i}|S> = omega^{-s_i}|S>.
V and W are the n x n matrices whose i-th columns are v_i and w_i, x_i = (v_i, w_i).
"""

from __future__ import annotations

import json
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DependentGenerators,
    DimensionMismatch,
    InvariantViolation,
    NonCommuting,
    NotASubspace,
    check_size,
)
from .fourier import PhaseDistribution, characteristic_distribution  # noqa: F401 (re-export)
from .gf import (
    Subspace,
    all_vectors,
    col_space,
    enumerate_lagrangians,
    lagrangian_count,
    field,
    null_space,
    null_space_basis,
    rank,
    row_space,
    solve_linear,
    symplectic_product,
    vec,
    vector_index,
)
from .state import NORM_TOL, RngLike, StateVector, as_generator, weyl_expectations
from .weyl import WEYL_MATRIX_LIMIT, PauliElement, group_elements, pauli_matrix, weyl_action

UnsignedStabilizer = Subspace


class StabilizerGroup:
    """A validated stabiliser group on n qudits; build it with :func:`new_group`."""

    __slots__ = ("p", "n", "generators", "labels", "phases")

    def __init__(self, generators: Sequence[PauliElement], _validated: bool = False):
        if not _validated:
            raise TypeError("use new_group() to build a StabilizerGroup")
        self.generators = tuple(generators)
        self.p = self.generators[0].p
        self.n = self.generators[0].n
        self.labels = np.array([g.label for g in self.generators], dtype=np.int64)
        self.phases = np.array([g.phase_exp for g in self.generators], dtype=np.int64)
        self.labels.setflags(write=False)
        self.phases.setflags(write=False)

    @property
    def V(self) -> np.ndarray:
        return self.labels[:, : self.n].T.copy()

    @property
    def W(self) -> np.ndarray:
        return self.labels[:, self.n :].T.copy()

    @property
    def s(self) -> np.ndarray:
        return self.phases.copy()

    @property
    def lagrangian(self) -> Subspace:
        return Subspace.span(self.labels, self.p, 2 * self.n)

    def element_phase(self, x) -> int:
        """Phase c such that omega^c W_x lies in the group (x must lie in M)."""
        coeffs, _ = solve_linear(self.labels.T, x, self.p)
        if coeffs is None:
            raise ValueError(f"{vec(x, self.p).tolist()} is not in the group's Lagrangian")
        return int(coeffs @ self.phases % self.p)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "generators": [{"s": int(g.phase_exp), "x": [int(a) for a in g.label]} for g in self.generators],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "StabilizerGroup":
        p, n = int(d["p"]), int(d["n"])
        gens = [PauliElement(p, g["s"], tuple(g["x"])) for g in d["generators"]]
        if any(g.n != n for g in gens):
            raise DimensionMismatch("generator label length does not match n")
        return new_group(gens)

    @classmethod
    def from_json(cls, text: str) -> "StabilizerGroup":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        return isinstance(other, StabilizerGroup) and canonical_key(self) == canonical_key(other)

    def __hash__(self):
        return hash(canonical_key(self))

    def __repr__(self):
        gens = ", ".join(f"({g.phase_exp}, {list(g.label)})" for g in self.generators)
        return f"StabilizerGroup(p={self.p}, n={self.n}, [{gens}])"


def new_group(generators: Sequence[PauliElement]) -> StabilizerGroup:
    """Validate generators: same system, linearly independent, pairwise commuting, n of them."""
    gens = list(generators)
    if not gens:
        raise ValueError("a stabiliser group needs generators")
    p, n = gens[0].p, gens[0].n
    if any(g.p != p or g.n != n for g in gens):
        raise DimensionMismatch("generators act on different systems")
    X = np.array([g.label for g in gens], dtype=np.int64)
    dep = null_space_basis(X.T, p)
    if dep.shape[0]:
        raise DependentGenerators(np.nonzero(dep[0])[0].tolist())
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            c = symplectic_product(X[i], X[j], p)
            if c:
                raise NonCommuting(i, j, c)
    if len(gens) != n:
        raise ValueError(f"need exactly n={n} generators, got {len(gens)}")
    return StabilizerGroup(gens, _validated=True)


def group_from_arrays(phases, labels, p: int) -> StabilizerGroup:
    labels = vec(labels, p)
    return new_group([PauliElement(p, int(s), tuple(x)) for s, x in zip(vec(phases, p), labels)])


# ---------------------------------------------------------------------------
# canonical form
# ---------------------------------------------------------------------------

def canonicalize(G: StabilizerGroup) -> StabilizerGroup:
    """Same group, generated by the RREF basis of M with transported phases."""
    basis = G.lagrangian.basis
    phases = [G.element_phase(b) for b in basis]
    return group_from_arrays(phases, basis, G.p)


def canonical_key(G: StabilizerGroup) -> tuple:
    C = canonicalize(G)
    return (C.p, C.n, C.labels.tobytes(), C.phases.tobytes())


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

def state_closed_form(G: StabilizerGroup) -> StateVector:
    """Amplitude sum over q of omega^{s.q + u.Vq + inv2 q.V^T W q} at |u + Wq>."""
    p, n = G.p, G.n
    V, W, s = G.V, G.W, G.s
    z, _ = solve_linear(np.concatenate([V.T, W.T], axis=1), (-s) % p, p)
    if z is None:
        raise InvariantViolation("no u with V^T u + s in row(W)")
    u = z[:n]
    Q = all_vectors(p, n)
    VQ = Q @ V.T  # rows (V q)^T
    WQ = Q @ W.T
    exps = (Q @ s + VQ @ u + field(p).inv2 * np.sum(VQ * WQ, axis=1)) % p
    targets = vector_index(u[None, :] + WQ, p)
    amps = np.zeros(p**n, dtype=complex)
    np.add.at(amps, targets, field(p).omega_powers[exps])
    amps *= np.sqrt(col_space(W, p).size) / p**n
    psi = StateVector(amps, p, n)
    if abs(psi.norm() - 1) > NORM_TOL:
        raise InvariantViolation(f"closed-form state has norm {psi.norm()}")
    return psi


def group_element_list(G: StabilizerGroup) -> List[PauliElement]:
    return group_elements(G.generators)


def projector_matrix(G: StabilizerGroup) -> np.ndarray:
    """P = p^{-n} sum over all group elements of omega^c W_x, as a dense matrix."""
    check_size(G.p**G.n, WEYL_MATRIX_LIMIT, "projector dimension p^n")
    P = sum(pauli_matrix(e) for e in group_element_list(G))
    return P / G.p**G.n


def state_projector_oracle(G: StabilizerGroup) -> StateVector:
    """Project basis states |0>, |1>, ... with P until the image is nonzero."""
    p, n = G.p, G.n
    d = p**n
    check_size(d, WEYL_MATRIX_LIMIT, "projector dimension p^n")
    om = field(p).omega_powers
    actions = [(weyl_action(e.label, p), e.phase_exp) for e in group_element_list(G)]
    for k in range(d):
        col = np.zeros(d, dtype=complex)
        for (targets, exps), c in actions:
            col[targets[k]] += om[(exps[k] + c) % p]
        col /= d
        nrm = np.linalg.norm(col)
        if nrm > 1e-6:
            return StateVector(col / nrm, p, n)
    raise InvariantViolation("projector annihilates every basis state")


# ---------------------------------------------------------------------------
# unsigned stabiliser group and fidelity
# ---------------------------------------------------------------------------

def unsigned_stabilizer_group(psi: StateVector, tol: float = 1e-6) -> Subspace:
    """Weyl(psi) = {x : |<psi|W_x|psi>| >= 1 - tol}, checked to be an isotropic subspace."""
    p, n = psi.p, psi.n
    E = weyl_expectations(psi)
    labels = all_vectors(p, 2 * n)[np.abs(E) >= 1 - tol]
    X = Subspace.span(labels, p, 2 * n)
    if X.size != labels.shape[0]:
        raise NotASubspace(f"{labels.shape[0]} labels pass the threshold but they span {X.size} points")
    if not X.is_isotropic():
        raise NotASubspace("eigen-labels are not pairwise commuting")
    return X


def all_groups_on(M: Subspace) -> List[StabilizerGroup]:
    """The p^n groups on Lagrangian M, one per phase vector on its RREF basis."""
    p, n = M.p, M.ambient_dim // 2
    return [group_from_arrays(s, M.basis, p) for s in all_vectors(p, n)]


def enumerate_all_groups(n: int, p: int) -> List[StabilizerGroup]:
    return [G for M in enumerate_lagrangians(n, p) for G in all_groups_on(M)]


FIDELITY_WORK_LIMIT = 2**24


def check_fidelity_size(n: int, p: int) -> None:
    """Brute force touches (#Lagrangians) * p^n states of p^n amplitudes each."""
    check_size(lagrangian_count(n, p) * p ** (2 * n), FIDELITY_WORK_LIMIT, "stabiliser fidelity work")


def stabilizer_fidelity_bruteforce(psi: StateVector) -> Tuple[float, StabilizerGroup]:
    """max |<S|psi>|^2 over every stabiliser state, with the maximising group."""
    check_fidelity_size(psi.n, psi.p)
    best, arg = -1.0, None
    for M in enumerate_lagrangians(psi.n, psi.p):
        for G in all_groups_on(M):
            f = abs(np.vdot(state_closed_form(G).amps, psi.amps)) ** 2
            if f > best:
                best, arg = f, G
    return float(best), arg


def fidelity_bounds(psi: StateVector, M: Subspace) -> Tuple[float, float]:
    """(sum_M p_psi, sqrt of it) for a Lagrangian M."""
    if not M.is_lagrangian():
        raise ValueError("fidelity bounds need a Lagrangian subspace")
    mass = float(characteristic_distribution(psi).mass(M))
    return mass, float(np.sqrt(mass))


def generalized_fidelity_bounds(psi: StateVector, X: Subspace, Y: Subspace) -> Tuple[float, float]:
    """(p^n/|Y| sum_Y p_psi, sqrt(p^n/|X| sum_X p_psi)) for X inside M inside Y."""
    pd = characteristic_distribution(psi)
    pn = psi.p**psi.n
    lower = pn / Y.size * float(pd.mass(Y))
    upper = float(np.sqrt(pn / X.size * float(pd.mass(X))))
    return lower, upper


# ---------------------------------------------------------------------------
# random groups and structural checks
# ---------------------------------------------------------------------------

def random_lagrangian_basis(p: int, n: int, rng: RngLike) -> np.ndarray:
    """n vectors from repeated random isotropic extension (rows)."""
    gen = as_generator(rng)
    X = Subspace.zero(p, 2 * n)
    rows = []
    for _ in range(n):
        C = X.symp_complement()
        while True:
            y = (gen.integers(0, p, size=C.dim) @ C.basis) % p
            if not X.contains(y):
                break
        rows.append(y)
        X = X + Subspace.span(y, p, 2 * n)
    return np.array(rows, dtype=np.int64)


def random_group(p: int, n: int, rng: RngLike) -> StabilizerGroup:
    gen = as_generator(rng)
    labels = random_lagrangian_basis(p, n, gen)
    return group_from_arrays(gen.integers(0, p, size=n), labels, p)


def check_group_properties(G: StabilizerGroup) -> Dict[str, bool]:
    """The eight matrix identities satisfied by the generator matrices of any group."""
    p, n = G.p, G.n
    V, W = G.V, G.W
    full = Subspace.full(p, n)
    zero = Subspace.zero(p, n)
    nV, nW = null_space(V, p), null_space(W, p)
    VW = np.concatenate([V.T, W.T], axis=1)
    stacked = np.concatenate([W, -V], axis=0)
    return {
        "a": not ((V.T @ W - W.T @ V) % p).any(),
        "b": rank(np.concatenate([V, W], axis=0), p) == n,
        "c": row_space(V, p) + row_space(W, p) == full,
        "d": nV.intersect(nW) == zero,
        "e": null_space(VW, p) == col_space(stacked, p),
        "f": null_space(V.T @ W, p) == nV + nW,
        "g": null_space(W.T, p).is_subspace_of(col_space(V, p)),
        "h": null_space(V.T, p).is_subspace_of(col_space(W, p)),
    }


def stabilizes(G: StabilizerGroup, psi: StateVector) -> float:
    """Largest vector error ||omega^s W_x psi - psi|| over the generators."""
    from .state import apply_weyl

    om = field(G.p).omega_powers
    return max(
        float(np.linalg.norm(om[g.phase_exp] * apply_weyl(g.label, psi).amps - psi.amps)) for g in G.generators
    )
