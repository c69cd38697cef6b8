"""Symplectic Fourier analysis of functions on F_p^{2n}.

Conventions:
    sft(f)(y)        = p^{-2n} sum_x omega^{[y,x]} f(x)
    inverse_sft(h)(x) = sum_y omega^{[x,y]} h(y)
    (f * g)(x)       = p^{-2n} sum_y f(y) g(x - y)

Functions are stored densely, indexed by the big-endian index of x = (v, w).
All transforms are the naive O(p^{4n}) sums, evaluated in row blocks.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, check_size
from .gf import Subspace, all_vectors, field, involution, vector_index
from .state import StateVector, weyl_expectations

TRANSFORM_LIMIT = 2**26
_BLOCK = 2**20


class PhaseDistribution:
    """A real or complex function on F_p^{2n}."""

    __slots__ = ("p", "n", "values")

    def __init__(self, values, p: int, n: int):
        values = np.asarray(values).reshape(-1)
        if values.size != p ** (2 * n):
            raise DimensionMismatch(f"{values.size} values for p={p}, n={n}")
        self.p = int(p)
        self.n = int(n)
        self.values = values

    @property
    def size(self) -> int:
        return self.values.size

    def labels(self) -> np.ndarray:
        return all_vectors(self.p, 2 * self.n)

    def __call__(self, x) -> complex | float:
        return self.values[int(vector_index(x, self.p))]

    def total(self):
        return self.values.sum()

    def mass(self, X: Subspace):
        return self.values[vector_index(X.elements(), self.p)].sum()

    def support(self, tol: float = 1e-12) -> np.ndarray:
        return self.labels()[np.abs(self.values) > tol]

    def real(self, tol: float = 1e-9) -> "PhaseDistribution":
        """Drop an imaginary part that must vanish; raise if it does not."""
        imag = float(np.max(np.abs(np.imag(self.values)), initial=0.0))
        if imag > tol:
            raise ValueError(f"imaginary part {imag:.3g} exceeds tolerance")
        return PhaseDistribution(np.real(self.values).copy(), self.p, self.n)

    def _like(self, other: "PhaseDistribution"):
        if (self.p, self.n) != (other.p, other.n):
            raise DimensionMismatch("distributions live on different spaces")

    def max_abs_diff(self, other: "PhaseDistribution") -> float:
        self._like(other)
        return float(np.max(np.abs(self.values - other.values)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"{self.p},{self.n}\n")
        vals = self.real().values if np.iscomplexobj(self.values) else self.values
        for x, val in zip(self.labels(), vals):
            buf.write(",".join(str(int(a)) for a in x) + "," + format(float(val), ".17g") + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PhaseDistribution":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        p, n = (int(a) for a in lines[0].split(","))
        values = np.zeros(p ** (2 * n))
        for ln in lines[1:]:
            parts = ln.split(",")
            x = np.array([int(a) for a in parts[:-1]])
            values[int(vector_index(x, p))] = float(parts[-1])
        return cls(values, p, n)

    def __repr__(self):
        return f"PhaseDistribution(p={self.p}, n={self.n})"


def delta(p: int, n: int, x=None) -> PhaseDistribution:
    vals = np.zeros(p ** (2 * n))
    vals[0 if x is None else int(vector_index(x, p))] = 1.0
    return PhaseDistribution(vals, p, n)


# ---------------------------------------------------------------------------
# distributions of a state
# ---------------------------------------------------------------------------

def characteristic_distribution(psi: StateVector) -> PhaseDistribution:
    """p_psi(x) = p^{-n} |<psi|W_x|psi>|^2."""
    E = weyl_expectations(psi)
    return PhaseDistribution(np.abs(E) ** 2 / psi.p**psi.n, psi.p, psi.n)


def involute_distribution(f: PhaseDistribution) -> PhaseDistribution:
    """j(x) = f(J x) with J(v, w) = (-v, w)."""
    idx = vector_index(involution(f.labels(), f.p), f.p)
    return PhaseDistribution(f.values[idx].copy(), f.p, f.n)


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

def _symplectic_kernel(f: PhaseDistribution, vals: np.ndarray) -> np.ndarray:
    """out(y) = sum_x omega^{[y, x]} vals(x)."""
    p, n = f.p, f.n
    N = p ** (2 * n)
    check_size(N * N, TRANSFORM_LIMIT, "symplectic transform p^(4n)")
    om = field(p).omega_powers
    X = all_vectors(p, 2 * n)
    Xv, Xw = X[:, :n], X[:, n:]
    out = np.zeros(N, dtype=complex)
    step = max(1, _BLOCK // N)
    for lo in range(0, N, step):
        Y = X[lo : lo + step]
        S = (Y[:, :n] @ Xw.T - Y[:, n:] @ Xv.T) % p
        out[lo : lo + step] = om[S] @ vals
    return out


def sft(f: PhaseDistribution) -> PhaseDistribution:
    vals = _symplectic_kernel(f, f.values.astype(complex))
    return PhaseDistribution(vals / f.p ** (2 * f.n), f.p, f.n)


def inverse_sft(h: PhaseDistribution) -> PhaseDistribution:
    return PhaseDistribution(_symplectic_kernel(h, h.values.astype(complex)), h.p, h.n)


def convolve(f: PhaseDistribution, g: PhaseDistribution) -> PhaseDistribution:
    f._like(g)
    p, n = f.p, f.n
    N = p ** (2 * n)
    check_size(N * N, TRANSFORM_LIMIT, "convolution p^(4n)")
    X = all_vectors(p, 2 * n)
    out = np.zeros(N, dtype=np.result_type(f.values, g.values))
    step = max(1, _BLOCK // N)
    for lo in range(0, N, step):
        diff = vector_index(X[lo : lo + step, None, :] - X[None, :, :], p)  # index of x - y
        out[lo : lo + step] = g.values[diff] @ f.values
    return PhaseDistribution(out / N, p, n)


def parseval_sides(f: PhaseDistribution, g: PhaseDistribution, t) -> tuple:
    """Both sides of p^{-2n} sum_x omega^{[t,x]} f(x) g(x) = sum_y fhat(y) ghat(t - y)."""
    f._like(g)
    p, n = f.p, f.n
    N = p ** (2 * n)
    X = all_vectors(p, 2 * n)
    t = np.mod(np.asarray(t, dtype=np.int64), p)
    phases = field(p).omega_powers[(X[:, n:] @ t[:n] - X[:, :n] @ t[n:]) % p]  # omega^{[t, x]}
    lhs = complex(np.sum(phases * f.values * g.values) / N)
    fh, gh = sft(f).values, sft(g).values
    rhs = complex(np.sum(fh * gh[vector_index(t[None, :] - X, p)]))
    return lhs, rhs


# ---------------------------------------------------------------------------
# Bell-difference distribution
# ---------------------------------------------------------------------------

def weyl_distribution(psi: StateVector) -> PhaseDistribution:
    """b_psi = p^{2n} (p_psi * j_psi)."""
    pd = characteristic_distribution(psi)
    jd = involute_distribution(pd)
    b = convolve(pd, jd)
    return PhaseDistribution(b.values * psi.p ** (2 * psi.n), psi.p, psi.n)


def weyl_distribution_fourier(psi: StateVector) -> PhaseDistribution:
    """b_psi(x) = sum_y omega^{[x,y]} p_psi(y) p_psi(J y), an independent route."""
    pd = characteristic_distribution(psi)
    jd = involute_distribution(pd)
    return inverse_sft(PhaseDistribution(pd.values * jd.values, psi.p, psi.n)).real()


class BellDifferenceClosedForm(NamedTuple):
    distribution: PhaseDistribution
    m_cap_jm: Subspace
    m_plus_jm: Subspace


def closed_form_bS(group) -> BellDifferenceClosedForm:
    """b for a stabiliser state: uniform 1/(|col V| |col W|) on col V x col W."""
    from .gf import col_space

    p, n = group.p, group.n
    cv, cw = col_space(group.V, p), col_space(group.W, p)
    X = all_vectors(p, 2 * n)
    on = np.array([cv.contains(x[:n]) and cw.contains(x[n:]) for x in X])
    vals = np.where(on, 1.0 / (cv.size * cw.size), 0.0)
    M = group.lagrangian
    JM = M.involute()
    cap, cup = M.intersect(JM), M + JM
    if cap.size * cup.size != p ** (2 * n):
        raise AssertionError("|M cap J(M)| |M + J(M)| != p^(2n)")
    return BellDifferenceClosedForm(PhaseDistribution(vals, p, n), cap, cup)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class MassIdentityReport:
    p_mass_X: float
    p_mass_perp_scaled: float
    b_mean_X: float
    pj_mass_perp: float

    def max_error(self) -> float:
        return max(abs(self.p_mass_X - self.p_mass_perp_scaled), abs(self.b_mean_X - self.pj_mass_perp))


def subspace_mass_identities(psi: StateVector, X: Subspace) -> MassIdentityReport:
    """Evaluate both sides of the two subspace mass identities for p_psi and b_psi."""
    pd = characteristic_distribution(psi)
    jd = involute_distribution(pd)
    bd = weyl_distribution(psi)
    Xs = X.symp_complement()
    pj = PhaseDistribution(pd.values * jd.values, psi.p, psi.n)
    return MassIdentityReport(
        p_mass_X=float(pd.mass(X)),
        p_mass_perp_scaled=float(X.size / psi.p**psi.n * pd.mass(Xs)),
        b_mean_X=float(bd.mass(X) / X.size),
        pj_mass_perp=float(pj.mass(Xs)),
    )


@dataclass
class SupportReport:
    weyl_dim: int
    p_mass: float
    b_mass: float

    def ok(self, tol: float = 1e-9) -> bool:
        return abs(self.p_mass - 1) <= tol and abs(self.b_mass - 1) <= tol


def support_check(psi: StateVector, tol: float = 1e-6) -> SupportReport:
    """Mass of p_psi on Weyl(psi)^perp_s and of b_psi on that set plus its J image."""
    from .stab import unsigned_stabilizer_group

    weyl = unsigned_stabilizer_group(psi, tol)
    comp = weyl.symp_complement()
    return SupportReport(
        weyl_dim=weyl.dim,
        p_mass=float(characteristic_distribution(psi).mass(comp)),
        b_mass=float(weyl_distribution(psi).mass(comp + comp.involute())),
    )
