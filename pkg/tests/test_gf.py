import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quditstab.errors import DimensionMismatch, SizeGuardError
from quditstab.gf import (
    FieldSpec,
    Subspace,
    all_vectors,
    enumerate_lagrangians,
    find_zero_sum_of_three_squares,
    lagrangian_count,
    random_subspace,
    rank,
    rref,
    scalar_product,
    solve_linear,
    symplectic_product,
    vector_index,
)

PRIMES = [3, 5, 7]


def brute_span(vectors, p):
    """All F_p combinations of the given rows, as a set of tuples."""
    vectors = np.asarray(vectors, dtype=np.int64).reshape(-1, np.shape(vectors)[-1])
    if len(vectors) == 0:
        return {(0,) * vectors.shape[1]}
    return {tuple(np.mod(np.array(c) @ vectors, p)) for c in itertools.product(range(p), repeat=len(vectors))}


def matrices(p_choices=PRIMES, max_rows=4, max_cols=4):
    @st.composite
    def build(draw):
        p = draw(st.sampled_from(p_choices))
        r = draw(st.integers(1, max_rows))
        c = draw(st.integers(1, max_cols))
        entries = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
        return p, np.array(entries, dtype=np.int64).reshape(r, c)

    return build()


# -- field and products -------------------------------------------------------

def test_field_spec():
    for p in PRIMES + [11, 101]:
        f = FieldSpec(p)
        assert (2 * f.inv2) % p == 1
        for a in range(1, p):
            assert (a * f.inv(a)) % p == 1
    for bad in (2, 4, 9, 1, 0):
        with pytest.raises(ValueError):
            FieldSpec(bad)


def test_scalar_product_examples():
    assert scalar_product([1, 2], [2, 2], 3) == 0
    assert scalar_product([0, 0, 0], [4, 1, 3], 5) == 0
    assert scalar_product([1, 1], [3, 4], 7) == 0
    with pytest.raises(DimensionMismatch):
        scalar_product([1, 2], [1, 2, 3], 3)


def test_symplectic_product_examples():
    assert symplectic_product([1, 0], [0, 1], 3) == 1
    assert symplectic_product([1, 2], [2, 1], 3) == 0
    with pytest.raises(DimensionMismatch):
        symplectic_product([1, 0], [1, 0, 0, 0], 3)


@given(st.sampled_from(PRIMES), st.integers(1, 3), st.data())
def test_symplectic_product_antisymmetric_bilinear(p, n, data):
    vecs = st.lists(st.integers(0, p - 1), min_size=2 * n, max_size=2 * n)
    x, y, z = (np.array(data.draw(vecs)) for _ in range(3))
    a = data.draw(st.integers(0, p - 1))
    assert symplectic_product(x, x, p) == 0
    assert symplectic_product(x, y, p) == (-symplectic_product(y, x, p)) % p
    assert symplectic_product(a * x + z, y, p) == (a * symplectic_product(x, y, p) + symplectic_product(z, y, p)) % p


def test_vector_index_roundtrip():
    for p, k in [(3, 1), (3, 3), (5, 2)]:
        V = all_vectors(p, k)
        assert V.shape == (p**k, k)
        assert np.array_equal(vector_index(V, p), np.arange(p**k))
    assert all_vectors(3, 2)[5].tolist() == [1, 2]  # big-endian


# -- elimination ---------------------------------------------------------------

def test_rref_examples():
    R, r = rref([[1, 2], [2, 1]], 3)
    assert r == 1 and R[0].tolist() == [1, 2] and not R[1].any()
    R, r = rref(np.eye(3, dtype=int), 5)
    assert r == 3 and np.array_equal(R, np.eye(3))
    R, r = rref(np.zeros((2, 3), dtype=int), 3)
    assert r == 0 and not R.any()


@settings(max_examples=60, deadline=None)
@given(matrices(p_choices=[3, 5], max_rows=3, max_cols=3))
def test_rref_rank_matches_brute_force_span(pm):
    p, M = pm
    R, r = rref(M, p)
    assert len(brute_span(M, p)) == p**r
    assert brute_span(R[:r], p) == brute_span(M, p)
    # reduced echelon shape: pivot columns are unit vectors
    for i in range(r):
        c = int(np.nonzero(R[i])[0][0])
        assert R[i, c] == 1 and np.count_nonzero(R[:, c]) == 1


def test_solve_linear_examples():
    x, null = solve_linear([[1, 1]], [0], 3)
    assert x.tolist() == [0, 0]
    assert null == Subspace.span([[1, 2]], 3)
    x, null = solve_linear(np.eye(3, dtype=int), [2, 0, 1], 3)
    assert x.tolist() == [2, 0, 1] and null.dim == 0
    x, _ = solve_linear([[1, 0], [1, 0]], [1, 2], 3)
    assert x is None


@settings(max_examples=60, deadline=None)
@given(matrices(p_choices=[3, 5], max_rows=3, max_cols=3), st.data())
def test_solve_linear_against_enumeration(pm, data):
    p, A = pm
    b = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=A.shape[0], max_size=A.shape[0])))
    sols = [x for x in all_vectors(p, A.shape[1]) if not ((A @ x - b) % p).any()]
    x, null = solve_linear(A, b, p)
    if not sols:
        assert x is None
    else:
        assert x is not None and not ((A @ x - b) % p).any()
        assert len(sols) == null.size
        kernel = {tuple(v) for v in all_vectors(p, A.shape[1]) if not ((A @ v) % p).any()}
        assert {tuple(v) for v in null.elements()} == kernel


# -- subspaces -------------------------------------------------------------------

def test_subspace_canonical_equality():
    X = Subspace.span([[1, 1, 0], [0, 1, 1]], 3)
    Y = Subspace.span([[1, 2, 1], [2, 2, 0], [0, 2, 2]], 3)
    assert X == Y and hash(X) == hash(Y)
    assert X != Subspace.span([[1, 0, 0]], 3)


def test_subspace_examples():
    line = Subspace.span([[1, 0]], 3)
    assert line.symp_complement() == line
    assert Subspace.full(5, 3).perp().dim == 0
    assert Subspace.zero(3, 4).symp_complement() == Subspace.full(3, 4)
    with pytest.raises(DimensionMismatch):
        line.sum(Subspace.full(3, 4))


def test_complement_sizes_random():
    rng = np.random.default_rng(1)
    for _ in range(50):
        X = random_subspace(3, 4, int(rng.integers(0, 5)), rng)
        assert X.size * X.symp_complement().size == 3**4


def test_complements_against_brute_force():
    rng = np.random.default_rng(2)
    for _ in range(30):
        p, d = 3, 4
        X = random_subspace(p, d, int(rng.integers(0, 4)), rng)
        elems = X.elements()
        allv = all_vectors(p, d)
        perp = {tuple(y) for y in allv if not (elems @ y % p).any()}
        symp = {tuple(y) for y in allv if all(symplectic_product(x, y, p) == 0 for x in elems)}
        assert {tuple(y) for y in X.perp().elements()} == perp
        assert {tuple(y) for y in X.symp_complement().elements()} == symp


def test_double_complements_and_involution():
    rng = np.random.default_rng(3)
    for _ in range(100):
        p = int(rng.choice([3, 5]))
        X = random_subspace(p, 4, int(rng.integers(0, 5)), rng)
        assert X.perp().perp() == X
        assert X.symp_complement().symp_complement() == X
        assert X.symp_complement().involute() == X.involute().symp_complement()
        assert X.involute().involute() == X


def test_intersection_and_sum_brute_force():
    rng = np.random.default_rng(4)
    for _ in range(30):
        X = random_subspace(3, 3, 2, rng)
        Y = random_subspace(3, 3, 2, rng)
        ex = {tuple(v) for v in X.elements()}
        ey = {tuple(v) for v in Y.elements()}
        assert {tuple(v) for v in X.intersect(Y).elements()} == ex & ey
        assert (X + Y).size == len({tuple((np.array(a) + np.array(b)) % 3) for a in ex for b in ey})
        for v in all_vectors(3, 3):
            assert X.contains(v) == (tuple(v) in ex)


def test_character_sum_over_subspace():
    rng = np.random.default_rng(5)
    for _ in range(40):
        p = int(rng.choice([3, 5]))
        n = int(rng.integers(1, 4))
        V = random_subspace(p, n, int(rng.integers(0, n + 1)), rng)
        w = rng.integers(0, p, n)
        total = np.sum(np.exp(2j * np.pi * (V.elements() @ w % p) / p))
        expected = V.size if V.perp().contains(w) else 0
        assert abs(total - expected) <= 1e-9


def test_level_sets_have_equal_size():
    p = 3
    for n in (1, 2, 3):
        rng = np.random.default_rng(n)
        for _ in range(10):
            V = random_subspace(p, n, n, rng)
            for w in all_vectors(p, n):
                if V.perp().contains(w):
                    continue
                counts = np.bincount(V.elements() @ w % p, minlength=p)
                assert np.all(counts == V.size // p)


# -- Lagrangians and small searches ---------------------------------------------

def test_lagrangians_small():
    lines = enumerate_lagrangians(1, 3)
    assert set(lines) == {Subspace.span([v], 3) for v in ([1, 0], [0, 1], [1, 1], [1, 2])}
    assert len(enumerate_lagrangians(1, 5)) == 6
    for M in enumerate_lagrangians(2, 3):
        assert M.is_lagrangian() and M.symp_complement() == M


def test_lagrangians_match_filter_over_all_planes():
    p, d = 3, 4
    planes = set()
    for a, b in itertools.combinations(all_vectors(p, d)[1:], 2):
        X = Subspace.span([a, b], p)
        if X.dim == 2:
            planes.add(X)
    assert len(planes) == 130  # Gaussian binomial [4 choose 2]_3
    lagr = {X for X in planes if X.symp_complement() == X}
    assert len(lagr) == 40
    assert lagr == set(enumerate_lagrangians(2, p))


def test_lagrangian_count_formula_n3():
    assert len(enumerate_lagrangians(3, 3)) == lagrangian_count(3, 3) == 1120


def test_lagrangian_size_guard():
    with pytest.raises(SizeGuardError):
        enumerate_lagrangians(11, 3)


def test_three_squares():
    assert find_zero_sum_of_three_squares(3) == (1, 1, 1)
    assert find_zero_sum_of_three_squares(5) == (0, 1, 2)
    assert find_zero_sum_of_three_squares(7) == (1, 2, 3)
    for p in [11, 13, 17, 19, 23, 101]:
        d = find_zero_sum_of_three_squares(p)
        assert any(d) and sum(x * x for x in d) % p == 0


def test_rank_helper():
    assert rank([[1, 2, 0], [2, 4, 0]], 5) == 1
    assert rank(np.zeros((0, 3), dtype=int), 3) == 0
