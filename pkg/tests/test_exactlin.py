from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import rationals
from ncdef.exactlin import (
    DualScalar,
    PrimeScalar,
    SparseMatrix,
    as_scalar,
    mat_inverse,
    mat_mul,
    nullspace,
    pivot_columns,
    prime_from_seed,
    rank,
    rank_mod_p,
    rref,
    solve,
    subspace_equal,
)
from ncdef.quadalg import QuadraticAlgebra, ideal_component_matrix


def dense(rows):
    return SparseMatrix.from_rows([{j: Fraction(v) for j, v in enumerate(r) if v} for r in rows], len(rows[0]))


def dense_rank(rows):
    """Plain Gaussian elimination on lists, independent of the sparse code."""
    m = [[Fraction(v) for v in r] for r in rows]
    r = 0
    for c in range(len(m[0]) if m else 0):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
    return r


matrices = st.integers(1, 5).flatmap(
    lambda cols: st.lists(st.lists(rationals(4, 3), min_size=cols, max_size=cols), min_size=1, max_size=6)
)


def test_rref_proportional_rows():
    r, basis = rref(dense([[1, 2], [2, 4]]))
    assert r == 1
    assert basis.row(0) == {0: 1, 1: 2}


def test_rref_identity():
    r, basis = rref(dense([[1, 0, 0], [0, 1, 0], [0, 0, 1]]))
    assert r == 3
    assert [basis.row(i) for i in range(3)] == [{0: 1}, {1: 1}, {2: 1}]


def test_rank_hand_elimination():
    assert rank(dense([[1, 1, 0], [0, 1, 1], [1, 0, -1]])) == 2


def test_empty_matrix():
    assert rref(SparseMatrix.from_rows([], 3))[0] == 0


@given(matrices)
def test_rank_matches_dense_oracle(rows):
    assert rank(dense(rows)) == dense_rank(rows)


@given(matrices)
def test_rref_idempotent_and_canonical(rows):
    r, basis = rref(dense(rows))
    r2, basis2 = rref(basis)
    assert (r, basis) == (r2, basis2)
    piv = pivot_columns(basis)
    assert piv == sorted(set(piv))
    assert all(basis.row(i)[c] == 1 for i, c in enumerate(piv))


@given(matrices)
def test_nullspace_is_kernel(rows):
    m = dense(rows)
    ker = nullspace(m)
    assert len(ker) == m.cols - rank(m)
    for v in ker:
        for r in range(m.rows):
            assert sum(c * v.get(j, 0) for j, c in m.row(r).items()) == 0


@given(matrices, st.data())
def test_solve_consistent_system(rows, data):
    m = dense(rows)
    x = data.draw(st.lists(rationals(), min_size=m.cols, max_size=m.cols))
    rhs = {r: sum(c * x[j] for j, c in m.row(r).items()) for r in range(m.rows)}
    sol = solve(m, rhs)
    assert sol is not None
    for r in range(m.rows):
        assert sum(c * sol.get(j, 0) for j, c in m.row(r).items()) == rhs[r]


def test_solve_inconsistent():
    assert solve(dense([[1, 1], [2, 2]]), {0: Fraction(1), 1: Fraction(3)}) is None


def test_subspace_equal_examples():
    xy = [0, 1, -1, 0]
    assert subspace_equal(dense([xy]), dense([[2 * v for v in xy]]))
    assert subspace_equal(dense([[1, 0], [0, 1]]), dense([[1, 1], [1, -1]]))
    assert not subspace_equal(dense([[1, 0]]), dense([[0, 1]]))
    with pytest.raises(ValueError):
        subspace_equal(dense([[1, 0]]), dense([[1, 0, 0]]))


def test_rank_mod_p_small():
    assert rank_mod_p(dense([[int(i == j) for j in range(4)] for i in range(4)]), seed=3) == 4
    assert rank_mod_p(SparseMatrix.from_rows([{}, {}], 3)) == 0


def test_rank_mod_p_degree7_commutative():
    m = ideal_component_matrix(QuadraticAlgebra.commutative(4), 7)
    assert rank_mod_p(m, seed=0) == 4**7 - 120


@given(matrices, st.integers(0, 50))
def test_rank_mod_p_never_exceeds_exact(rows, seed):
    m = dense(rows)
    assert rank_mod_p(m, seed) <= rank(m)


def test_rank_mod_p_agrees_on_seeded_trials():
    import random

    rng = random.Random(11)
    agree = 0
    for trial in range(100):
        rows = [[Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(6)] for _ in range(5)]
        agree += rank_mod_p(dense(rows), trial) == rank(dense(rows))
    assert agree >= 99


def test_primes_are_large_and_deterministic():
    p = prime_from_seed(5)
    assert p > 2**60 and p == prime_from_seed(5)
    assert all(p % q for q in (2, 3, 5, 7, 11, 13))


@given(rationals(), rationals(), rationals(), rationals())
def test_dual_numbers(a, b, c, d):
    x, y = DualScalar(a, b), DualScalar(c, d)
    assert x * y == DualScalar(a * c, a * d + b * c)
    assert x + y == DualScalar(a + c, b + d)
    assert DualScalar.eps() * DualScalar.eps() == 0
    if a:
        assert x * x.inverse() == 1
        assert (1 / x) * x == 1


@given(rationals(), rationals())
def test_prime_scalar_is_a_ring_map(a, b):
    pa, pb = PrimeScalar.from_rational(a), PrimeScalar.from_rational(b)
    assert pa * pb == PrimeScalar.from_rational(a * b)
    assert pa + pb == PrimeScalar.from_rational(a + b)


def test_as_scalar():
    assert as_scalar("3/6") == Fraction(1, 2)
    assert as_scalar(4) == 4
    with pytest.raises(TypeError):
        as_scalar(0.5)


def test_matrix_inverse():
    a = [[2, 1], [1, 1]]
    assert mat_mul(a, mat_inverse(a)) == [[1, 0], [0, 1]]
    with pytest.raises(ValueError):
        mat_inverse([[1, 2], [2, 4]])
