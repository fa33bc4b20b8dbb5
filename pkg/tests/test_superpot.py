from fractions import Fraction

import sympy
from hypothesis import given, strategies as st

from conftest import rationals
from ncdef.exactlin import mat_inverse, mat_mul
from ncdef.multilinear import Tensor, TensorSubspace, bracket_antisym, cyc_shift, cyclic_sign, supercyclic_sum
from ncdef.quadalg import QuadraticAlgebra
from ncdef.superpot import cy_report, derived_algebra, derived_relations, find_twist, is_supercyclic

coef = rationals(5, 3)


def square(n):
    return st.lists(st.lists(coef, min_size=n, max_size=n), min_size=n, max_size=n).filter(
        lambda m: sympy.Matrix(m).det() != 0
    )


def bilinear(c):
    n = len(c)
    return Tensor(n, 2, {(i, j): c[i][j] for i in range(n) for j in range(n)})


def ident(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def twist_holds(phi, q):
    d = phi.degree
    return cyc_shift(phi) == phi.apply_linear([q] + [ident(phi.n)] * (d - 1)) * cyclic_sign(d)


def test_twisted_bilinear_example():
    phi = Tensor.word(2, (0, 1)) - 2 * Tensor.word(2, (1, 0))
    tw = find_twist(phi)
    assert tw.status == "unique"
    assert tw.q == [[2, 0], [0, Fraction(1, 2)]]
    assert not tw.is_identity


@given(square(3))
def test_bilinear_twist_closed_form(c):
    # for phi = sum c_ij x_i x_j the equation reads C^T = -Q C
    tw = find_twist(bilinear(c))
    expected = -sympy.Matrix(c).T * sympy.Matrix(c).inv()
    assert tw.status == "unique"
    assert sympy.Matrix(tw.q) == expected
    assert twist_holds(bilinear(c), tw.q)


@given(square(2), square(2))
def test_twist_is_gl_equivariant(c, g):
    phi = bilinear(c)
    q = find_twist(phi).q
    moved = find_twist(phi.apply_linear([g, g])).q
    assert moved == mat_mul(mat_mul(g, q), mat_inverse(g))


def test_ambiguous_and_missing_twists():
    assert find_twist(Tensor.word(2, (0, 0))).status == "ambiguous"
    assert find_twist(Tensor.word(2, (0, 1))).status == "none"


@given(st.dictionaries(st.tuples(*[st.integers(0, 2)] * 4), coef, max_size=4))
def test_supercyclic_sum_is_supercyclic(terms):
    phi = supercyclic_sum(Tensor(3, 4, terms))
    assert is_supercyclic(phi)
    if phi:
        tw = find_twist(phi)
        assert tw.status != "none" and twist_holds(phi, tw.q)


def test_commutative_superpotential():
    phi = bracket_antisym(4, (0, 1, 2, 3))
    assert is_supercyclic(phi)
    assert find_twist(phi).is_identity
    assert derived_relations(phi) == QuadraticAlgebra.commutative(4).relations
    rep = cy_report(phi, K=5)
    assert rep.passed and rep.top_derivative_dim == 4
    assert rep.hilbert == [1, 4, 10, 20, 35, 56]
    assert rep.to_json()["pass"] is True


@given(square(4))
def test_derived_relations_are_gl_equivariant(g):
    phi = bracket_antisym(4, (0, 1, 2, 3)) + supercyclic_sum(Tensor.word(4, (0, 0, 1, 2)))
    moved = derived_relations(phi.apply_linear([g] * 4))
    assert moved == TensorSubspace(4, 2, [r.apply_linear([g, g]) for r in derived_relations(phi).basis])


def test_cy_report_rejects_non_cyclic_and_degenerate():
    rep = cy_report(Tensor.word(4, (0, 1, 2, 3)), K=3)
    assert not rep.untwisted and not rep.passed
    # supercyclic but only three variables appear
    rep = cy_report(supercyclic_sum(Tensor.word(4, (0, 1, 2, 2))), K=3)
    assert (rep.twist_status, rep.top_derivative_dim) == ("ambiguous", 3)
    assert not rep.hilbert_ok and not rep.passed


def test_derived_algebra_dimension():
    phi = bracket_antisym(4, (0, 1, 2, 3))
    assert derived_algebra(phi).relations.dim == 6
