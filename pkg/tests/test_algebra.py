from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from stringy import linalg
from stringy.algebra import (
    AlgebraError,
    GradedAlgebra,
    LinearMap,
    adjoint_pushforward,
    check_algebra,
    multiplication_map,
    point_algebra,
    q,
    tensor_product,
    truncated_polynomial_algebra,
)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def square(n):
    return st.lists(st.lists(rationals, min_size=n, max_size=n), min_size=n, max_size=n)


@given(square(3))
def test_inverse_roundtrip_or_singular(m):
    if linalg.determinant(m) == 0:
        with pytest.raises(linalg.SingularMatrixError):
            linalg.inverse(m)
        assert linalg.rank(m) < 3
    else:
        inv = linalg.inverse(m)
        assert linalg.matmul(m, inv) == linalg.identity(3)


@given(square(3), square(3))
def test_determinant_multiplicative(a, b):
    assert linalg.determinant(linalg.matmul(a, b)) == linalg.determinant(a) * linalg.determinant(b)


def test_rref_prefers_first_pivot():
    red, piv = linalg.rref([[0, 1, 1], [0, 2, 2]])
    assert piv == [1]
    assert red[0] == [0, 1, 1]


def test_particular_solution_inconsistent():
    assert linalg.particular_solution([[1, 1], [2, 2]], [1, 3], 2) is None
    assert linalg.particular_solution([[1, 1], [2, 2]], [1, 2], 2) == [1, 0]


def test_q_refuses_floats():
    assert q("3/2") == Fraction(3, 2)
    with pytest.raises(TypeError):
        q(0.5)


def test_truncated_polynomial():
    A = truncated_polynomial_algebra("P2", "h", 2, 2)
    h = A.element({"h": 1})
    assert h * h == A.element({"h^2": 1})
    assert (h * h * h).is_zero()
    assert (h * h).trace() == 1
    assert check_algebra(A).ok
    assert A.top_degree == 4


def exterior():
    return GradedAlgebra("L", ["1", "e"], [0, 1], {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}}, 0, [0, 1])


def test_koszul_sign_in_tensor_product():
    L = exterior()
    LL = tensor_product([L, L])
    e1 = LL.element({"e⊗1": 1})
    e2 = LL.element({"1⊗e": 1})
    assert e1 * e2 == LL.element({"e⊗e": 1})
    assert e2 * e1 == LL.element({"e⊗e": -1})
    assert check_algebra(LL).ok


def test_tensor_basis_first_factor_fastest():
    A = truncated_polynomial_algebra("P1", "x", 2, 1)
    assert tensor_product([A, A]).basis == ("1⊗1", "x⊗1", "1⊗x", "x⊗x")


def test_check_algebra_names_witness():
    bad = GradedAlgebra("bad", ["1", "a"], [0, 2], {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (1, 1): {0: 1}}, 0)
    rep = check_algebra(bad)
    assert not rep.ok
    assert any(f.check == "degree-additivity" and "(a,a)" in f.witness for f in rep.failures)


def test_degenerate_pairing_reported():
    A = GradedAlgebra("A", ["1", "x"], [0, 2], {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}}, 0, [1, 0])
    assert any(f.check == "frobenius-pairing" for f in check_algebra(A).failures)


@settings(max_examples=30)
@given(st.lists(rationals, min_size=4, max_size=4), st.lists(rationals, min_size=2, max_size=2))
def test_adjoint_pushforward_projection_formula(y, a):
    A = truncated_polynomial_algebra("P1", "x", 2, 1)
    AA = tensor_product([A, A])
    pull = multiplication_map(A, AA)
    push = adjoint_pushforward(pull)
    yy, aa = AA.element(y), A.element(a)
    assert push(pull(yy) * aa) == yy * push(aa)


def test_adjoint_pushforward_of_diagonal():
    A = truncated_polynomial_algebra("P1", "x", 2, 1)
    push = adjoint_pushforward(multiplication_map(A))
    AA = push.target
    assert push(A.one()) == AA.element({"x⊗1": 1, "1⊗x": 1})
    assert push(A.element({"x": 1})) == AA.element({"x⊗x": 1})


def test_linear_map_composition_and_identity():
    A = point_algebra()
    f = LinearMap(A, A, [[2]])
    assert (f @ f) == LinearMap(A, A, [[4]])
    assert LinearMap.identity(A).is_identity()
    assert f.morphism_failures()


def test_element_errors_on_unknown_basis():
    with pytest.raises(AlgebraError):
        point_algebra().element({"y": 1})
