from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from stringy.algebra import AlgebraError, check_algebra, truncated_polynomial_algebra
from stringy.group import Group, GroupError, cycles, parse_permutation, permutation_name
from stringy.roots import adjoin_root, embed_into


def test_symmetric_group_basics():
    G = Group.symmetric(3)
    assert len(G) == 6
    assert G.validate().ok
    assert G.order("(123)") == 3
    assert G.inv("(123)") == "(132)"
    assert G.mul("(12)", "(12)") == "e"


def test_cyclic_group():
    G = Group.cyclic(4)
    assert G.elements == ("e", "g", "g^2", "g^3")
    assert G.mul("g^3", "g^2") == "g"
    assert G.order("g^2") == 2


def test_from_spec_errors():
    assert Group.from_spec("symmetric:4").spec == "symmetric:4"
    for bad in ("dihedral:4", "cyclic:x"):
        with pytest.raises(GroupError):
            Group.from_spec(bad)


def test_validate_reports_nonassociative_table():
    els = ["e", "a", "b"]
    table = {"e": {"e": "e", "a": "a", "b": "b"}, "a": {"e": "a", "a": "e", "b": "e"}, "b": {"e": "b", "a": "e", "b": "a"}}
    rep = Group(els, table, "e").validate()
    assert not rep.ok
    assert {f.check for f in rep.failures} & {"group-associativity", "group-inverse"}


def test_validate_reports_missing_product():
    rep = Group(["e", "a"], {"e": {"e": "e", "a": "a"}, "a": {"e": "a"}}, "e").validate()
    assert [f.check for f in rep.failures] == ["group-closure"]


@given(st.permutations(range(4)))
def test_permutation_name_roundtrip(perm):
    perm = tuple(perm)
    assert parse_permutation(permutation_name(perm), 4) == perm
    assert sum(len(c) for c in cycles(perm)) == 4


def test_square_root_of_tangent_class():
    A = truncated_polynomial_algebra("P1", "x", 2, 1)
    two_x = A.element({"x": 2})
    R = adjoin_root(A, two_x, 2)
    w = R.root()
    assert w * w == embed_into(R, two_x)
    assert w.degrees() == {Fraction(1)}
    assert check_algebra(R).ok
    assert w ** 3 == embed_into(R, two_x) * w
    assert (w ** 4).is_zero()


def test_cube_root_tower_is_ungraded_bookkeeping():
    A = truncated_polynomial_algebra("P1", "x", 2, 1)
    R = adjoin_root(A, A.element({"x": 2}), 3)
    assert not R.graded
    w = R.root()
    assert w ** 3 == embed_into(R, A.element({"x": 2}))


def test_root_order_one_is_identity():
    A = truncated_polynomial_algebra("P1", "x", 2, 1)
    assert adjoin_root(A, A.one(), 1) is A
    with pytest.raises(AlgebraError):
        adjoin_root(A, A.one(), 0)
