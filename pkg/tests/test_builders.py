import itertools

import pytest

from stringy.algebra import GradedAlgebra, truncated_polynomial_algebra
from stringy.builders import (
    SHIPPED,
    BuildError,
    FrobeniusInput,
    build_named,
    build_point_orbifold,
    build_symmetric_product,
    p1_input,
    point_input,
)
from stringy.group import Group
from stringy.kclass import KClass, is_effective, obstruction, rank
from stringy.model import validate
from stringy.product import StringyProduct, verify_axioms, verify_route_agreement


def elliptic():
    return GradedAlgebra(
        "E",
        ["1", "a", "b", "ab"],
        [0, 1, 1, 2],
        {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (0, 2): {2: 1}, (2, 0): {2: 1},
         (0, 3): {3: 1}, (3, 0): {3: 1}, (1, 2): {3: 1}, (2, 1): {3: -1}},
        0,
        [0, 0, 0, 1],
    )


@pytest.mark.parametrize("name", SHIPPED)
def test_builder_outputs_validate(built, name):
    rep = validate(built(name))
    assert not rep.failures


def test_trivial_group():
    p = build_point_orbifold(Group.cyclic(1))
    prod = StringyProduct(p)
    assert prod.basis_product("e", 0, "e", 0) == p.untwisted.algebra.one()


def test_z2_point_orbifold():
    p = build_point_orbifold(Group.cyclic(2))
    assert len(p.sectors) == 2
    assert StringyProduct(p).basis_product("g", 0, "g", 0) == p.untwisted.algebra.one()


def test_sym2_of_point_matches_z2(built):
    a, b = built("sym2-point"), built("point-Z2")
    rename = {"e": "e", "(12)": "g"}
    pa, pb = StringyProduct(a), StringyProduct(b)
    for m1, m2 in itertools.product(a.ordered_elements(), repeat=2):
        assert pa.basis_product(m1, 0, m2, 0).coeffs == pb.basis_product(rename[m1], 0, rename[m2], 0).coeffs


def test_sym2_sector_data(built):
    p = built("sym2-P1")
    sec = p.sector("(12)")
    assert sec.algebra.dim == 2
    assert p.S("(12)") == KClass(sec.stratum.name, {"T[12]": "1/2"})
    assert sec.normal == KClass(sec.stratum.name, {"T[12]": 1})


@pytest.mark.parametrize("name", ["sym2-P1", "sym3-P1", "sym4-point"])
def test_obstruction_ranks_nonnegative_integers(built, name):
    p = built(name)
    for t in p.iter_triples():
        R = obstruction(t.m1, t.m2, p)
        r = rank(R)
        assert r.denominator == 1 and r >= 0
        assert R.is_zero() or is_effective(R)
        ages = sum(rank(p.S(m)) for m in t.elements)
        codim = rank(t.normal)
        assert r == ages - codim


def test_sym4_of_p1_builds():
    p = build_symmetric_product(p1_input(), 4)
    assert not validate(p).failures
    assert p.sector("(12)(34)").algebra.dim == 4


def test_odd_degree_input_koszul_signs():
    E = elliptic()
    Y = FrobeniusInput(E, {"T": E.zero()}, name="E")
    for n in (2, 3):
        p = build_symmetric_product(Y, n)
        assert not validate(p).failures
        assert verify_route_agreement(p, ["last-pivot"]).ok
        if n == 2:
            # the exhaustive triple sweep on Sym^3 E has 1.7M basis triples
            assert verify_axioms(p).ok
    with pytest.raises(BuildError, match="n <= 3"):
        build_symmetric_product(Y, 4)


def test_builder_rejections():
    with pytest.raises(BuildError):
        build_symmetric_product(p1_input(), 5)
    A = GradedAlgebra("noTrace", ["1"], [0], {(0, 0): {0: 1}}, 0)
    with pytest.raises(BuildError, match="trace"):
        build_symmetric_product(FrobeniusInput(A), 2)
    P1 = truncated_polynomial_algebra("P1", "x", 2, 1)
    with pytest.raises(BuildError, match="degree 2"):
        build_symmetric_product(FrobeniusInput(P1, {"T": P1.one()}), 2)
    with pytest.raises(BuildError, match="needs 1 lines"):
        build_symmetric_product(FrobeniusInput(elliptic(), {}), 2)
    with pytest.raises(BuildError, match="unknown dataset"):
        build_named("sym9-P7")


def test_point_input_is_trivial():
    Y = point_input()
    assert Y.dimension == 0
    assert Y.algebra.dim == 1
