import copy
from fractions import Fraction

import pytest

import oracles
from stringy.builders import build_symmetric_product, p1_input
from stringy.dataset import from_document, to_document
from stringy.kclass import Flavor, rank
from stringy.model import validate
from stringy.product import (
    RouteUnavailable,
    StringyElement,
    StringyProduct,
    check_obstructions,
    cocycle,
    obstruction_rank,
    product_degree,
    pushpull_product,
    pullpush_product,
    stringy_basis,
    verify_axioms,
    verify_route_agreement,
    verify_excess_route,
)

S = "(12)"


def test_worked_values_match_gram_oracle(shipped):
    p = shipped("sym2-P1")
    X = p.untwisted.algebra
    expected = oracles.sym2_p1_twisted_products()
    prod = StringyProduct(p)
    for (a, b), coeffs in expected.items():
        i = p.sector(S).algebra.index(a)
        j = p.sector(S).algebra.index(b)
        assert prod.basis_product(S, i, S, j) == X.element(coeffs)
    assert prod.basis_product(S, 0, S, 0) == X.element({"x⊗1": 1, "1⊗x": 1})
    assert prod.basis_product(S, 0, S, 1) == X.element({"x⊗x": 1})


def test_routes_agree_on_worked_values(shipped):
    p = shipped("sym2-P1")
    A = p.sector(S).algebra
    one = A.one()
    assert pushpull_product(one, S, one, S, p) == pullpush_product(one, S, one, S, p)


def test_cocycle_sym2(shipped):
    p = shipped("sym2-P1")
    gamma_t, gamma = cocycle(S, S, p)
    X = p.untwisted.algebra
    assert gamma == X.element({"x⊗1": 1, "1⊗x": 1})
    assert gamma_t.coefficient(0) == gamma
    _, unit = cocycle("e", S, p)
    assert unit == X.one()


def test_point_orbifold_is_group_algebra(shipped):
    p = shipped("point-S3")
    prod = StringyProduct(p)
    for m1 in p.ordered_elements():
        for m2 in p.ordered_elements():
            out = prod.multiply(StringyElement.basis(p, m1, 0), StringyElement.basis(p, m2, 0))
            assert out == StringyElement.basis(p, p.group.mul(m1, m2), 0)


@pytest.mark.parametrize("name", ["point-Z2", "sym2-point", "sym2-P1"])
def test_axioms_pass(shipped, name):
    for route in ("pullpush", "pushpull"):
        rep = verify_axioms(shipped(name), route)
        assert rep.ok, [str(f) for f in rep.failures]


def test_corrupted_pushforward_localized(shipped):
    doc = copy.deepcopy(to_document(shipped("sym3-P1")))
    for t in doc["triples"]:
        if (t["m1"], t["m2"]) == ("(123)", "(123)"):
            for col in t["pushforward"].values():
                for k in col:
                    col[k] = "3"
    p = from_document(doc)
    rep = verify_axioms(p)
    assoc = [f for f in rep.failures if f.check == "associativity" and f.witness.startswith("(")]
    assert assoc
    G = p.group
    bad = ("(123)", "(123)")
    for f in assoc:
        a, b, c = (v.rsplit("_", 1)[1] for v in f.witness[1:-1].split(", "))
        used = {(a, b), (G.mul(a, b), c), (b, c), (a, G.mul(b, c))}
        assert bad in used, f.witness


def test_grading_degree_rule(shipped):
    p = shipped("sym2-P1")
    # 1_s * 1_s has degree 0 + 0 + 2*0 + (4 - 2)
    assert product_degree(p, S, 0, S, 0) == 2
    assert obstruction_rank(p, S, S) == 0
    p3 = shipped("sym3-P1")
    assert obstruction_rank(p3, "(123)", "(123)") == 1


def test_obstructions_effective(shipped):
    for name in ("sym2-P1", "sym3-P1", "sym4-point"):
        assert check_obstructions(shipped(name)).ok


def test_route_agreement_second_section_set(shipped):
    rep = verify_route_agreement(shipped("sym2-P1"), ["last-pivot"])
    assert rep.ok
    assert rep.count("pass") == 2


def test_k_flavor_pushpull_unavailable():
    p = build_symmetric_product(p1_input(Flavor.K), 2, "sym2-P1-K")
    assert validate(p).ok
    with pytest.raises(RouteUnavailable):
        StringyProduct(p, "pushpull")
    assert verify_axioms(p).ok
    X = p.untwisted.algebra
    assert StringyProduct(p).basis_product(S, 0, S, 0) == X.element({"p⊗1": 1, "1⊗p": 1, "p⊗p": -1})
    assert all(f.status == "skip" for f in verify_route_agreement(p))


def test_excess_route_skips_half_integral_sector(shipped):
    rep = verify_excess_route(shipped("sym2-P1"))
    assert rep.ok
    skipped = [f for f in rep if f.status == "skip"]
    assert skipped and all("root extension" in f.witness for f in skipped)


def test_stringy_element_arithmetic(shipped):
    p = shipped("sym2-P1")
    a = StringyElement.basis(p, "e", 1)
    b = StringyElement.basis(p, S, 0)
    assert (a + b) - b == a
    assert (a.scale(Fraction(1, 2)) + a.scale(Fraction(1, 2))) == a
    assert len(stringy_basis(p)) == 6
