import copy

import pytest

from stringy.algebra import LinearMap, point_algebra
from stringy.builders import SHIPPED
from stringy.dataset import from_document, to_document
from stringy.model import SectionUnavailable, find_section, normal_identity_holds, validate


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_datasets_validate_clean(shipped, name):
    rep = validate(shipped(name))
    assert rep.ok, [str(f) for f in rep.failures]
    assert rep.count("pass") > 0


@pytest.mark.parametrize("name", SHIPPED)
def test_normal_identity_every_sector(shipped, name):
    p = shipped(name)
    assert all(normal_identity_holds(p, m) for m in p.ordered_elements())


def corrupt(p, edit):
    doc = copy.deepcopy(to_document(p))
    edit(doc)
    return validate(from_document(doc))


def checks(rep):
    return {f.check for f in rep.failures}


def test_wrong_normal_class_named(shipped):
    def edit(doc):
        doc["sectors"]["(12)"]["normal"] = {"T[12]": "2"}

    rep = corrupt(shipped("sym2-P1"), edit)
    assert "normal-identity" in checks(rep)
    assert any("X^(12)" in f.witness for f in rep.failures if f.check == "normal-identity")


def test_missing_triple_is_structural(shipped):
    def edit(doc):
        doc["triples"] = doc["triples"][:-1]

    rep = corrupt(shipped("point-Z2"), edit)
    assert checks(rep) == {"structure"}


def test_duplicate_triple_is_ambiguous(shipped):
    def edit(doc):
        doc["triples"].append(doc["triples"][0])

    assert "ambiguous-triple" in checks(corrupt(shipped("point-Z2"), edit))


def test_broken_involution(shipped):
    def edit(doc):
        doc["sectors"]["(12)"]["involution"] = {"1": {"1": "1"}, "x": {"x": "2"}}

    assert "involution" in checks(corrupt(shipped("sym2-P1"), edit))


def test_non_morphism_pullback(shipped):
    def edit(doc):
        doc["sectors"]["(12)"]["pullback"]["x⊗x"] = {"x": "1"}

    assert "morphism" in checks(corrupt(shipped("sym2-P1"), edit))


def test_bad_stored_section(shipped):
    def edit(doc):
        doc["sectors"]["(12)"]["section"] = {"1": {"1⊗1": "1"}}

    assert "section" in checks(corrupt(shipped("sym2-P1"), edit))


def test_find_section_pivot_preferences(shipped):
    p = shipped("sym2-P1")
    pull = p.sector("(12)").pullback
    first = find_section(pull, "first")
    last = find_section(pull, "last")
    assert first != last
    for s in (first, last):
        assert (pull @ s).is_identity()
    x = pull.target.element({"x": 1})
    assert first(x) == pull.source.element({"x⊗1": 1})
    assert last(x) == pull.source.element({"1⊗x": 1})


def test_find_section_unavailable():
    A = point_algebra()
    with pytest.raises(SectionUnavailable, match="not cyclic"):
        find_section(LinearMap.zero(A, A))


def test_named_section_sets(shipped):
    p = shipped("sym2-P1")
    assert p.sections("last-pivot")["(12)"] != p.sections()["(12)"]
    with pytest.raises(Exception):
        p.sections("nonexistent")


def test_default_truncation_and_override(shipped):
    p = shipped("sym3-P1")
    assert p.T == 6
    assert p.with_truncation(12).T == 12
    assert p.T == 6
