"""Global quotient presentations: sectors, triples, sections and their validation.

Conventions for the stored maps (all are pullbacks unless named otherwise):

* ``Sector.pullback``     i_m^*  : F(X)          -> F(X^m)
* ``Sector.involution``   ∨^*    : F(X^{m^-1})   -> F(X^m)
* ``Sector.pushforward``  i_m*   : F(X^m)        -> F(X)
* ``Sector.section``      i_ms   : F(X^m)        -> F(X)
* ``TripleData.pullbacks[k]``  e_k^* : F(X^{m_k}) -> F(X^m)
* ``TripleData.pushforward``   ě_3*  : F(X^m)     -> F(X^{m3^-1})

Line-generator tables map generator names on the coarser stratum to names
on the finer one (``Sector.restriction`` from X, ``TripleData.restrictions[k]``
from X^{m_k}, ``Sector.involution_lines`` from X^{m^-1}).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from . import linalg
from .algebra import GradedAlgebra, LinearMap, check_algebra
from .findings import CheckReport
from .group import Group
from .kclass import Flavor, KClass, Stratum, compute_S, euler_class, k_combine, rank


class PresentationError(ValueError):
    pass


class SectionUnavailable(PresentationError):
    pass


@dataclass
class Sector:
    element: str
    stratum: Stratum
    pullback: LinearMap
    involution: LinearMap
    normal: KClass
    eigen: dict[int, KClass]
    restriction: dict[str, str]
    involution_lines: dict[str, str]
    pushforward: LinearMap | None = None
    section: LinearMap | None = None

    @property
    def algebra(self) -> GradedAlgebra:
        return self.stratum.algebra


@dataclass
class TripleData:
    m1: str
    m2: str
    m3: str
    stratum: Stratum
    pullbacks: tuple[LinearMap, LinearMap, LinearMap]
    restrictions: tuple[dict[str, str], dict[str, str], dict[str, str]]
    pushforward: LinearMap
    normal: KClass
    normal_m3: KClass

    @property
    def elements(self) -> tuple[str, str, str]:
        return (self.m1, self.m2, self.m3)

    @property
    def algebra(self) -> GradedAlgebra:
        return self.stratum.algebra


@dataclass
class QuotientPresentation:
    name: str
    flavor: Flavor
    group: Group
    sectors: dict[str, Sector]
    triples: dict[tuple[str, str], TripleData]
    truncation: int | None = None
    section_sets: dict[str, dict[str, LinearMap]] = field(default_factory=dict)
    duplicate_triples: list[tuple[str, str]] = field(default_factory=list)
    _default_T: int | None = field(default=None, init=False, repr=False, compare=False)

    # -- access ------------------------------------------------------------
    @property
    def identity(self) -> str:
        return self.group.identity

    @property
    def untwisted(self) -> Sector:
        return self.sector(self.identity)

    def sector(self, m: str) -> Sector:
        try:
            return self.sectors[m]
        except KeyError:
            raise PresentationError(f"no sector for group element {m!r}") from None

    def triple(self, m1: str, m2: str) -> TripleData:
        try:
            return self.triples[(m1, m2)]
        except KeyError:
            raise PresentationError(f"no triple data for ({m1}, {m2})") from None

    def ordered_elements(self) -> list[str]:
        return [m for m in self.group.elements if m in self.sectors]

    def S(self, m: str) -> KClass:
        sec = self.sector(m)
        return compute_S(self.group.order(m), sec.eigen, sec.stratum.name)

    def twisted_pullback(self, triple: TripleData) -> LinearMap:
        """ě_3^* = e_3^* ∘ ∨^*_{m3} : F(X^{m3^-1}) -> F(X^m)."""
        return triple.pullbacks[2] @ self.sector(triple.m3).involution

    def twisted_lines(self, triple: TripleData) -> dict[str, str]:
        """Generator table along ě_3 (from X^{m3^-1} to X^m)."""
        inv = self.sector(triple.m3).involution_lines
        return {name: triple.restrictions[2][image] for name, image in inv.items() if image in triple.restrictions[2]}

    def iter_triples(self) -> Iterator[TripleData]:
        els = self.ordered_elements()
        for m1, m2 in itertools.product(els, repeat=2):
            if (m1, m2) in self.triples:
                yield self.triples[(m1, m2)]

    def default_truncation(self) -> int:
        """(top degree)/2 + largest rank seen + 1."""
        if self._default_T is None:
            self._default_T = self._compute_default_truncation()
        return self._default_T

    def _compute_default_truncation(self) -> int:
        top = Fraction(0)
        strata = [s.stratum for s in self.sectors.values()] + [t.stratum for t in self.triples.values()]
        for st in strata:
            top = max(top, st.algebra.top_degree)
        classes: list[KClass] = []
        for m, sec in self.sectors.items():
            classes.append(sec.normal)
            classes.extend(sec.eigen.values())
        for t in self.triples.values():
            classes.extend([t.normal, t.normal_m3])
        biggest = max((sum(abs(c) for _, c in k.terms) for k in classes), default=Fraction(0))
        return int(top // 2) + int(-(-biggest // 1)) + 1

    @property
    def T(self) -> int:
        return self.truncation if self.truncation is not None else self.default_truncation()

    def with_truncation(self, truncation: int | None) -> "QuotientPresentation":
        from dataclasses import replace

        return replace(self, truncation=truncation)

    def euler(self, cls: KClass, stratum: Stratum) -> "object":
        return euler_class(cls, stratum, self.flavor, self.T)

    # -- sections ----------------------------------------------------------
    def sections(self, section_set: str | None = None) -> dict[str, LinearMap]:
        """Section per sector: stored ones, a named stored set, or derived by pivot preference."""
        if section_set in (None, "default"):
            out = {}
            for m, sec in self.sectors.items():
                out[m] = sec.section if sec.section is not None else find_section(sec.pullback)
            return out
        if section_set in ("first-pivot", "last-pivot"):
            prefer = section_set.split("-")[0]
            return {m: find_section(sec.pullback, prefer=prefer) for m, sec in self.sectors.items()}
        if section_set in self.section_sets:
            named = self.section_sets[section_set]
            return {m: named.get(m) or find_section(sec.pullback) for m, sec in self.sectors.items()}
        raise PresentationError(f"unknown section set {section_set!r}")


def find_section(pullback: LinearMap, prefer: str = "first") -> LinearMap:
    """Deterministic linear right inverse of a surjective pullback.

    Pivot columns of the reduced echelon form (scanning the source basis in
    order, or in reverse for ``prefer="last"``) give an invertible square
    block; each target basis vector is lifted through that block.
    """
    src, tgt = pullback.source, pullback.target
    cols = list(range(src.dim))
    if prefer == "last":
        cols.reverse()
    elif prefer != "first":
        raise ValueError(f"unknown pivot preference {prefer!r}")
    reordered = [[row[c] for c in cols] for row in pullback.matrix]
    _, pivots = linalg.rref(reordered, ncols=src.dim)
    if len(pivots) < tgt.dim:
        raise SectionUnavailable(
            f"pullback {pullback.name or ''} onto {tgt.name} is not surjective: "
            "sector not cyclic, push-pull route unavailable"
        )
    chosen = [cols[p] for p in pivots]
    block = [[row[c] for c in chosen] for row in pullback.matrix]
    inv = linalg.inverse(block)
    mat = linalg.zeros(src.dim, tgt.dim)
    for a, c in enumerate(chosen):
        for j in range(tgt.dim):
            mat[c][j] = inv[a][j]
    return LinearMap(tgt, src, mat, f"{pullback.name}_s")


def cyclic_generator_check(sector: Sector) -> bool:
    """True when a -> i_m^*(a)·1_m is onto F(X^m), i.e. 1_m generates it as an F(X)-module."""
    alg = sector.algebra
    if alg.dim == 0:
        return True
    one = alg.one()
    images = [sector.pullback.image(s) * one for s in range(sector.pullback.source.dim)]
    return linalg.rank([list(v.coeffs) for v in images], alg.dim) == alg.dim


# -- validation ---------------------------------------------------------------

def _maps_equal(f: LinearMap, g: LinearMap) -> bool:
    return f.matrix == g.matrix


def validate(p: QuotientPresentation) -> CheckReport:
    """Run every structural check in a fixed order; failures carry witnesses."""
    rep = CheckReport()
    G = p.group

    grp = G.validate()
    rep.extend(grp)
    if grp.failures:
        return rep
    rep.add("group", "pass", f"order {len(G)}")

    missing = [m for m in G.elements if m not in p.sectors]
    for m in missing:
        rep.fail("structure", f"no sector for {m}")
    for key in p.duplicate_triples:
        rep.fail("ambiguous-triple", f"({key[0]},{key[1]}) given more than once")
    for m1, m2 in itertools.product(G.elements, repeat=2):
        if (m1, m2) not in p.triples:
            rep.fail("structure", f"missing triple ({m1},{m2})")
    if rep.failures:
        return rep

    X = p.untwisted.algebra
    e = p.identity

    # algebras
    checked: set[int] = set()
    for label, st in [(f"X^{m}", s.stratum) for m, s in p.sectors.items()] + [
        (f"X^({t.m1},{t.m2})", t.stratum) for t in p.iter_triples()
    ]:
        if id(st.algebra) in checked:
            continue
        checked.add(id(st.algebra))
        rep.extend(check_algebra(st.algebra, label))
    _section(rep, "algebras")

    # shapes and morphisms
    for m, sec in p.sectors.items():
        inv_alg = p.sector(G.inv(m)).algebra
        _shape(rep, sec.pullback, X, sec.algebra, f"i_{m}^*")
        _shape(rep, sec.involution, inv_alg, sec.algebra, f"∨^*_{m}")
        if sec.pushforward is not None:
            _shape(rep, sec.pushforward, sec.algebra, X, f"i_{m}*")
        if sec.section is not None:
            _shape(rep, sec.section, sec.algebra, X, f"i_{m}s")
    for t in p.iter_triples():
        for k, mk in enumerate(t.elements):
            _shape(rep, t.pullbacks[k], p.sector(mk).algebra, t.algebra, f"e_{k + 1}^*({t.m1},{t.m2})")
        target = p.sector(G.inv(t.m3)).algebra
        _shape(rep, t.pushforward, t.algebra, target, f"ě_3*({t.m1},{t.m2})")
        if G.mul(G.mul(t.m1, t.m2), t.m3) != e:
            rep.fail("triple-product", f"({t.m1},{t.m2},{t.m3}) does not multiply to {e}")
        if G.mul(t.m1, t.m2) != G.inv(t.m3):
            rep.fail("grading", f"product of ({t.m1},{t.m2}) would not land in sector {G.mul(t.m1, t.m2)}")
    if rep.failures:
        return rep

    for m, sec in p.sectors.items():
        for w in sec.pullback.morphism_failures():
            rep.fail("morphism", f"i_{m}^*: {w}")
        for w in sec.involution.morphism_failures():
            rep.fail("morphism", f"∨^*_{m}: {w}")
    for t in p.iter_triples():
        for k in range(3):
            for w in t.pullbacks[k].morphism_failures():
                rep.fail("morphism", f"e_{k + 1}^*({t.m1},{t.m2}): {w}")
    _section(rep, "morphism")

    # identity sector
    u = p.untwisted
    if not u.pullback.is_identity():
        rep.fail("identity-sector", "i_e^* is not the identity")
    if not u.normal.is_zero():
        rep.fail("identity-sector", f"N_(X^e/X) = {u.normal} != 0")

    # lines
    for m, sec in p.sectors.items():
        _line_table(rep, p.untwisted.stratum, sec.stratum, sec.restriction, sec.pullback, f"i_{m}")
        _line_table(rep, p.sector(G.inv(m)).stratum, sec.stratum, sec.involution_lines, sec.involution, f"∨_{m}")
    for t in p.iter_triples():
        for k, mk in enumerate(t.elements):
            _line_table(rep, p.sector(mk).stratum, t.stratum, t.restrictions[k], t.pullbacks[k], f"e_{k + 1}({t.m1},{t.m2})")
    _section(rep, "line-restriction")

    # involution
    for m, sec in p.sectors.items():
        back = p.sector(G.inv(m)).involution
        if not (sec.involution @ back).is_identity():
            rep.fail("involution", f"∨∘∨ != id on X^{m}")
        if not _maps_equal(sec.involution @ p.sector(G.inv(m)).pullback, sec.pullback):
            rep.fail("involution", f"∨^* ∘ i_{G.inv(m)}^* != i_{m}^*")
        composite = {k: sec.involution_lines[v] for k, v in p.sector(G.inv(m)).involution_lines.items() if v in sec.involution_lines}
        if any(composite.get(n) != n for n in sec.stratum.lines):
            rep.fail("involution", f"line table ∨∘∨ != id on X^{m}")
    if not u.involution.is_identity():
        rep.fail("involution", "∨ on the untwisted sector is not the identity")
    _section(rep, "involution")

    # sections
    for m, sec in p.sectors.items():
        if sec.section is not None and not (sec.pullback @ sec.section).is_identity():
            rep.fail("section", f"i_{m}^* ∘ i_{m}s != id")
    for name, sset in p.section_sets.items():
        for m, s in sset.items():
            if not (p.sector(m).pullback @ s).is_identity():
                rep.fail("section", f"set {name}: i_{m}^* ∘ i_{m}s != id")
    _section(rep, "section")

    # self-intersection and projection formula for sector pushforwards
    for m, sec in p.sectors.items():
        if sec.pushforward is None:
            continue
        try:
            eu_n = p.euler(sec.normal, sec.stratum)
        except ValueError as exc:
            rep.fail("self-intersection", f"X^{m}: {exc}")
            continue
        for a in sec.algebra.basis_elements():
            if sec.pullback(sec.pushforward(a)) != a * eu_n:
                rep.fail("self-intersection", f"X^{m}: i^*i_*({a}) != {a}*Eu(N)")
        _projection(rep, sec.pullback, sec.pushforward, f"i_{m}")
    _section(rep, "self-intersection")
    for t in p.iter_triples():
        _projection(rep, p.twisted_pullback(t), t.pushforward, f"ě_3({t.m1},{t.m2})")
    for m, sec in p.sectors.items():
        if sec.pushforward is not None and sec.section is not None:
            one_push = sec.pushforward(sec.algebra.one())
            for a in sec.algebra.basis_elements():
                if sec.pushforward(a) != sec.section(a) * one_push:
                    rep.fail("section-division", f"X^{m}: i_*({a}) != i_s({a})·i_*(1)")
    _section(rep, "projection-formula")

    # triple compatibility: e_k^* ∘ i_{m_k}^* all agree
    for t in p.iter_triples():
        js = [t.pullbacks[k] @ p.sector(mk).pullback for k, mk in enumerate(t.elements)]
        if not (_maps_equal(js[0], js[1]) and _maps_equal(js[0], js[2])):
            rep.fail("triple-compatibility", f"({t.m1},{t.m2}): e_k^* ∘ i_k^* differ")
    _section(rep, "triple-compatibility")

    # normal-class additivity
    for t in p.iter_triples():
        try:
            n3 = p.sector(t.m3).normal.restrict(t.restrictions[2], t.stratum.name)
        except ValueError as exc:
            rep.fail("normal-additivity", f"({t.m1},{t.m2}): {exc}")
            continue
        if t.normal != t.normal_m3 + n3:
            rep.fail("normal-additivity", f"({t.m1},{t.m2}): {t.normal} != {t.normal_m3} + {n3}")
    _section(rep, "normal-additivity")

    # S_m + ∨(S_{m^-1}) = N_{X^m/X}
    for m, sec in p.sectors.items():
        try:
            s_m = p.S(m)
            s_inv = p.S(G.inv(m)).restrict(sec.involution_lines, sec.stratum.name)
        except ValueError as exc:
            rep.fail("normal-identity", f"X^{m}: {exc}")
            continue
        if s_m + s_inv != sec.normal:
            rep.fail("normal-identity", f"X^{m}: {s_m} + ∨({p.S(G.inv(m))}) != {sec.normal}")
    _section(rep, "normal-identity")
    return rep


def _section(rep: CheckReport, check: str) -> None:
    if not any(f.check == check and f.status == "fail" for f in rep.findings):
        rep.add(check, "pass")


def _shape(rep: CheckReport, f: LinearMap, source: GradedAlgebra, target: GradedAlgebra, label: str) -> None:
    if f.source != source or f.target != target:
        rep.fail("structure", f"{label}: expected {source.name} -> {target.name}, got {f.source.name} -> {f.target.name}")


def _line_table(rep: CheckReport, src: Stratum, dst: Stratum, table: dict[str, str], pull: LinearMap, label: str) -> None:
    for name, datum in src.lines.items():
        image = table.get(name)
        if image is None:
            rep.fail("line-restriction", f"{label}: {name} has no restriction")
            continue
        if image not in dst.lines:
            rep.fail("line-restriction", f"{label}: {name} -> unknown {image}")
            continue
        if pull(datum) != dst.lines[image]:
            rep.fail("line-restriction", f"{label}: pullback of datum({name}) != datum({image})")


def _projection(rep: CheckReport, pull: LinearMap, push: LinearMap, label: str) -> None:
    """push(pull(y)·x) == y·push(x) on all basis pairs."""
    amb = pull.source
    sub = pull.target
    for y in amb.basis_elements():
        py = pull(y)
        for x in sub.basis_elements():
            if push(py * x) != y * push(x):
                rep.fail("projection-formula", f"{label}: y={y}, x={x}")
                return


def normal_identity_holds(p: QuotientPresentation, m: str) -> bool:
    sec = p.sector(m)
    s_inv = p.S(p.group.inv(m)).restrict(sec.involution_lines, sec.stratum.name)
    return k_combine(p.S(m), s_inv) == sec.normal


def obstruction_rank(p: QuotientPresentation, m1: str, m2: str) -> Fraction:
    from .kclass import obstruction

    return rank(obstruction(m1, m2, p, check=False))
