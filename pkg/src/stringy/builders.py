"""Presentations of point orbifolds and symmetric products ``Y^n / S_n``."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import (
    AlgebraError,
    Element,
    GradedAlgebra,
    LinearMap,
    adjoint_pushforward,
    check_algebra,
    point_algebra,
    tensor_indices,
    tensor_product,
    truncated_polynomial_algebra,
)
from .group import Group, cycles, parse_permutation
from .kclass import Flavor, KClass, Stratum
from .model import QuotientPresentation, Sector, TripleData


class BuildError(ValueError):
    pass


@dataclass
class FrobeniusInput:
    """Cohomology-like algebra of Y with its tangent class split into lines (name -> datum)."""

    algebra: GradedAlgebra
    lines: dict[str, Element] = field(default_factory=dict)
    flavor: Flavor = Flavor.CH
    name: str = "Y"

    @property
    def dimension(self) -> int:
        return len(self.lines)


def point_input() -> FrobeniusInput:
    return FrobeniusInput(point_algebra("pt"), {}, Flavor.CH, "pt")


def p1_input(flavor: Flavor = Flavor.CH) -> FrobeniusInput:
    """P^1: CH has c_1(T) = 2x in Q[x]/(x^2); K has the dual tangent class 1 - 2p with Eu(T) = 2p."""
    if flavor == Flavor.CH:
        A = truncated_polynomial_algebra("P1", "x", 2, 1)
        return FrobeniusInput(A, {"T": A.element({"x": 2})}, flavor, "P1")
    A = GradedAlgebra("K(P1)", ["1", "p"], [0, 0], {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}}, 0, [1, 1])
    return FrobeniusInput(A, {"T": A.element({"1": 1, "p": -2})}, flavor, "P1")


# -- point orbifolds ---------------------------------------------------------

def build_point_orbifold(G: Group, name: str | None = None) -> QuotientPresentation:
    """Every fixed locus is a point: the product table is the group algebra."""
    rep = G.validate()
    if not rep.ok:
        raise BuildError(f"invalid group table: {rep.failures[0]}")
    sectors = {}
    for m in G.elements:
        st = Stratum(f"X^{m}", point_algebra("pt"))
        sectors[m] = _point_sector(m, st, G)
    X = sectors[G.identity].stratum
    for m, sec in sectors.items():
        sec.pullback = LinearMap.identity(X.algebra, f"i_{m}^*")
    triples = {}
    for m1, m2 in itertools.product(G.elements, repeat=2):
        m3 = G.inv(G.mul(m1, m2))
        st = Stratum(f"X^({m1},{m2})", point_algebra("pt"))
        ident = LinearMap.identity(st.algebra)
        triples[(m1, m2)] = TripleData(
            m1, m2, m3, st, (ident, ident, ident), ({}, {}, {}), ident, KClass(st.name), KClass(st.name)
        )
    return QuotientPresentation(name or f"point-{G.spec or len(G)}", Flavor.CH, G, sectors, triples)


def _point_sector(m: str, st: Stratum, G: Group) -> Sector:
    ident = LinearMap.identity(st.algebra)
    return Sector(m, st, ident, ident, KClass(st.name), {}, {}, {}, ident, ident)


# -- symmetric products ---------------------------------------------------------

def _label(block: Sequence[int]) -> str:
    return "".join(str(i + 1) for i in sorted(block))


def _embedding(A: GradedAlgebra, power: GradedAlgebra, count: int):
    """ι_k(a): a placed in tensor factor k, ones elsewhere."""
    idx = tensor_indices([A.dim] * count)
    pos = {t: i for i, t in enumerate(idx)}
    u = A.unit_index

    def embed(k: int, a: Element) -> Element:
        if count == 1:
            return Element(power, a.coeffs)
        coeffs = [Fraction(0)] * power.dim
        for i, c in enumerate(a.coeffs):
            if c:
                key = tuple(i if j == k else u for j in range(count))
                coeffs[pos[key]] = c
        return Element(power, tuple(coeffs))

    return embed


class _Partitions:
    """Tensor powers of A indexed by set partitions of {0..n-1} and the diagonal maps between them."""

    def __init__(self, Y: FrobeniusInput, n: int):
        self.Y = Y
        self.n = n
        self._powers: dict[int, GradedAlgebra] = {}

    def power(self, count: int) -> GradedAlgebra:
        if count not in self._powers:
            A = self.Y.algebra
            alg = tensor_product([A] * count, name=f"{self.Y.name}^{count}")
            if count == 1:
                alg = GradedAlgebra(f"{self.Y.name}^1", A.basis, A.degrees, A.products(), A.unit_index, A.trace, A.graded, A.parities)
            self._powers[count] = alg
        return self._powers[count]

    def stratum(self, name: str, blocks: list[tuple[int, ...]]) -> Stratum:
        alg = self.power(len(blocks))
        embed = _embedding(self.Y.algebra, alg, len(blocks))
        lines = {}
        for k, b in enumerate(blocks):
            for ell, datum in self.Y.lines.items():
                lines[f"{ell}[{_label(b)}]"] = embed(k, datum)
        return Stratum(name, alg, lines)

    def diagonal(self, fine: list[tuple[int, ...]], coarse: list[tuple[int, ...]], name: str) -> tuple[LinearMap, dict[str, str]]:
        """Pullback along the diagonal from the finer partition's locus to the coarser one."""
        A = self.Y.algebra
        src = self.power(len(fine))
        tgt = self.power(len(coarse))
        embed = _embedding(A, tgt, len(coarse))
        owner = []
        for b in fine:
            hits = [q for q, c in enumerate(coarse) if set(b) <= set(c)]
            if len(hits) != 1:
                raise BuildError(f"{name}: block {b} does not refine {coarse}")
            owner.append(hits[0])
        images = []
        for t in tensor_indices([A.dim] * len(fine)):
            img = tgt.one()
            for k, i in enumerate(t):
                img = img * embed(owner[k], A.basis_element(i))
            images.append(img)
        table = {
            f"{ell}[{_label(b)}]": f"{ell}[{_label(coarse[owner[k]])}]"
            for k, b in enumerate(fine)
            for ell in self.Y.lines
        }
        return LinearMap.from_images(src, tgt, images, name), table

    def block_class(self, stratum: str, weights: dict[tuple[int, ...], Fraction]) -> KClass:
        terms = {}
        for b, w in weights.items():
            for ell in self.Y.lines:
                terms[f"{ell}[{_label(b)}]"] = w
        return KClass(stratum, terms)


def _orbits(perms: Sequence[tuple[int, ...]], n: int) -> list[tuple[int, ...]]:
    seen: set[int] = set()
    out = []
    for start in range(n):
        if start in seen:
            continue
        orbit = {start}
        frontier = [start]
        while frontier:
            i = frontier.pop()
            for p in perms:
                j = p[i]
                if j not in orbit:
                    orbit.add(j)
                    frontier.append(j)
        seen |= orbit
        out.append(tuple(sorted(orbit)))
    return out


def _blocks(perm: tuple[int, ...]) -> list[tuple[int, ...]]:
    return [tuple(sorted(c)) for c in cycles(perm)]


def build_symmetric_product(Y: FrobeniusInput, n: int, name: str | None = None) -> QuotientPresentation:
    """``Y^n`` with ``S_n`` permuting factors; pushforwards are Frobenius adjoints of the diagonal pullbacks."""
    if not 2 <= n <= 4:
        raise BuildError(f"symmetric products are built for n = 2..4, got {n}")
    A = Y.algebra
    if not A.is_frobenius:
        raise BuildError(f"{A.name} has no trace")
    rep = check_algebra(A)
    if not rep.ok:
        raise BuildError(f"input algebra invalid: {rep.failures[0]}")
    if any(A.parities) and n > 3:
        raise BuildError("odd-degree input algebras are only supported for n <= 3")
    for ell, datum in Y.lines.items():
        if datum.algebra != A:
            raise BuildError(f"line {ell}: datum not in {A.name}")
        if Y.flavor == Flavor.CH and datum.degrees() - {Fraction(2)}:
            raise BuildError(f"line {ell}: CH datum must have degree 2")
    if Y.flavor == Flavor.CH and 2 * len(Y.lines) != A.top_degree:
        raise BuildError(f"tangent class needs {A.top_degree / 2} lines, got {len(Y.lines)}")

    G = Group.symmetric(n)
    parts = _Partitions(Y, n)
    perm = {m: parse_permutation(m, n) for m in G.elements}
    singletons = [(i,) for i in range(n)]
    X = parts.stratum(f"X^{G.identity}", singletons)

    sectors: dict[str, Sector] = {}
    for m in G.elements:
        blocks = _blocks(perm[m])
        st = X if m == G.identity else parts.stratum(f"X^{m}", blocks)
        pull, table = parts.diagonal(singletons, blocks, f"i_{m}^*")
        order = G.order(m)
        eigen_terms: dict[int, dict[str, Fraction]] = {}
        for b in blocks:
            L = len(b)
            for j in range(1, L):
                k = j * order // L
                for ell in Y.lines:
                    key = f"{ell}[{_label(b)}]"
                    eigen_terms.setdefault(k, {})
                    eigen_terms[k][key] = eigen_terms[k].get(key, Fraction(0)) + 1
        eigen = {k: KClass(st.name, terms) for k, terms in sorted(eigen_terms.items())}
        normal = parts.block_class(st.name, {b: Fraction(len(b) - 1) for b in blocks})
        push = adjoint_pushforward(pull, f"i_{m}*")
        sectors[m] = Sector(m, st, pull, None, normal, eigen, table, {}, push, None)  # type: ignore[arg-type]
    for m, sec in sectors.items():
        other = sectors[G.inv(m)]
        sec.involution = LinearMap(other.algebra, sec.algebra, [[int(i == j) for j in range(other.algebra.dim)] for i in range(sec.algebra.dim)], f"∨_{m}^*")
        sec.involution_lines = {name: name for name in other.stratum.lines}

    triples: dict[tuple[str, str], TripleData] = {}
    for m1, m2 in itertools.product(G.elements, repeat=2):
        m3 = G.inv(G.mul(m1, m2))
        orbits = _orbits([perm[m1], perm[m2]], n)
        st = parts.stratum(f"X^({m1},{m2})", orbits)
        pulls = []
        tables = []
        for k, mk in enumerate((m1, m2, m3)):
            f, tab = parts.diagonal(_blocks(perm[mk]), orbits, f"e_{k + 1}^*")
            pulls.append(f)
            tables.append(tab)
        c3 = {o: sum(1 for b in _blocks(perm[m3]) if set(b) <= set(o)) for o in orbits}
        normal = parts.block_class(st.name, {o: Fraction(len(o) - 1) for o in orbits})
        normal_m3 = parts.block_class(st.name, {o: Fraction(c3[o] - 1) for o in orbits})
        twisted = pulls[2] @ sectors[m3].involution
        push = adjoint_pushforward(twisted, "ě_3*")
        triples[(m1, m2)] = TripleData(m1, m2, m3, st, tuple(pulls), tuple(tables), push, normal, normal_m3)  # type: ignore[arg-type]

    return QuotientPresentation(name or f"sym{n}-{Y.name}", Y.flavor, G, sectors, triples)


def build_named(name: str) -> QuotientPresentation:
    """The shipped datasets by id."""
    recipes = {
        "point-Z2": lambda: build_point_orbifold(Group.cyclic(2), "point-Z2"),
        "point-S3": lambda: build_point_orbifold(Group.symmetric(3), "point-S3"),
        "sym2-P1": lambda: build_symmetric_product(p1_input(), 2, "sym2-P1"),
        "sym3-P1": lambda: build_symmetric_product(p1_input(), 3, "sym3-P1"),
        "sym2-point": lambda: build_symmetric_product(point_input(), 2, "sym2-point"),
        "sym4-point": lambda: build_symmetric_product(point_input(), 4, "sym4-point"),
    }
    try:
        return recipes[name]()
    except KeyError:
        raise BuildError(f"unknown dataset {name!r}; known: {', '.join(recipes)}") from None


SHIPPED = ("point-Z2", "point-S3", "sym2-P1", "sym3-P1", "sym2-point", "sym4-point")
