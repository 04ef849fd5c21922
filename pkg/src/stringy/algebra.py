"""Finite-dimensional graded-commutative algebras over exact rationals.

An algebra is given by a named basis, integer degrees, sparse structure
constants ``b_i * b_j = sum_k c[i][j][k] b_k``, the position of the unit and
optionally a trace functional ``eps`` (the fundamental-class pairing
``<a, b> = eps(a b)``).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import linalg
from .findings import CheckReport

TENSOR = "⊗"


def q(value) -> Fraction:
    """Exact rational from an int, Fraction or a ``"p/q"`` string (floats are refused)."""
    if isinstance(value, float):
        raise TypeError(f"refusing inexact value {value!r}")
    return Fraction(value)


def format_q(value: Fraction) -> str:
    return str(Fraction(value))


class AlgebraError(ValueError):
    pass


class GradedAlgebra:
    """Finite-basis graded-commutative algebra with structure constants.

    ``products`` maps ``(i, j)`` to ``{k: c}``; missing pairs multiply to zero.
    ``graded=False`` marks algebras whose degrees are only bookkeeping (root
    extensions with non-integral root degree); degree checks are skipped there.
    """

    def __init__(
        self,
        name: str,
        basis: Sequence[str],
        degrees: Sequence,
        products: Mapping[tuple[int, int], Mapping[int, object]],
        unit: int | None,
        trace: Sequence | None = None,
        graded: bool = True,
        parities: Sequence[int] | None = None,
    ):
        self.name = name
        self.basis = tuple(basis)
        if len(set(self.basis)) != len(self.basis):
            raise AlgebraError(f"{name}: duplicate basis names")
        self.degrees = tuple(Fraction(d) for d in degrees)
        if len(self.degrees) != len(self.basis):
            raise AlgebraError(f"{name}: {len(self.basis)} basis elements but {len(self.degrees)} degrees")
        self.graded = graded
        if parities is None:
            parities = [int(d) % 2 if d.denominator == 1 else 0 for d in self.degrees]
        self.parities = tuple(parities)
        table: dict[tuple[int, int], tuple[tuple[int, Fraction], ...]] = {}
        for (i, j), out in products.items():
            terms = tuple(sorted((k, q(c)) for k, c in out.items() if q(c) != 0))
            if terms:
                table[(i, j)] = terms
        self._table = table
        self.unit_index = unit
        if unit is None and self.basis:
            raise AlgebraError(f"{name}: nonzero algebra needs a unit")
        self.trace = None if trace is None else tuple(q(t) for t in trace)
        if self.trace is not None and len(self.trace) != len(self.basis):
            raise AlgebraError(f"{name}: trace has wrong length")
        self._index = {b: i for i, b in enumerate(self.basis)}
        self._hash = None

    # -- structure -------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def is_frobenius(self) -> bool:
        return self.trace is not None

    @property
    def top_degree(self) -> Fraction:
        return max(self.degrees, default=Fraction(0))

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise AlgebraError(f"{self.name}: no basis element {name!r}") from None

    def products(self) -> dict[tuple[int, int], dict[int, Fraction]]:
        return {key: dict(terms) for key, terms in self._table.items()}

    def constant(self, i: int, j: int, k: int) -> Fraction:
        return dict(self._table.get((i, j), ())).get(k, Fraction(0))

    def _key(self):
        return (self.basis, self.degrees, tuple(sorted(self._table.items())), self.unit_index, self.trace, self.graded)

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, GradedAlgebra):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self) -> str:
        return f"GradedAlgebra({self.name!r}, dim={self.dim})"

    # -- elements ----------------------------------------------------------
    def element(self, coeffs: Sequence | Mapping[str, object]) -> "Element":
        if isinstance(coeffs, Mapping):
            vec = [Fraction(0)] * self.dim
            for name, c in coeffs.items():
                vec[self.index(name)] += q(c)
            return Element(self, tuple(vec))
        if len(coeffs) != self.dim:
            raise AlgebraError(f"{self.name}: expected {self.dim} coefficients, got {len(coeffs)}")
        return Element(self, tuple(q(c) for c in coeffs))

    def basis_element(self, i: int | str) -> "Element":
        if isinstance(i, str):
            i = self.index(i)
        vec = [Fraction(0)] * self.dim
        vec[i] = Fraction(1)
        return Element(self, tuple(vec))

    def basis_elements(self) -> list["Element"]:
        return [self.basis_element(i) for i in range(self.dim)]

    def zero(self) -> "Element":
        return Element(self, (Fraction(0),) * self.dim)

    def one(self) -> "Element":
        if self.unit_index is None:
            return self.zero()
        return self.basis_element(self.unit_index)

    def multiply(self, a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * self.dim
        nz_b = [(j, bj) for j, bj in enumerate(b) if bj]
        if not nz_b:
            return tuple(out)
        table = self._table
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in nz_b:
                terms = table.get((i, j))
                if terms:
                    f = ai * bj
                    for k, c in terms:
                        out[k] += f * c
        return tuple(out)

    def gram(self) -> linalg.Matrix:
        if self.trace is None:
            raise AlgebraError(f"{self.name}: no trace")
        g = linalg.zeros(self.dim, self.dim)
        for (i, j), terms in self._table.items():
            g[i][j] = sum((c * self.trace[k] for k, c in terms), Fraction(0))
        return g

    def koszul_sign(self, i: int, j: int) -> int:
        return -1 if self.parities[i] and self.parities[j] else 1


class Element:
    """Immutable algebra element (coefficient vector plus parent algebra)."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: GradedAlgebra, coeffs: tuple[Fraction, ...]):
        self.algebra = algebra
        self.coeffs = coeffs

    def _check(self, other: "Element") -> None:
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise AlgebraError(f"parent mismatch: {self.algebra.name} vs {other.algebra.name}")

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        return Element(self.algebra, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Element") -> "Element":
        self._check(other)
        return Element(self.algebra, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "Element":
        return Element(self.algebra, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, Element):
            self._check(other)
            return Element(self.algebra, self.algebra.multiply(self.coeffs, other.coeffs))
        f = q(other)
        return Element(self.algebra, tuple(a * f for a in self.coeffs))

    def __rmul__(self, other):
        f = q(other)
        return Element(self.algebra, tuple(a * f for a in self.coeffs))

    def __pow__(self, n: int) -> "Element":
        if n < 0:
            raise AlgebraError("negative powers are not ring operations here")
        out = self.algebra.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self.coeffs == other.coeffs and (self.algebra is other.algebra or self.algebra == other.algebra)

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def trace(self) -> Fraction:
        tr = self.algebra.trace
        if tr is None:
            raise AlgebraError(f"{self.algebra.name}: no trace")
        return sum((c * t for c, t in zip(self.coeffs, tr)), Fraction(0))

    def terms(self) -> list[tuple[str, Fraction]]:
        return [(self.algebra.basis[i], c) for i, c in enumerate(self.coeffs) if c]

    def degrees(self) -> set[Fraction]:
        return {self.algebra.degrees[i] for i, c in enumerate(self.coeffs) if c}

    def to_mapping(self) -> dict[str, str]:
        return {name: format_q(c) for name, c in self.terms()}

    def __str__(self) -> str:
        parts = []
        for name, c in self.terms():
            if c == 1:
                parts.append(f"+ {name}")
            elif c == -1:
                parts.append(f"- {name}")
            elif c > 0:
                parts.append(f"+ {c}*{name}")
            else:
                parts.append(f"- {-c}*{name}")
        if not parts:
            return "0"
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    __repr__ = __str__


class LinearMap:
    """Exact linear map; ``matrix[t][s]`` is the target-``t`` coefficient of the image of source basis ``s``."""

    def __init__(self, source: GradedAlgebra, target: GradedAlgebra, matrix: Sequence[Sequence], name: str = ""):
        self.source = source
        self.target = target
        self.name = name
        rows = [tuple(q(x) for x in row) for row in matrix]
        if len(rows) != target.dim or any(len(r) != source.dim for r in rows):
            raise AlgebraError(f"map {name or '?'}: matrix shape does not match {target.dim}x{source.dim}")
        self.matrix = tuple(rows)
        self._cols = [[(t, rows[t][s]) for t in range(target.dim) if rows[t][s]] for s in range(source.dim)]

    @classmethod
    def from_images(cls, source: GradedAlgebra, target: GradedAlgebra, images: Sequence[Element], name: str = "") -> "LinearMap":
        rows = [[images[s].coeffs[t] for s in range(source.dim)] for t in range(target.dim)]
        return cls(source, target, rows, name)

    @classmethod
    def identity(cls, algebra: GradedAlgebra, name: str = "id") -> "LinearMap":
        return cls(algebra, algebra, linalg.identity(algebra.dim), name)

    @classmethod
    def zero(cls, source: GradedAlgebra, target: GradedAlgebra, name: str = "") -> "LinearMap":
        return cls(source, target, linalg.zeros(target.dim, source.dim), name)

    def __call__(self, el: Element) -> Element:
        if el.algebra is not self.source and el.algebra != self.source:
            raise AlgebraError(f"map {self.name}: element of {el.algebra.name} given, expected {self.source.name}")
        out = [Fraction(0)] * self.target.dim
        for s, c in enumerate(el.coeffs):
            if c:
                for t, m in self._cols[s]:
                    out[t] += c * m
        return Element(self.target, tuple(out))

    def image(self, s: int) -> Element:
        return self(self.source.basis_element(s))

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        """Composition ``self ∘ other``."""
        if other.target != self.source:
            raise AlgebraError(f"cannot compose {self.name} after {other.name}")
        return LinearMap(other.source, self.target, linalg.matmul(self.matrix, other.matrix), f"{self.name}∘{other.name}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearMap):
            return NotImplemented
        return self.matrix == other.matrix and self.source == other.source and self.target == other.target

    def __hash__(self) -> int:
        return hash(self.matrix)

    def is_identity(self) -> bool:
        return self.source == self.target and self.matrix == tuple(tuple(r) for r in linalg.identity(self.source.dim))

    def rank(self) -> int:
        return linalg.rank(self.matrix, self.source.dim)

    def morphism_failures(self) -> list[str]:
        """Witnesses where f(ab) != f(a)f(b) or f(1) != 1; empty for an algebra morphism."""
        bad = []
        if self(self.source.one()) != self.target.one():
            bad.append("f(1) != 1")
        basis = self.source.basis_elements()
        images = [self(b) for b in basis]
        for i, j in itertools.product(range(self.source.dim), repeat=2):
            if self(basis[i] * basis[j]) != images[i] * images[j]:
                bad.append(f"f({self.source.basis[i]}*{self.source.basis[j]})")
        return bad

    def __repr__(self) -> str:
        return f"LinearMap({self.name!r}: {self.source.name} -> {self.target.name})"


# -- validation -------------------------------------------------------------

def check_algebra(alg: GradedAlgebra, label: str | None = None) -> CheckReport:
    """Report every violated algebra invariant with its witnessing basis tuple."""
    label = label or alg.name
    rep = CheckReport()
    n = alg.dim
    names = alg.basis
    if n == 0:
        return rep
    table = alg._table

    def times(left: dict, k: int, right_side: bool) -> dict:
        # sparse (sum c_m b_m) * b_k, or b_k * (sum c_m b_m) when right_side is False
        out: dict[int, Fraction] = {}
        for m, c in left.items():
            for r, v in table.get((m, k) if right_side else (k, m), ()):
                out[r] = out.get(r, Fraction(0)) + c * v
        return {r: v for r, v in out.items() if v}

    if alg.graded:
        for (i, j), terms in table.items():
            for k, _ in terms:
                if alg.degrees[k] != alg.degrees[i] + alg.degrees[j]:
                    rep.fail("degree-additivity", f"{label}: ({names[i]},{names[j]}) -> {names[k]}")
    u = alg.unit_index
    for i in range(n):
        if dict(table.get((u, i), ())) != {i: 1} or dict(table.get((i, u), ())) != {i: 1}:
            rep.fail("unit", f"{label}: {names[i]}")
    for i in range(n):
        for j in range(i, n):
            sign = alg.koszul_sign(i, j)
            if dict(table.get((i, j), ())) != {k: sign * c for k, c in table.get((j, i), ())}:
                rep.fail("graded-commutativity", f"{label}: ({names[i]},{names[j]})")
    for i in range(n):
        for j in range(n):
            ij = dict(table.get((i, j), ()))
            for k in range(n):
                left = times(ij, k, True)
                right = times(dict(table.get((j, k), ())), i, False)
                if left != right:
                    rep.fail("associativity", f"{label}: ({names[i]},{names[j]},{names[k]})")
    if alg.trace is not None and linalg.determinant(alg.gram()) == 0:
        rep.fail("frobenius-pairing", f"{label}: Gram matrix singular")
    return rep


# -- constructions ----------------------------------------------------------

def truncated_polynomial_algebra(name: str, var: str, degree: int, top: int, trace_top: object = 1) -> GradedAlgebra:
    """``Q[var]/(var^(top+1))`` with ``deg var = degree``; the trace reads the top coefficient."""
    basis = ["1"] + [var if p == 1 else f"{var}^{p}" for p in range(1, top + 1)]
    products = {(i, j): {i + j: 1} for i in range(top + 1) for j in range(top + 1) if i + j <= top}
    trace = [0] * top + [trace_top]
    return GradedAlgebra(name, basis, [degree * p for p in range(top + 1)], products, 0, trace)


def point_algebra(name: str = "pt") -> GradedAlgebra:
    return GradedAlgebra(name, ["1"], [0], {(0, 0): {0: 1}}, 0, [1])


def zero_algebra(name: str = "empty") -> GradedAlgebra:
    return GradedAlgebra(name, [], [], {}, None, [])


def tensor_indices(dims: Sequence[int]) -> list[tuple[int, ...]]:
    """Basis multi-indices of a tensor product, first factor varying fastest."""
    return [tuple(reversed(t)) for t in itertools.product(*(range(d) for d in reversed(dims)))]


def tensor_product(factors: Sequence[GradedAlgebra], name: str | None = None) -> GradedAlgebra:
    """Koszul-signed tensor product: (a⊗b)(c⊗d) = (-1)^{|b||c|} ac⊗bd."""
    if len(factors) == 1:
        return factors[0]
    idx = tensor_indices([f.dim for f in factors])
    pos = {t: p for p, t in enumerate(idx)}
    basis = [TENSOR.join(f.basis[i] for f, i in zip(factors, t)) for t in idx]
    degrees = [sum((f.degrees[i] for f, i in zip(factors, t)), Fraction(0)) for t in idx]
    parities = [sum(f.parities[i] for f, i in zip(factors, t)) % 2 for t in idx]
    tables = [f.products() for f in factors]
    products: dict[tuple[int, int], dict[int, Fraction]] = {}
    for a, ta in enumerate(idx):
        for b, tb in enumerate(idx):
            sign = 1
            for p in range(len(factors)):
                for r in range(p):
                    if factors[p].parities[ta[p]] and factors[r].parities[tb[r]]:
                        sign = -sign
            partial = {(): Fraction(sign)}
            for f, tab, i, j in zip(factors, tables, ta, tb):
                out = tab.get((i, j))
                if not out:
                    partial = {}
                    break
                partial = {key + (k,): c * v for key, v in partial.items() for k, c in out.items()}
            if partial:
                products[(a, b)] = {pos[key]: c for key, c in partial.items()}
    unit = pos[tuple(f.unit_index for f in factors)] if all(f.unit_index is not None for f in factors) else None
    trace = None
    if all(f.trace is not None for f in factors):
        trace = []
        for t in idx:
            v = Fraction(1)
            for f, i in zip(factors, t):
                v *= f.trace[i]
            trace.append(v)
    return GradedAlgebra(name or TENSOR.join(f.name for f in factors), basis, degrees, products, unit, trace, parities=parities)


def multiplication_map(alg: GradedAlgebra, square: GradedAlgebra | None = None) -> LinearMap:
    """The diagonal pullback A⊗A -> A, a⊗b -> ab."""
    square = square or tensor_product([alg, alg])
    idx = tensor_indices([alg.dim, alg.dim])
    images = [alg.basis_element(i) * alg.basis_element(j) for i, j in idx]
    return LinearMap.from_images(square, alg, images, "mult")


def adjoint_pushforward(f: LinearMap, name: str = "") -> LinearMap:
    """Pushforward ``f_!`` adjoint to the pullback ``f`` under the Frobenius pairings.

    ``f`` goes from the ambient algebra T to the subspace algebra S; the result
    S -> T satisfies ``<f_!(a), b>_T = <a, f(b)>_S`` for all basis a, b.
    """
    ambient, sub = f.source, f.target
    if not (ambient.is_frobenius and sub.is_frobenius):
        raise AlgebraError("adjoint pushforward needs traces on both algebras")
    g_t = ambient.gram()
    g_s = sub.gram()
    if ambient.dim == 0 or sub.dim == 0:
        return LinearMap.zero(sub, ambient, name)
    try:
        # F^T G_T = G_S P  <=>  G_T^T F = P^T G_S^T
        rhs = linalg.matmul(linalg.transpose(f.matrix), linalg.transpose(g_s))
        mat = linalg.solve(linalg.transpose(g_t), rhs)
    except linalg.SingularMatrixError:
        raise AlgebraError(f"degenerate pairing on {ambient.name}") from None
    return LinearMap(sub, ambient, mat, name or f"{f.name}_!")


def elements_from(alg: GradedAlgebra, items: Iterable[Mapping[str, object]]) -> list[Element]:
    return [alg.element(m) for m in items]
