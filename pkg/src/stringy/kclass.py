"""Rational K-classes on a stratum built from declared line generators.

Inputs arrive pre-split into lines: every line generator carries the datum
that determines its Euler series.  For the cohomological flavor (CH) that is
the first Chern class ``c`` (``c_t = 1 + c t``); for the K-theory flavor (K)
it is the class ``l`` of the dual line (``lambda_t(L^*) = 1 + l t``, so
``Eu(L) = 1 - l``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .algebra import AlgebraError, Element, GradedAlgebra, q
from .series import TSeries, series_frac_power, series_inverse, series_pow


class KClassError(ValueError):
    pass


class Flavor(str, enum.Enum):
    CH = "CH"
    K = "K"


@dataclass
class Stratum:
    """A fixed locus: its algebra and the line generators living on it."""

    name: str
    algebra: GradedAlgebra
    lines: dict[str, Element] = field(default_factory=dict)

    def line(self, name: str) -> Element:
        try:
            return self.lines[name]
        except KeyError:
            raise KClassError(f"{self.name}: unknown line generator {name!r}") from None


class KClass:
    """Formal rational combination of line generators on one stratum."""

    __slots__ = ("stratum", "terms")

    def __init__(self, stratum: str, terms: Mapping[str, object] | None = None):
        self.stratum = stratum
        clean = {}
        for name, c in (terms or {}).items():
            c = q(c)
            if c:
                clean[name] = clean.get(name, Fraction(0)) + c
        self.terms = tuple(sorted((n, c) for n, c in clean.items() if c))

    @classmethod
    def line(cls, stratum: str, name: str, coeff=1) -> "KClass":
        return cls(stratum, {name: coeff})

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.terms)

    def coefficient(self, name: str) -> Fraction:
        return self.as_dict().get(name, Fraction(0))

    def _check(self, other: "KClass") -> None:
        if other.stratum != self.stratum:
            raise KClassError(f"stratum mismatch: {self.stratum} vs {other.stratum}")

    def __add__(self, other: "KClass") -> "KClass":
        return k_combine(self, other)

    def __sub__(self, other: "KClass") -> "KClass":
        return k_combine(self, other, sign=-1)

    def __neg__(self) -> "KClass":
        return KClass(self.stratum, {n: -c for n, c in self.terms})

    def __mul__(self, scale) -> "KClass":
        s = q(scale)
        return KClass(self.stratum, {n: c * s for n, c in self.terms})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, KClass):
            return NotImplemented
        return self.stratum == other.stratum and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.stratum, self.terms))

    def is_zero(self) -> bool:
        return not self.terms

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for _, c in self.terms)

    def restrict(self, table: Mapping[str, str], target: str) -> "KClass":
        """Pull back along a generator mapping table (lines restrict to lines)."""
        out: dict[str, Fraction] = {}
        for name, c in self.terms:
            try:
                image = table[name]
            except KeyError:
                raise KClassError(f"no restriction of {name!r} from {self.stratum} to {target}") from None
            out[image] = out.get(image, Fraction(0)) + c
        return KClass(target, out)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for name, c in self.terms:
            if c == 1:
                parts.append(f"+ {name}")
            elif c == -1:
                parts.append(f"- {name}")
            elif c > 0:
                parts.append(f"+ {c}*{name}")
            else:
                parts.append(f"- {-c}*{name}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self) -> str:
        return f"KClass({self.stratum}: {self})"


def k_combine(a: KClass, b: KClass, sign: int = 1, scale=1) -> KClass:
    """``a + sign*scale*b`` coefficient-wise."""
    a._check(b)
    f = sign * q(scale)
    out = a.as_dict()
    for name, c in b.terms:
        out[name] = out.get(name, Fraction(0)) + f * c
    return KClass(a.stratum, out)


def rank(a: KClass) -> Fraction:
    return sum((c for _, c in a.terms), Fraction(0))


def is_effective(a: KClass) -> bool:
    return all(c > 0 and c.denominator == 1 for _, c in a.terms)


def line_series(datum: Element, truncation: int) -> TSeries:
    return TSeries.linear(datum, truncation)


def eu_t(a: KClass, stratum: Stratum, flavor: Flavor, truncation: int) -> TSeries:
    """``prod_i Eu_t(L_i)^{q_i}``; negative exponents invert, fractional ones use the binomial series (CH only)."""
    if a.stratum != stratum.name:
        raise KClassError(f"class on {a.stratum} evaluated on stratum {stratum.name}")
    out = TSeries.one(stratum.algebra, truncation)
    for name, c in a.terms:
        base = line_series(stratum.line(name), truncation)
        if c.denominator == 1:
            factor = series_pow(base, int(c)) if c > 0 else series_pow(series_inverse(base), int(-c))
        elif flavor == Flavor.K:
            raise KClassError(f"K-flavor Euler series of fractional class {a} needs a root extension")
        else:
            factor = series_frac_power(base, c)
        out = out * factor
    return out


def evaluate(f: TSeries, r, flavor: Flavor) -> Element:
    """The evaluation map: t^r coefficient (CH) or the value at t = -1 (K)."""
    if flavor == Flavor.K:
        out = f.algebra.zero()
        for k, c in enumerate(f.coeffs):
            out = out + (c if k % 2 == 0 else -c)
        return out
    rv = q(r)
    if rv.denominator != 1:
        raise KClassError(f"fractional rank {rv} needs root extension")
    if rv < 0:
        raise KClassError(f"negative rank {rv} has no t-coefficient")
    return f.coefficient(int(rv))


def euler_class(a: KClass, stratum: Stratum, flavor: Flavor, truncation: int) -> Element:
    """Concrete Euler class of an effective class, combined first and then evaluated."""
    if not is_effective(a):
        raise KClassError(f"Euler class of non-effective class {a}")
    T = max(truncation, int(rank(a)))
    return evaluate(eu_t(a, stratum, flavor, T), rank(a), flavor)


def compute_S(order: int, eigen_data: Mapping[int, KClass], stratum: str) -> KClass:
    """``S_m = sum_k (k/r) W_{m,k}`` for r = ord(m); ``W_{m,0}`` contributes nothing."""
    out = KClass(stratum)
    for k, w in sorted(eigen_data.items()):
        if k == 0:
            continue
        if not 1 <= k < order:
            raise KClassError(f"character index {k} outside 1..{order - 1}")
        if w.stratum != stratum:
            raise KClassError(f"eigen bundle on {w.stratum}, expected {stratum}")
        out = k_combine(out, w, scale=Fraction(k, order))
    return out


def obstruction(m1: str, m2: str, presentation, check: bool = True) -> KClass:
    """``R(m) = S_{m1} + S_{m2} + S_{m3} - N_{X^m/X}`` restricted to the common fixed locus."""
    triple = presentation.triple(m1, m2)
    parts = []
    for k, m in enumerate(triple.elements):
        parts.append(presentation.S(m).restrict(triple.restrictions[k], triple.stratum.name))
    out = parts[0] + parts[1] + parts[2] - triple.normal
    if check and not is_effective(out) and not out.is_zero():
        raise KClassError(f"obstruction class for ({m1},{m2}) is not a bundle: {out}")
    return out
