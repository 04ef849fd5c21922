"""Truncated power series in ``t`` with coefficients in a finite algebra."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .algebra import AlgebraError, Element, GradedAlgebra, LinearMap, q


class SeriesError(AlgebraError):
    pass


class TSeries:
    """``sum_{k <= T} c_k t^k``; arithmetic never looks past ``truncation``."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: GradedAlgebra, coeffs: Sequence[Element], truncation: int | None = None):
        coeffs = list(coeffs)
        if truncation is not None:
            coeffs = coeffs[: truncation + 1]
            coeffs += [algebra.zero()] * (truncation + 1 - len(coeffs))
        if not coeffs:
            raise SeriesError("a series needs at least the constant coefficient")
        self.algebra = algebra
        self.coeffs = tuple(coeffs)

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, el: Element, truncation: int) -> "TSeries":
        return cls(el.algebra, [el], truncation)

    @classmethod
    def one(cls, algebra: GradedAlgebra, truncation: int) -> "TSeries":
        return cls(algebra, [algebra.one()], truncation)

    @classmethod
    def linear(cls, el: Element, truncation: int) -> "TSeries":
        """``1 + el*t``."""
        return cls(el.algebra, [el.algebra.one(), el], truncation)

    def _check(self, other: "TSeries") -> None:
        if other.algebra != self.algebra:
            raise SeriesError(f"parent mismatch: {self.algebra.name} vs {other.algebra.name}")
        if other.truncation != self.truncation:
            raise SeriesError(f"truncation mismatch: {self.truncation} vs {other.truncation}")

    def __add__(self, other: "TSeries") -> "TSeries":
        self._check(other)
        return TSeries(self.algebra, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "TSeries") -> "TSeries":
        self._check(other)
        return TSeries(self.algebra, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __mul__(self, other):
        if isinstance(other, TSeries):
            return series_mul(self, other)
        if isinstance(other, Element):
            return TSeries(self.algebra, [c * other for c in self.coeffs])
        return TSeries(self.algebra, [c * q(other) for c in self.coeffs])

    def __rmul__(self, other):
        if isinstance(other, Element):
            return TSeries(self.algebra, [other * c for c in self.coeffs])
        return self * other

    def __eq__(self, other) -> bool:
        if not isinstance(other, TSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def map(self, f: LinearMap) -> "TSeries":
        """Apply a linear map coefficient-wise."""
        return TSeries(f.target, [f(c) for c in self.coeffs])

    def coefficient(self, k: int) -> Element:
        if k < 0 or k > self.truncation:
            raise SeriesError(f"coefficient t^{k} outside truncation {self.truncation}")
        return self.coeffs[k]

    def retruncate(self, truncation: int) -> "TSeries":
        if truncation > self.truncation:
            raise SeriesError("cannot extend a truncated series")
        return TSeries(self.algebra, self.coeffs, truncation)

    def is_polynomial(self) -> bool:
        """True when the top truncated coefficient vanishes (the series ended before T)."""
        return self.coeffs[-1].is_zero()

    def __str__(self) -> str:
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            body = str(c)
            if k == 0:
                parts.append(body)
            else:
                body = body if len(c.terms()) == 1 and not body.startswith("-") else f"({body})"
                parts.append(f"{body}*t" + (f"^{k}" if k > 1 else ""))
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__


def series_mul(f: TSeries, g: TSeries) -> TSeries:
    """Cauchy product truncated at T."""
    f._check(g)
    alg = f.algebra
    T = f.truncation
    out = []
    for n in range(T + 1):
        acc = [Fraction(0)] * alg.dim
        for k in range(n + 1):
            a, b = f.coeffs[k], g.coeffs[n - k]
            if a.is_zero() or b.is_zero():
                continue
            for i, v in enumerate(alg.multiply(a.coeffs, b.coeffs)):
                if v:
                    acc[i] += v
        out.append(Element(alg, tuple(acc)))
    return TSeries(alg, out)


def _check_unit_leading(f: TSeries) -> None:
    if f.coeffs[0] != f.algebra.one():
        raise SeriesError("series must have constant term 1")


def series_inverse(f: TSeries) -> TSeries:
    """Inverse of a series with constant term 1, by the recursion g_n = -sum_{k>=1} f_k g_{n-k}."""
    _check_unit_leading(f)
    alg = f.algebra
    g = [alg.one()]
    for n in range(1, f.truncation + 1):
        acc = alg.zero()
        for k in range(1, n + 1):
            acc = acc + f.coeffs[k] * g[n - k]
        g.append(-acc)
    return TSeries(alg, g)


def series_pow(f: TSeries, n: int) -> TSeries:
    """Integer power; negative exponents go through the inverse."""
    if n < 0:
        return series_pow(series_inverse(f), -n)
    out = TSeries.one(f.algebra, f.truncation)
    base = f
    while n:
        if n & 1:
            out = out * base
        n >>= 1
        if n:
            base = base * base
    return out


def binomial(a: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out = out * (a - i) / (i + 1)
    return out


def series_frac_power(f: TSeries, exponent) -> TSeries:
    """``f^q = sum_k binom(q, k) (f - 1)^k`` for constant term 1, exact to the truncation.

    ``(f - 1)`` has no constant term, so its k-th power starts at ``t^k`` and
    the sum is finite below T.
    """
    _check_unit_leading(f)
    qv = q(exponent)
    alg = f.algebra
    T = f.truncation
    h = f - TSeries.one(alg, T)
    out = TSeries.one(alg, T)
    power = TSeries.one(alg, T)
    for k in range(1, T + 1):
        power = power * h
        out = out + power * binomial(qv, k)
    return out
