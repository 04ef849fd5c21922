from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from stringy.algebra import tensor_product, truncated_polynomial_algebra
from stringy.builders import p1_input
from stringy.kclass import (
    Flavor,
    KClass,
    KClassError,
    Stratum,
    compute_S,
    euler_class,
    eu_t,
    evaluate,
    is_effective,
    obstruction,
    rank,
)
from stringy.series import SeriesError, TSeries, series_frac_power, series_inverse, series_pow

A = truncated_polynomial_algebra("P2", "h", 2, 2)
h = A.element({"h": 1})
small = st.fractions(min_value=-4, max_value=4, max_denominator=5)


def poly(c1, c2, T=4):
    return TSeries(A, [A.one(), c1 * h, c2 * h * h], T)


@given(small, small)
def test_inverse(c1, c2):
    f = poly(c1, c2)
    assert f * series_inverse(f) == TSeries.one(A, 4)


@given(small, small, st.integers(min_value=1, max_value=5))
def test_fractional_power_roundtrip(c1, c2, n):
    f = poly(c1, c2)
    root = series_frac_power(f, Fraction(1, n))
    assert series_pow(root, n) == f


@given(small, small, small, small)
def test_fractional_powers_add(c1, c2, a, b):
    f = poly(c1, c2)
    assert series_frac_power(f, a) * series_frac_power(f, b) == series_frac_power(f, a + b)


def test_inverse_needs_unit_constant():
    with pytest.raises(SeriesError):
        series_inverse(TSeries(A, [2 * A.one()], 3))


def test_truncation_mismatch_refused():
    with pytest.raises(SeriesError):
        poly(1, 0, 3) * poly(1, 0, 4)


def stratum_P1():
    Y = p1_input()
    return Stratum("P1", Y.algebra, dict(Y.lines)), Y.algebra


def test_euler_of_tangent_class():
    W, P1 = stratum_P1()
    x = P1.element({"x": 1})
    assert euler_class(KClass("P1", {"T": 1}), W, Flavor.CH, 3) == 2 * x
    assert euler_class(KClass("P1"), W, Flavor.CH, 3) == P1.one()
    assert euler_class(KClass("P1", {"T": 2}), W, Flavor.CH, 3).is_zero()


def test_combine_first_then_evaluate():
    # half + half is evaluated as the whole class, never as a product of fractional pieces
    W, P1 = stratum_P1()
    half = KClass("P1", {"T": Fraction(1, 2)})
    assert rank(half + half) == 1
    assert euler_class(half + half, W, Flavor.CH, 3) == P1.element({"x": 2})
    with pytest.raises(KClassError):
        euler_class(half, W, Flavor.CH, 3)


def test_evaluate_rejects_fractional_rank():
    W, _ = stratum_P1()
    with pytest.raises(KClassError):
        evaluate(eu_t(KClass("P1", {"T": Fraction(1, 2)}), W, Flavor.CH, 3), Fraction(1, 2), Flavor.CH)


def test_k_flavor_euler():
    Y = p1_input(Flavor.K)
    W = Stratum("P1", Y.algebra, dict(Y.lines))
    assert euler_class(KClass("P1", {"T": 1}), W, Flavor.K, 2) == Y.algebra.element({"p": 2})
    with pytest.raises(KClassError):
        eu_t(KClass("P1", {"T": Fraction(1, 2)}), W, Flavor.K, 2)


def test_kclass_arithmetic_and_restriction():
    a = KClass("X", {"T[1]": 1, "T[2]": Fraction(1, 2)})
    b = a.restrict({"T[1]": "T[12]", "T[2]": "T[12]"}, "D")
    assert b == KClass("D", {"T[12]": Fraction(3, 2)})
    assert (a - a).is_zero()
    assert not is_effective(a)
    assert is_effective(a * 2)
    with pytest.raises(KClassError):
        a + KClass("Y", {"T": 1})


def test_compute_S_weights():
    S = compute_S(3, {1: KClass("Z", {"T[123]": 1}), 2: KClass("Z", {"T[123]": 1})}, "Z")
    assert S == KClass("Z", {"T[123]": 1})
    with pytest.raises(KClassError):
        compute_S(2, {2: KClass("Z", {"T": 1})}, "Z")


def test_sym2_sigma_age(shipped):
    p = shipped("sym2-P1")
    assert p.S("(12)") == KClass("X^(12)", {"T[12]": Fraction(1, 2)})
    assert rank(p.S("(12)")) == Fraction(1, 2)
    assert p.sector("(12)").normal == KClass("X^(12)", {"T[12]": 1})


def test_sym3_three_cycle_obstruction(shipped):
    p = shipped("sym3-P1")
    R = obstruction("(123)", "(123)", p)
    t = p.triple("(123)", "(123)")
    assert R == KClass(t.stratum.name, {"T[123]": 1})
    assert p.euler(R, t.stratum) == t.algebra.element({"x": 2})
