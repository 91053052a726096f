import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nonconv.errors import ProductOverflow
from nonconv.oracle import (DoubleDouble, direct_product_lognorm, dd_add, dd_mul, exact_svd_2x2,
                            two_prod, two_sum)

finite = st.floats(min_value=-1e50, max_value=1e50, allow_nan=False, allow_infinity=False)
BOUND = Fraction(1, 2**100)


def _exact(dd):
    return Fraction(dd[0]) + Fraction(dd[1])


@given(finite, finite)
def test_two_sum_is_error_free(a, b):
    s, e = two_sum(a, b)
    assert Fraction(s) + Fraction(e) == Fraction(a) + Fraction(b)


@given(st.floats(min_value=-1e100, max_value=1e100, allow_nan=False).filter(
    lambda x: x == 0 or abs(x) > 1e-200))
def test_two_prod_is_error_free(a):
    b = 1.0 / 3.0 + a * 1e-3
    p, e = two_prod(a, b)
    assert Fraction(p) + Fraction(e) == Fraction(a) * Fraction(b)


def _dd(seed):
    g = np.random.default_rng(seed)
    hi = float(g.standard_normal() * 10.0 ** g.integers(-5, 5))
    lo = hi * float(g.uniform(-1, 1)) * 2.0 ** -54
    return hi, lo


@given(st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1))
def test_dd_operations_relative_error(s1, s2):
    a, b = _dd(s1), _dd(s2)
    exact_sum = _exact(a) + _exact(b)
    got = _exact(dd_add(*a, *b))
    if exact_sum != 0:
        assert abs(got - exact_sum) <= BOUND * abs(exact_sum)
    exact_prod = _exact(a) * _exact(b)
    got = _exact(dd_mul(*a, *b))
    assert abs(got - exact_prod) <= BOUND * abs(exact_prod)


def test_double_double_scalar():
    x = DoubleDouble(1.0) + 1e-20
    assert x.hi == 1.0 and x.lo == 1e-20
    y = (x - 1.0) * 3
    assert float(y) == pytest.approx(3e-20)
    assert abs(x.lo) <= math.ulp(x.hi) / 2


def test_direct_product_trivial_cases():
    assert direct_product_lognorm([np.eye(3)] * 10) == 0.0
    D = np.diag([math.e, 1 / math.e])
    assert direct_product_lognorm([D] * 700) == pytest.approx(700.0, rel=1e-14)
    assert direct_product_lognorm([D] * 50, precision="standard") == pytest.approx(50.0, rel=1e-14)


def test_standard_mode_without_rescaling_overflows():
    with pytest.raises(ProductOverflow):
        direct_product_lognorm([np.diag([1e10, 1e-10])] * 40, precision="standard", rescale=False)


def test_exact_svd_2x2_examples():
    np.testing.assert_allclose(exact_svd_2x2(np.eye(2)), [1, 1])
    np.testing.assert_allclose(exact_svd_2x2([[1, 1], [0, 1]]),
                               [math.sqrt((3 + math.sqrt(5)) / 2), math.sqrt((3 - math.sqrt(5)) / 2)],
                               rtol=1e-15)
    np.testing.assert_allclose(exact_svd_2x2(np.diag([7.0, 1 / 7.0])), [7.0, 1 / 7.0], rtol=1e-15)
