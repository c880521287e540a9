import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ftgraph.summation import Neumaier, dd_mul, fsum_complex, neumaier_sum, two_prod, two_sum

finite = st.floats(-1e6, 1e6, allow_nan=False)
# TwoProduct is exact only while a*b and its error term stay normal
normal = st.one_of(st.just(0.0), st.floats(1e-100, 1e100), st.floats(-1e100, -1e-100))


@given(st.lists(finite, min_size=1, max_size=200))
def test_neumaier_close_to_fsum(xs):
    exact = math.fsum(xs)
    got = float(neumaier_sum(np.array(xs)[:, None])[0])
    assert abs(got - exact) <= 4 * np.finfo(float).eps * max(abs(exact), math.fsum(abs(x) for x in xs) * 1e-16, 1e-300)


def test_neumaier_cancellation():
    xs = [1.0, 1e100, 1.0, -1e100]
    acc = Neumaier(())
    for x in xs:
        acc.add(x)
    assert acc.value == 2.0


@given(finite, finite)
def test_two_sum_is_exact(a, b):
    s, e = two_sum(a, b)
    assert s == a + b
    assert math.fsum([a, b, -s, -e]) == 0.0


@given(normal, normal)
def test_two_prod_is_exact(a, b):
    p, e = two_prod(a, b)
    assert p == a * b
    assert Fraction(p) + Fraction(e) == Fraction(a) * Fraction(b)


def test_dd_mul_keeps_low_part():
    h, l = dd_mul(1.0, 1e-20, 3.0)
    assert h == 3.0 and l == pytest.approx(3e-20)


def test_fsum_complex():
    vals = np.array([1e16 + 1j, 1.0 - 1e16j, -1e16 + 1j, 1e16j])
    assert fsum_complex(vals) == complex(1.0, 2.0)
