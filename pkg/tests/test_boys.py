import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecpci.boys import boys_array, boys_function


def boys_mp(m, x):
    """F_m(x) to 30 digits through the lower incomplete gamma function."""
    mpmath.mp.dps = 30
    x = mpmath.mpf(x)
    if x == 0:
        return mpmath.mpf(1) / (2 * m + 1)
    return mpmath.gammainc(m + mpmath.mpf(0.5), 0, x) / (2 * x ** (m + mpmath.mpf(0.5)))


@pytest.mark.parametrize("m", [0, 1, 2, 5, 8, 12, 16])
@pytest.mark.parametrize("x", [0.0, 1e-12, 1e-6, 0.1, 1.0, 5.0, 20.0, 34.9, 35.0, 35.1, 60.0, 200.0, 1e4])
def test_boys_against_mpmath(m, x):
    ref = float(boys_mp(m, x))
    assert boys_function(m, x) == pytest.approx(ref, rel=1e-13, abs=1e-300)


def test_boys_zero_argument():
    assert boys_function(0, 0.0) == 1.0
    assert boys_function(3, 0.0) == pytest.approx(1 / 7, rel=1e-15)


def test_boys_large_argument_limit():
    x = 500.0
    assert boys_function(0, x) == pytest.approx(0.5 * math.sqrt(math.pi / x), rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 120.0), st.integers(0, 14))
def test_boys_downward_recursion_identity(x, m):
    """F_m(x) = (2x F_{m+1}(x) + e^-x) / (2m + 1)."""
    F = boys_array(m + 1, x)
    assert F[m] == pytest.approx((2 * x * F[m + 1] + math.exp(-x)) / (2 * m + 1), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 80.0), st.integers(0, 10))
def test_boys_monotone(x, m):
    F = boys_array(m + 1, x)
    assert F[m + 1] < F[m]
    assert boys_function(m, x + 0.5) < boys_function(m, x)


def test_boys_array_consistent():
    F = boys_array(10, 3.3)
    assert np.allclose(F, [boys_function(m, 3.3) for m in range(11)], rtol=1e-15)
