import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dephasent import digamma, hurwitz_zeta, polygamma


def test_trigamma_values():
    assert abs(polygamma(1, 1) - math.pi ** 2 / 6) <= 1e-10
    assert abs(polygamma(1, 0.5) - math.pi ** 2 / 2) <= 1e-10


def test_trigamma_matches_direct_series():
    z = 0.7 + 0.3j
    # partial sum to 2e5 terms plus the integral tail 1/(z+N)
    n = 200_000
    k = np.arange(n)
    direct = np.sum(1.0 / (z + k) ** 2) + 1.0 / (z + n) + 0.5 / (z + n) ** 2
    assert abs(polygamma(1, z) - direct) <= 1e-10


def test_digamma_known_values():
    assert abs(digamma(1) + 0.5772156649015329) <= 1e-13
    assert abs(digamma(0.5) - (-0.5772156649015329 - 2 * math.log(2))) <= 1e-13


@pytest.mark.parametrize("m", [0, 1, 2, 3])
@pytest.mark.parametrize("z", [0.05 + 0.0j, 0.7 + 0.3j, 1.5 - 4.0j, 3.0 + 20.0j, 12.5 + 0.1j])
def test_against_mpmath(m, z):
    ref = complex(mp.polygamma(m, z))
    assert abs(polygamma(m, z) - ref) <= 1e-12 * max(1.0, abs(ref))


@pytest.mark.parametrize("s", [1.5, 2.0, 3.7])
def test_hurwitz_against_mpmath(s):
    for z in (0.3 + 2j, 1.0, 4.2 - 1j):
        ref = complex(mp.zeta(s, z))
        assert abs(hurwitz_zeta(s, z) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_domain_errors():
    with pytest.raises(ValueError):
        polygamma(1, -0.5 + 1j)
    with pytest.raises(ValueError):
        polygamma(1, 0.0)
    with pytest.raises(ValueError):
        polygamma(-1, 1.0)
    with pytest.raises(ValueError):
        polygamma(1.5, 1.0)
    with pytest.raises(ValueError):
        hurwitz_zeta(1.0, 2.0)


def test_recurrence_at_random_points():
    rng = np.random.default_rng(0)
    for _ in range(100):
        z = complex(rng.uniform(1e-3, 5.0), rng.uniform(-5.0, 5.0))
        lhs = polygamma(1, z + 1)
        rhs = polygamma(1, z) - 1.0 / z ** 2
        assert abs(lhs - rhs) <= 1e-10


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 4), st.floats(1e-3, 5.0), st.floats(-10.0, 10.0))
def test_recurrence_property(m, x, y):
    z = complex(x, y)
    lhs = polygamma(m, z + 1)
    base = polygamma(m, z)
    rhs = base + (-1) ** m * math.factorial(m) / z ** (m + 1)
    # the two terms nearly cancel close to the pole, so scale by their size
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(base))
