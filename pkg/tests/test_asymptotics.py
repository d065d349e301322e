"""Integer checks of the bookkeeping behind the lattice-shell bound."""
import math

from fractions import Fraction

import pytest

from distinct_angles.census import n_r_d
from distinct_angles.configurations import shell_mean_bound


@pytest.mark.parametrize("d", range(17, 400))
def test_quadratic_beats_linear_plus_log(d):
    # d^2 >= 16 d + 4 log2 d  <=>  2^(d^2 - 16 d) >= d^4
    assert d * d - 16 * d >= 0
    assert 2 ** (d * d - 16 * d) >= d ** 4


def test_inequality_fails_below_17():
    assert 16 * 16 < 16 * 16 + 4 * 4


@pytest.mark.parametrize("d", range(17, 60))
def test_reduced_triple_count_below_n_squared_factor(d):
    r = 2 ** d
    n_min = 2 ** ((d - 1) * (d - 3)) // (d - 1) + 1
    assert n_r_d(r, d) == (3 * r * r + 3 * r + 1) ** d <= (4 * r * r) ** d == 2 ** (2 * (d + 1) * d)
    assert 2 ** (2 * (d + 1) * d) < n_min ** 2 * 2 ** (11 * d)
    # d <= 2 sqrt(log2 n)  <=>  d^2 <= 4 log2 n  <=>  2^(d^2) <= n^4
    assert 2 ** (d * d) <= n_min ** 4


@pytest.mark.parametrize("d", range(2, 40))
def test_shell_mean_bound_at_r_power_of_two(d):
    # (r+1)^d points over d r^2 + 1 levels, with r = 2^d
    r = 2 ** d
    assert shell_mean_bound(r, d) == Fraction((r + 1) ** d, d * r * r + 1)
    assert shell_mean_bound(r, d) >= Fraction(2 ** (d * d), d * 2 ** (2 * d) + 1)
