from fractions import Fraction as F
import math

import pytest
from hypothesis import given, strategies as st

from lacuna.rational import floor_log2, format_rational, log2_upper, parse_rational, pow_lower


def test_format_parse():
    assert format_rational(F(3)) == "3/1"
    assert parse_rational("6/4") == F(3, 2)
    assert format_rational(math.inf) == "inf"
    assert parse_rational(" -7 ") == -7


@pytest.mark.parametrize("bad", ["0.125", "1e-3", "1/2/3", "", 0.5])
def test_parse_refuses_inexact_forms(bad):
    with pytest.raises((ValueError, TypeError)):
        parse_rational(bad)


@given(st.integers(1, 2**20))
def test_log2_upper_brackets(m):
    r = log2_upper(m)
    # log2 m <= r < log2 m + 1/64, decided exactly
    assert 2 ** (64 * r) >= m**64
    assert 2 ** (64 * r - 1) < m**64


def test_log2_upper_exact_on_powers():
    for k in range(0, 20):
        assert log2_upper(2**k) == k


def test_floor_log2():
    assert floor_log2(F(4800)) == 12
    assert floor_log2(F(2)) == 1
    assert floor_log2(F(1)) == 0
    assert floor_log2(F(7, 3)) == 1


def test_pow_lower_is_lower_bound():
    x = F(1, 5000)
    lb = pow_lower(1 - x, 6000)
    # compare against a high-precision float evaluation with margin
    assert float(lb) <= math.exp(6000 * math.log1p(-1 / 5000)) + 1e-15
    assert float(lb) > math.exp(6000 * math.log1p(-1 / 5000)) - 1e-12
    assert pow_lower(F(1, 2), 10) == F(1, 1024)
