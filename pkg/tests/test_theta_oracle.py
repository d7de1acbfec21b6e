from fractions import Fraction as F
import random

import pytest
from hypothesis import given, settings, strategies as st

from lacuna.errors import TooLarge
from lacuna.theta_oracle import (candidate_denominators, dist_to_int, farey_optimum, grid_refine,
                                 min_dist, nearest_int, optimal_theta)

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=10**6)


def test_dist_examples():
    assert dist_to_int(F(1, 3), 4) == F(1, 3)
    assert dist_to_int(F(2, 5), 2) == F(1, 5)
    assert dist_to_int(F(1, 2), 2) == 0


def test_nearest_int():
    assert nearest_int(F(1, 3), 4) == 1
    assert nearest_int(F(2, 5), 2) == 1
    assert nearest_int(F(1, 10), 125) == 12


def test_min_dist_examples():
    assert min_dist(F(1, 3), (1, 2, 4, 8, 16)).min_value == F(1, 3)
    assert min_dist(F(1, 10), (5, 25, 125)).min_value == F(1, 2)
    assert min_dist(0, (3, 7)).min_value == 0
    with pytest.raises(ValueError):
        min_dist(F(1, 2), ())


def test_profile_json():
    d = min_dist(F(1, 3), (1, 2)).to_json()
    assert d == {"theta": "1/3", "terms": [1, 2], "per_term": [[0, "1/3"], [1, "1/3"]],
                 "min_value": "1/3", "argmin": 0}


@given(rationals, st.integers(1, 10**6))
def test_symmetry_and_periodicity(theta, n):
    d = dist_to_int(theta, n)
    assert 0 <= d <= F(1, 2)
    assert d == dist_to_int(1 - theta, n) == dist_to_int(theta + 1, n)
    assert abs(theta * n - nearest_int(theta, n)) == d


def test_optimal_examples():
    assert optimal_theta((1,)) == (F(1, 2), F(1, 2))
    assert optimal_theta((1, 2)) == (F(1, 3), F(1, 3))
    assert optimal_theta((1, 2, 4, 8, 16, 32)) == (F(1, 3), F(1, 3))


def test_optimal_budget():
    with pytest.raises(TooLarge):
        optimal_theta([k * k for k in range(1, 80)])


def test_candidates_small():
    assert candidate_denominators((1, 2)) == [1, 2, 3, 4]


def test_grid_examples():
    assert grid_refine((1,), 4) == (F(2, 4), F(1, 2))
    assert grid_refine((1, 2), 3) == (F(1, 3), F(1, 3))
    with pytest.raises(ValueError):
        grid_refine((1,), 1)


def _dense_scan(terms, q):
    """Max of f over every p/q, evaluated one fraction at a time."""
    best = (F(-1), None)
    for p in range(q):
        v = min(dist_to_int(F(p, q), n) for n in terms)
        if v > best[0]:
            best = (v, F(p, q))
    return best


@pytest.mark.parametrize("seed", range(10))
def test_optimal_matches_farey(seed):
    rng = random.Random(seed)
    terms = sorted(rng.sample(range(1, 13), rng.randint(1, 6)))
    assert optimal_theta(terms) == farey_optimum(terms, 400)


@given(st.lists(st.integers(1, 12), min_size=1, max_size=5, unique=True))
@settings(max_examples=40)
def test_optimal_dominates_scans(terms):
    th, v = optimal_theta(terms)
    assert min_dist(th, terms).min_value == v
    assert _dense_scan(terms, 840)[0] <= v
    for res in (7, 50, 97):
        assert grid_refine(terms, res)[1] <= v


@given(st.lists(st.integers(1, 40), min_size=1, max_size=6, unique=True), rationals)
@settings(max_examples=60)
def test_optimal_dominates_any_theta(terms, theta):
    assert min_dist(theta, terms).min_value <= optimal_theta(terms)[1]
