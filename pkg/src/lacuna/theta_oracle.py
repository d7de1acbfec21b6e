"""Exact evaluation of the distance to the nearest integer and brute-force
maximisation of f(theta) = min_j ||n_j theta|| on small truncations.

This module deliberately shares no code with the dyadic engine; it is the
independent check for every certificate the engine emits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np

from .errors import TooLarge
from .rational import format_rational

CANDIDATE_BUDGET = 10**7


def dist_to_int(theta, n: int) -> Fraction:
    """||n theta||, exact."""
    t = Fraction(theta) * n
    frac = t - (t.numerator // t.denominator)
    return min(frac, 1 - frac)


def nearest_int(theta, n: int) -> int:
    t = Fraction(theta) * n
    fl = t.numerator // t.denominator
    return fl if t - fl <= Fraction(1, 2) else fl + 1


@dataclass(frozen=True)
class DistProfile:
    theta: Fraction
    terms: tuple
    per_term: tuple  # (nearest integer, distance) per term
    min_value: Fraction
    argmin: int

    def to_json(self) -> dict:
        return {
            "theta": format_rational(self.theta),
            "terms": list(self.terms),
            "per_term": [[m, format_rational(d)] for m, d in self.per_term],
            "min_value": format_rational(self.min_value),
            "argmin": self.argmin,
        }


def min_dist(theta, terms: Sequence[int]) -> DistProfile:
    terms = tuple(int(t) for t in terms)
    if not terms:
        raise ValueError("min_dist needs at least one term")
    theta = Fraction(theta)
    per = tuple((nearest_int(theta, n), dist_to_int(theta, n)) for n in terms)
    argmin = min(range(len(per)), key=lambda j: (per[j][1], j))
    return DistProfile(theta, terms, per, per[argmin][1], argmin)


def _value_num(p: int, q: int, terms) -> int:
    """q * min_j ||n_j p/q|| as an integer."""
    best = q
    for n in terms:
        r = (n * p) % q
        best = min(best, r, q - r)
    return best


def candidate_denominators(terms: Sequence[int]) -> List[int]:
    """Denominators of all breakpoints of the lower envelope of the tents."""
    terms = sorted(set(int(t) for t in terms))
    dens = set()
    for i, a in enumerate(terms):
        dens.add(2 * a)
        for b in terms[i + 1 :]:
            dens.add(a + b)
            dens.add(b - a)
    return sorted(dens)


def optimal_theta(terms: Sequence[int]) -> Tuple[Fraction, Fraction]:
    """Exact maximiser of min_j ||n_j theta|| over [0, 1); ties go to smallest theta.

    f is piecewise linear; its maximum sits at a vertex of the lower envelope,
    which is either a tent peak r/(2 n_j) or a crossing of two pieces from
    different terms, at r/(n_i + n_j) or r/|n_i - n_j|.
    """
    terms = tuple(sorted(set(int(t) for t in terms)))
    if not terms:
        raise ValueError("optimal_theta needs at least one term")
    dens = candidate_denominators(terms)
    budget = sum(dens)
    if budget > CANDIDATE_BUDGET:
        raise TooLarge(f"{budget} candidates exceeds budget {CANDIDATE_BUDGET}")
    best_theta, best_val = Fraction(0), Fraction(0)
    arr = np.asarray(terms, dtype=np.int64)
    for q in dens:
        p = np.arange(q, dtype=np.int64)
        r = np.outer(arr, p) % q
        vals = np.minimum(r, q - r).min(axis=0)
        j = int(np.argmax(vals))
        v = Fraction(int(vals[j]), q)
        th = Fraction(j, q)
        if v > best_val or (v == best_val and th < best_theta):
            best_theta, best_val = th, v
    return best_theta, best_val


def farey_optimum(terms: Sequence[int], qmax: int = 400) -> Tuple[Fraction, Fraction]:
    """Best theta = p/q over all q <= qmax (second, exhaustive oracle)."""
    arr = np.asarray(sorted(set(int(t) for t in terms)), dtype=np.int64)
    best_theta, best_val = Fraction(0), Fraction(0)
    for q in range(1, qmax + 1):
        p = np.arange(q, dtype=np.int64)
        r = np.outer(arr, p) % q
        vals = np.minimum(r, q - r).min(axis=0)
        j = int(np.argmax(vals))
        v = Fraction(int(vals[j]), q)
        th = Fraction(j, q)
        if v > best_val or (v == best_val and th < best_theta):
            best_theta, best_val = th, v
    return best_theta, best_val


def grid_refine(terms: Sequence[int], resolution: int) -> Tuple[Fraction, Fraction]:
    """Best of theta = k/resolution; the value is a lower bound on the optimum."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    terms = [int(t) for t in terms]
    best_k, best = 0, -1
    for k in range(resolution):
        v = _value_num(k, resolution, terms)
        if v > best:
            best_k, best = k, v
    return Fraction(best_k, resolution), Fraction(best, resolution)
