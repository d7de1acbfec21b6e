"""Lacunary sequences: validation, generation, unions and K-way splitting."""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import EmptySequence, LacunaError, NotIncreasing, RatioViolation
from .rational import format_rational, parse_rational


@dataclass(frozen=True)
class LacunarySequence:
    terms: tuple
    epsilon: Optional[Fraction] = None
    doubling_span: int = 1

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, i):
        return self.terms[i]

    def prefix(self, n: int) -> "LacunarySequence":
        return validate(self.terms[:n], self.epsilon)

    def to_json(self) -> dict:
        return {
            "epsilon": format_rational(self.epsilon) if self.epsilon is not None else None,
            "terms": list(self.terms),
        }

    @classmethod
    def from_json(cls, data) -> "LacunarySequence":
        if isinstance(data, str):
            data = json.loads(data)
        eps = data.get("epsilon")
        return validate(data["terms"], parse_rational(eps) if eps is not None else None)


def doubling_span(terms: Sequence[int]) -> int:
    """Smallest M with terms[j+M] > 2*terms[j] for every j where j+M is in range.

    Index j with no term above 2*terms[j] forces j+M past the end.
    """
    n = len(terms)
    m = 1
    for j, t in enumerate(terms):
        m = max(m, bisect_right(terms, 2 * t, j + 1) - j)
    return m


def span_bound(epsilon: Fraction) -> int:
    """Smallest K with (1+epsilon)**K > 2, the span implied by ratio >= 1+epsilon."""
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    k, p = 1, 1 + epsilon
    while p <= 2:
        k += 1
        p *= 1 + epsilon
    return k


def validate(terms, epsilon=None) -> LacunarySequence:
    terms = tuple(int(t) for t in terms)
    if not terms:
        raise EmptySequence("sequence has no terms")
    if terms[0] < 1:
        raise NotIncreasing("terms must be positive integers")
    for j in range(len(terms) - 1):
        if terms[j + 1] <= terms[j]:
            raise NotIncreasing(f"terms[{j + 1}] = {terms[j + 1]} does not exceed terms[{j}] = {terms[j]}")
    if epsilon is not None:
        epsilon = parse_rational(epsilon)
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        ratio = 1 + epsilon
        for j in range(len(terms) - 1):
            if terms[j + 1] < ratio * terms[j]:
                raise RatioViolation(j)
    m = doubling_span(terms)
    if epsilon is not None and m > span_bound(epsilon):
        raise LacunaError(f"doubling span {m} exceeds the ratio bound {span_bound(epsilon)}")
    return LacunarySequence(terms=terms, epsilon=epsilon, doubling_span=m)


def generate_geometric(epsilon, count: int, start: int = 1) -> LacunarySequence:
    """n_1 = start, n_{j+1} = smallest integer strictly above (1+epsilon) n_j."""
    epsilon = parse_rational(epsilon)
    if epsilon <= 0 or count < 1 or start < 1:
        raise ValueError("need epsilon > 0, count >= 1, start >= 1")
    terms = [start]
    ratio = 1 + epsilon
    for _ in range(count - 1):
        x = ratio * terms[-1]
        terms.append(x.numerator // x.denominator + 1)
    return validate(terms, epsilon)


def merge_union(seqs) -> LacunarySequence:
    """Sorted union of ratio-certified sequences; the result carries no epsilon."""
    seqs = list(seqs)
    if not seqs:
        raise EmptySequence("nothing to merge")
    if len(seqs) == 1:
        return seqs[0]
    bound = 0
    for s in seqs:
        if s.epsilon is None:
            raise LacunaError("merge_union needs ratio-certified inputs")
        bound += span_bound(s.epsilon)
    merged = sorted(set(t for s in seqs for t in s.terms))
    out = validate(merged, None)
    if out.doubling_span > bound:
        raise LacunaError(f"merged span {out.doubling_span} exceeds sum of spans {bound}")
    return out


def split_count(epsilon) -> int:
    """Smallest K with (1+epsilon)**K > 4."""
    epsilon = parse_rational(epsilon)
    k, p = 1, 1 + epsilon
    while p <= 4:
        k += 1
        p *= 1 + epsilon
    return k


def split_subsequences(seq: LacunarySequence) -> list:
    """Split into K interleaved subsequences n_{Kj+r}, each with ratio > 4."""
    if seq.epsilon is None:
        raise LacunaError("split_subsequences needs a ratio-certified sequence")
    k = split_count(seq.epsilon)
    sub_eps = (1 + seq.epsilon) ** k - 1
    return [validate(seq.terms[r::k], sub_eps) for r in range(k) if seq.terms[r::k]]
