"""Constants of the dyadic local-lemma construction and verifiers for the
one-sided local lemma with a bounded look-back window.

log2(M) is irrational unless M is a power of two, so every use goes through a
rational upper bracket r (log2 M <= r < log2 M + 1/64): delta = c0/(M r) only
shrinks and h = ceil(C1 r) M only grows, both in the safe direction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import ConstantsInfeasible, MTooSmall
from .rational import format_rational, log2_upper, parse_rational, pow_lower

DEFAULT_C0 = Fraction(1, 240)
DEFAULT_C1 = 6


def _ceil(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


@dataclass(frozen=True)
class LLLParams:
    M: int
    c0: Fraction
    C1: int
    log2M_upper: Fraction
    delta: Fraction
    h: int
    x: Fraction

    def window_start(self, i: int) -> int:
        """m(i) = max(i - h, 0), 1-based: events j < m(i) are conditioned on."""
        return max(i - self.h, 0)

    def to_json(self) -> dict:
        return {
            "M": self.M,
            "c0": format_rational(self.c0),
            "C1": self.C1,
            "delta": format_rational(self.delta),
            "h": self.h,
            "x": format_rational(self.x),
        }

    @classmethod
    def from_json(cls, data) -> "LLLParams":
        p = make_params(int(data["M"]), parse_rational(data["c0"]), int(data["C1"]))
        for key in ("delta", "h", "x"):
            if key in data:
                got = data[key] if key == "h" else parse_rational(data[key])
                if got != getattr(p, key):
                    raise ConstantsInfeasible(f"{key}={data[key]} disagrees with recomputed {getattr(p, key)}")
        return p


def make_params(M: int, c0=DEFAULT_C0, C1: int = DEFAULT_C1) -> LLLParams:
    if M < 4:
        raise MTooSmall(f"M = {M} < 4")
    c0 = parse_rational(c0)
    if c0 <= 0 or C1 < 1:
        raise ConstantsInfeasible("c0 and C1 must be positive")
    if 240 * c0 > 1:
        raise ConstantsInfeasible(f"240*c0 = {240 * c0} > 1")
    if 40 * C1 * c0 > 1:
        raise ConstantsInfeasible(f"40*C1*c0 = {40 * C1 * c0} > 1")
    r = log2_upper(M)
    delta = c0 / (M * r)
    h = _ceil(C1 * r) * M
    x = Fraction(1, h)
    # M^-C1 <= delta, i.e. the lacunary tail term is dominated
    if Fraction(1, M**C1) > delta:
        raise ConstantsInfeasible(f"M^-C1 = 1/{M**C1} exceeds delta = {delta}")
    params = LLLParams(M=M, c0=c0, C1=C1, log2M_upper=r, delta=delta, h=h, x=x)
    check_chain(params)
    return params


def check_chain(p: LLLParams) -> None:
    """Assert 36 delta <= x, x <= 1/16 and 12 delta <= x (1-x)^h exactly."""
    if p.x > Fraction(1, 16):
        raise ConstantsInfeasible(f"x = {p.x} > 1/16")
    if 36 * p.delta > p.x:
        raise ConstantsInfeasible(f"36*delta = {36 * p.delta} > x = {p.x}")
    if 12 * p.delta > p.x * pow_lower(1 - p.x, p.h):
        raise ConstantsInfeasible("12*delta > x(1-x)^h")


def conclusion_bound(n: int, x) -> Fraction:
    """(1-x)^n, the guaranteed measure of the surviving set after n events."""
    x = parse_rational(x)
    if n < 0:
        raise ValueError("n must be nonnegative")
    return (1 - x) ** n


@dataclass
class Report:
    name: str
    passed: bool
    first_failure: Optional[int] = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        out = {"check": self.name, "passed": self.passed, "first_failure": self.first_failure}
        out.update({k: format_rational(v) if isinstance(v, Fraction) else v for k, v in self.details.items()})
        return out


def verify_one_sided_hypothesis(cond_probs: Sequence, window: int, x) -> Report:
    """cond_probs[i] <= x (1-x)^window for every i (constant weights)."""
    x = parse_rational(x)
    bound = x * pow_lower(1 - x, window)
    worst = Fraction(0)
    for i, p in enumerate(cond_probs):
        p = Fraction(p)
        worst = max(worst, p)
        if p > bound:
            return Report("one_sided_hypothesis", False, i, {"bound": bound, "value": p})
    return Report("one_sided_hypothesis", True, None, {"bound": bound, "worst": worst})


def verify_general_hypothesis(cond_probs: Sequence, xs: Sequence, ms: Sequence[int]) -> Report:
    """General weights: P(A_i | B_m(i)) <= x_i prod_{m(i) <= j < i} (1 - x_j).

    Indices are 0-based here; ms[i] is the first index of the look-back window
    (0 <= ms[i] <= i) and cond_probs[i] is conditioned on the complements of
    events 0..ms[i]-1.
    """
    xs = [Fraction(v) for v in xs]
    for i, p in enumerate(cond_probs):
        m = ms[i]
        if not 0 <= m <= i:
            raise ValueError(f"window start {m} invalid at {i}")
        rhs = xs[i]
        for j in range(m, i):
            rhs *= 1 - xs[j]
        if Fraction(p) > rhs:
            return Report("general_hypothesis", False, i, {"bound": rhs, "value": Fraction(p)})
    return Report("general_hypothesis", True)


def verify_general_conclusion(avoid_probs: Sequence, xs: Sequence) -> Report:
    """P(no event among the first n) >= prod_{l<n} (1 - x_l) for every prefix n."""
    bound = Fraction(1)
    for n, p in enumerate(avoid_probs):
        if n > 0:
            bound *= 1 - Fraction(xs[n - 1])
        if Fraction(p) < bound:
            return Report("general_conclusion", False, n, {"bound": bound, "value": Fraction(p)})
    return Report("general_conclusion", True)


def verify_conditional_inequality(seq, params: LLLParams, i: int, exact_joint, exact_prior) -> Report:
    """Check the per-step estimate for event i (1-based).

    For i with a nontrivial window (i - h - 1 >= 1):
        joint <= prior (8 delta + 4 n_{i-h-1}/n_i)  and  joint/prior <= 12 delta.
    Otherwise the conditioning set is everything and joint <= 8 delta.
    """
    joint, prior = Fraction(exact_joint), Fraction(exact_prior)
    d = params.delta
    terms = seq.terms if hasattr(seq, "terms") else tuple(seq)
    back = i - params.h - 1
    details = {"i": i, "joint": joint, "prior": prior}
    if back < 1:
        ok = joint <= 8 * d and prior == 1
        return Report("conditional_inequality", ok, None if ok else i, details)
    if prior <= 0:
        return Report("conditional_inequality", False, i, details)
    tail = Fraction(terms[back - 1], terms[i - 1])
    details["tail_ratio"] = tail
    ok = joint <= prior * (8 * d + 4 * tail) and joint <= 12 * d * prior
    return Report("conditional_inequality", ok, None if ok else i, details)
