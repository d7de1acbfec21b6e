"""The constructive sieve: remove the dyadic cover of every forbidden set
{theta : ||n_j theta|| < delta} from [0, 1), certify the measure of what is
left against the local-lemma product bound after every step, and extract an
explicit rational theta. Also the nested-middle-halves construction for
sequences with ratio above four.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

from . import theta_oracle
from .dyadic import DyadicSet, cover_forbidden, level_for
from .errors import BoundViolated, CapExceeded, EmptySurvivor, LacunaError, RatioNotAboveFour
from .lll import LLLParams, conclusion_bound, make_params, verify_conditional_inequality
from .rational import format_rational, log2_upper, parse_rational
from .sequences import LacunarySequence, generate_geometric, validate

log = logging.getLogger(__name__)

DEFAULT_MAX_TERM = 2**22
DEFAULT_MAX_INTERVALS = 2**24


def max_intervals() -> int:
    return int(os.environ.get("LACUNA_MAX_INTERVALS", DEFAULT_MAX_INTERVALS))


@dataclass(frozen=True)
class StepRecord:
    j: int  # 1-based index of the event
    n: int
    level: int
    measure_before: Fraction
    measure_after: Fraction
    joint: Fraction  # measure(A_j & B_j), B_j the survivor before step j
    window_joint: Fraction  # measure(A_j & B_m(j))
    window_prior: Fraction  # measure(B_m(j))

    @property
    def ratio(self) -> Fraction:
        """P(A_j | everything avoided so far)."""
        return self.joint / self.measure_before

    @property
    def window_ratio(self) -> Fraction:
        """P(A_j | complements of the events before the look-back window)."""
        return self.window_joint / self.window_prior


@dataclass
class SurvivorState:
    seq: LacunarySequence
    params: Optional[LLLParams]
    delta: Fraction
    processed: int
    survivor: DyadicSet
    history: List[StepRecord] = field(default_factory=list)

    def bound(self) -> Optional[Fraction]:
        if self.params is None:
            return None
        return conclusion_bound(self.processed, self.params.x)

    def window_ratios(self) -> List[Fraction]:
        return [r.window_ratio for r in self.history]


@dataclass(frozen=True)
class ThetaCertificate:
    theta: Fraction
    n: int
    value: object  # Fraction, or math.inf when n == 0
    witnesses: tuple  # (n_j, nearest integer, distance)
    delta: Optional[Fraction] = None
    measure: Optional[Fraction] = None
    bound: Optional[Fraction] = None

    def to_json(self) -> dict:
        return {
            "theta": format_rational(self.theta),
            "n": self.n,
            "value": format_rational(self.value),
            "delta": format_rational(self.delta),
            "measure": format_rational(self.measure),
            "bound": format_rational(self.bound),
        }


def _dump(state: SurvivorState, path_hint: str) -> str:
    lines = [f"survivor diagnostic ({path_hint})", f"processed={state.processed} delta={state.delta}"]
    for r in state.history[-5:]:
        lines.append(f"  j={r.j} n={r.n} l={r.level} before={float(r.measure_before):.6g} after={float(r.measure_after):.6g}")
    return "\n".join(lines)


def _sieve(seq: LacunarySequence, delta: Fraction, n: int, params: Optional[LLLParams],
           max_term: int, cap: int) -> SurvivorState:
    if n > len(seq):
        raise ValueError(f"truncation {n} exceeds sequence length {len(seq)}")
    if n > 0:
        level_for(seq.terms[0], delta)  # raises DeltaTooLarge
    survivor = DyadicSet.full()
    state = SurvivorState(seq, params, delta, 0, survivor)
    h = params.h if params is not None else None
    # snapshots[k] = survivor after k events; kept only while a later window needs it
    snapshots = {0: survivor}
    for i in range(1, n + 1):
        nj = seq.terms[i - 1]
        if nj > max_term:
            raise CapExceeded(f"term {nj} exceeds cap {max_term}")
        cover = cover_forbidden(nj, delta)
        before = survivor.measure()
        joint = survivor.intersect(cover).measure()
        if h is not None and i - h - 1 >= 1:
            prior_set = snapshots.pop(i - h - 1)
            w_joint = prior_set.intersect(cover).measure()
            w_prior = prior_set.measure()
        else:
            w_joint, w_prior = cover.measure(), Fraction(1)
        survivor = survivor.subtract(cover)
        after = survivor.measure()
        if len(survivor) > cap:
            raise CapExceeded(f"survivor has {len(survivor)} runs, cap {cap} (LACUNA_MAX_INTERVALS)")
        rec = StepRecord(i, nj, level_for(nj, delta), before, after, joint, w_joint, w_prior)
        state.history.append(rec)
        state.survivor = survivor
        state.processed = i
        if after != before - joint:
            raise AssertionError("measure bookkeeping mismatch")
        if not survivor:
            raise EmptySurvivor(_dump(state, "empty"))
        if params is not None:
            bound = conclusion_bound(i, params.x)
            if after < bound:
                raise BoundViolated(_dump(state, f"measure {after} < bound {bound}"))
            if i + h + 1 <= n:
                snapshots[i] = survivor
        log.debug("step %d n=%d runs=%d measure=%.6g", i, nj, len(survivor), float(after))
    return state


def run(seq: LacunarySequence, params: LLLParams, n: Optional[int] = None,
        max_term: int = DEFAULT_MAX_TERM, cap: Optional[int] = None) -> SurvivorState:
    """Sieve the first n terms with the params' delta, checking (1-x)^i at every prefix."""
    if n is None:
        n = len(seq)
    span = seq.prefix(n).doubling_span if n else 1
    if params.M < span:
        raise LacunaError(f"params built for M={params.M} but the truncation needs M={span}")
    return _sieve(seq, params.delta, n, params, max_term, cap or max_intervals())


def sieve(terms, delta, n: Optional[int] = None, max_term: int = DEFAULT_MAX_TERM) -> SurvivorState:
    """Sieve with an arbitrary delta and no local-lemma bookkeeping."""
    seq = terms if isinstance(terms, LacunarySequence) else validate(terms)
    return _sieve(seq, parse_rational(delta), len(seq) if n is None else n, None, max_term, max_intervals())


def extract_theta(state: SurvivorState) -> ThetaCertificate:
    if not state.survivor:
        raise EmptySurvivor("nothing survived")
    theta = state.survivor.pick_point()
    terms = state.seq.terms[: state.processed]
    if terms:
        prof = theta_oracle.min_dist(theta, terms)
        value = prof.min_value
        witnesses = tuple((n, m, d) for n, (m, d) in zip(terms, prof.per_term))
        if value < state.delta:
            raise AssertionError(f"theta {theta} has value {value} < delta {state.delta}")
    else:
        value, witnesses = math.inf, ()
    return ThetaCertificate(theta, state.processed, value, witnesses, state.delta,
                            state.survivor.measure(), state.bound())


def params_for(seq: LacunarySequence, c0=None, C1=None) -> LLLParams:
    """Params with M = max(doubling span, 4)."""
    kwargs = {}
    if c0 is not None:
        kwargs["c0"] = c0
    if C1 is not None:
        kwargs["C1"] = C1
    return make_params(max(seq.doubling_span, 4), **kwargs)


def warmup_nested(seq, n: Optional[int] = None):
    """Nested middle halves for ratio > 4; returns (certificate, nested intervals)."""
    terms = tuple(seq.terms if isinstance(seq, LacunarySequence) else seq)
    if n is None:
        n = len(terms)
    terms = terms[:n]
    if not terms:
        raise ValueError("warmup_nested needs at least one term")
    for j in range(len(terms) - 1):
        if terms[j + 1] <= 4 * terms[j]:
            raise RatioNotAboveFour(f"terms[{j + 1}] / terms[{j}] <= 4")
    n1 = terms[0]
    lo, hi = Fraction(1, 4 * n1), Fraction(3, 4 * n1)
    chain = [(lo, hi)]
    for nxt in terms[1:]:
        k = -((-lo.numerator * nxt) // lo.denominator)  # ceil(lo * nxt)
        a, b = Fraction(k, nxt), Fraction(k + 1, nxt)
        if b > hi:
            raise AssertionError("no grid interval inside the middle half")
        lo, hi = a + (b - a) / 4, a + 3 * (b - a) / 4
        chain.append((lo, hi))
    theta = (lo + hi) / 2
    prof = theta_oracle.min_dist(theta, terms)
    if prof.min_value < Fraction(1, 4):
        raise AssertionError("warm-up certificate below 1/4")
    cert = ThetaCertificate(theta, len(terms), prof.min_value,
                            tuple((t, m, d) for t, (m, d) in zip(terms, prof.per_term)), Fraction(1, 4))
    return cert, chain


def reference_bounds(epsilon: Fraction) -> dict:
    """Earlier lower bounds on the achievable distance, as formulas with c = 1."""
    e = float(epsilon)
    le = abs(math.log(e))
    return {
        "this_construction(eps/|log eps|)": e / le,
        "katznelson(eps^2/|log eps|)": e * e / le,
        "de_mathan_pollington(eps^4/|log eps|)": e**4 / le,
    }


def pipeline(epsilon, count: int, max_term: int = DEFAULT_MAX_TERM, c0=None, C1=None):
    """Generate, validate, sieve and extract a certified theta; returns (certificate, summary, state)."""
    epsilon = parse_rational(epsilon)
    if not 0 < epsilon < Fraction(1, 4):
        raise ValueError("pipeline needs 0 < epsilon < 1/4")
    seq = generate_geometric(epsilon, count)
    params = params_for(seq, c0, C1)
    state = run(seq, params, count, max_term=max_term)
    cert = extract_theta(state)
    check = theta_oracle.min_dist(cert.theta, seq.terms[:count])
    if check.min_value != cert.value:
        raise AssertionError("oracle disagrees with certificate")
    r = log2_upper(params.M)
    summary = {
        "epsilon": format_rational(epsilon),
        "count": count,
        "M": params.M,
        "doubling_span": seq.doubling_span,
        "ceil_inv_eps": -((-epsilon.denominator) // epsilon.numerator),
        "delta": format_rational(params.delta),
        "h": params.h,
        "value": format_rational(cert.value),
        "value_float": float(cert.value),
        "normalized_constant": float(cert.value * params.M * r),
        "delta_normalized": float(params.delta * params.M * r),
        "colors": -((-params.delta.denominator) // params.delta.numerator),
        "measure": format_rational(state.survivor.measure()),
        "bound": format_rational(state.bound()),
        "reference_rows": reference_bounds(epsilon),
    }
    return cert, summary, state
