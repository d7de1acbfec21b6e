from fractions import Fraction as F
import math

import pytest
from hypothesis import given, settings, strategies as st

from lacuna.dyadic import cover_forbidden
from lacuna.errors import CapExceeded, DeltaTooLarge, EmptySurvivor, LacunaError, RatioNotAboveFour
from lacuna.lll import make_params
from lacuna.sequences import generate_geometric, validate
from lacuna.survivor import (extract_theta, params_for, pipeline, run, sieve, warmup_nested,
                             SurvivorState)
from lacuna.dyadic import DyadicSet
from lacuna.theta_oracle import min_dist, optimal_theta

POW2 = validate([2**k for k in range(15)])


def test_powers_of_two_fifteen_steps():
    p = make_params(4)
    state = run(POW2, p, 15)
    assert state.survivor.measure() >= F(47, 48) ** 15
    for i, rec in enumerate(state.history, 1):
        assert rec.measure_after >= F(47, 48) ** i
    cert = extract_theta(state)
    assert cert.value >= F(1, 1920)
    assert min_dist(cert.theta, POW2.terms).min_value == cert.value
    assert cert.bound == F(47, 48) ** 15


def test_zero_steps():
    state = run(POW2, make_params(4), 0)
    assert state.survivor.measure() == 1
    cert = extract_theta(state)
    assert cert.theta == F(1, 2) and cert.value == math.inf
    assert cert.to_json()["value"] == "inf"


def test_single_step_four_sixteenth():
    state = sieve([4], F(1, 16))
    cert = extract_theta(state)
    assert cert.value >= F(1, 16)
    # by hand: level 5 cells of width 1/32; the arcs around k/4 of radius 1/64 each
    # touch two cells, leaving the 24 cells away from the quarter points
    assert state.survivor.measure() == F(24, 32)
    assert not state.survivor.intersect(cover_forbidden(4, F(1, 16)))


def test_delta_too_large():
    with pytest.raises(DeltaTooLarge):
        sieve([1, 3], F(2, 3))


def test_run_rejects_small_m():
    seq = validate([1, 2, 3, 4, 5, 6, 7, 8, 9, 10])
    with pytest.raises(LacunaError):
        run(seq, make_params(4), 10)


def test_max_term_cap():
    with pytest.raises(CapExceeded):
        run(POW2, make_params(4), 15, max_term=1000)


def test_interval_cap(monkeypatch):
    monkeypatch.setenv("LACUNA_MAX_INTERVALS", "10")
    with pytest.raises(CapExceeded):
        run(POW2, make_params(4), 15)


def test_empty_survivor_detected():
    # delta = 1/4 around every k/3 and k/2 and k/5 kills the circle
    with pytest.raises(EmptySurvivor):
        sieve([1, 2, 3, 4, 5, 6], F(1, 4))
    with pytest.raises(EmptySurvivor):
        extract_theta(SurvivorState(POW2, None, F(1, 4), 0, DyadicSet.empty()))


@given(st.fractions(min_value=F(1, 40), max_value=F(1, 5), max_denominator=60), st.integers(0, 25))
@settings(max_examples=25)
def test_survivor_invariants(eps, n):
    seq = generate_geometric(eps, 25)
    p = params_for(seq)
    state = run(seq, p, n)
    for j in range(n):
        assert not state.survivor.intersect(cover_forbidden(seq.terms[j], p.delta))
    assert state.survivor.measure() >= (1 - p.x) ** n
    cert = extract_theta(state)
    if n:
        assert cert.value >= p.delta
        assert min_dist(cert.theta, seq.terms[:n]).min_value == cert.value
        assert all(d == min_dist(cert.theta, [t]).min_value for t, _, d in cert.witnesses)


def test_oracle_dominates_certificate():
    seq = validate([1, 3, 7, 11])
    state = sieve(seq, F(1, 50))
    cert = extract_theta(state)
    assert cert.value <= optimal_theta(seq.terms)[1]


def test_determinism():
    a = pipeline(F(1, 8), 30)[0]
    b = pipeline(F(1, 8), 30)[0]
    assert a == b and a.to_json() == b.to_json()


def test_warmup_examples():
    cert, chain = warmup_nested((5, 25, 125))
    assert cert.value >= F(1, 4)
    assert min_dist(F(1, 10), (5, 25, 125)).min_value == F(1, 2) >= cert.value
    cert, _ = warmup_nested((5, 26), 2)
    assert cert.value >= F(1, 4)
    assert min_dist(cert.theta, (5, 26)).min_value == cert.value
    with pytest.raises(RatioNotAboveFour):
        warmup_nested((5, 20))


@given(st.lists(st.integers(1, 40), min_size=1, max_size=8), st.integers(1, 30))
def test_warmup_nesting(gaps, start):
    terms = [start]
    for g in gaps:
        terms.append(4 * terms[-1] + g)
    cert, chain = warmup_nested(terms)
    assert cert.value >= F(1, 4)
    for (a, b), (c, d) in zip(chain, chain[1:]):
        assert a <= c < d <= b


def test_pipeline_examples():
    cert, summary, state = pipeline(F(1, 8), 60)
    assert summary["M"] <= 8
    assert cert.value >= make_params(summary["M"]).delta
    cert, summary, _ = pipeline(F(1, 5), 40)
    assert summary["M"] == 4  # span 4 at eps 1/5
    assert cert.value >= make_params(4).delta
    for bad in (F(1, 4), F(1, 2), 0):
        with pytest.raises(ValueError):
            pipeline(bad, 10)


def test_pipeline_summary_keys():
    _, summary, _ = pipeline(F(1, 16), 20)
    for key in ("delta", "h", "value", "normalized_constant", "reference_rows", "colors"):
        assert key in summary
    assert summary["colors"] == math.ceil(1 / F(summary["delta"]))
