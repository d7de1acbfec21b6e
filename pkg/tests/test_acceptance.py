"""End-to-end acceptance checks, one test per criterion, at the stated tolerances."""

from contextlib import contextmanager
from fractions import Fraction as F
import math
import random
import time

import pytest

from conftest import ACCEPTANCE
from lacuna.coloring import (DistanceGraphWindow, chromatic_exact, color_from_theta, densest_color_class,
                             verify_proper, warmup_coloring)
from lacuna.lll import make_params
from lacuna.sequences import generate_geometric, split_count, validate
from lacuna.survivor import extract_theta, pipeline, run, warmup_nested
from lacuna.theta_oracle import farey_optimum, min_dist, optimal_theta
from lacuna.vdc import check_ruzsa, corollary_check, fejer_value, gamma_lp

EPSILONS = (F(1, 4), F(1, 8), F(1, 16))
COUNT = 60


@contextmanager
def criterion(key, text):
    try:
        yield
    except BaseException:
        ACCEPTANCE[key] = (False, text)
        raise
    # parametrized criteria: any failing case keeps the criterion failed
    ACCEPTANCE[key] = (ACCEPTANCE.get(key, (True, text))[0], text)


@pytest.fixture(scope="module")
def runs():
    """One survivor run per epsilon with M = doubling span; shared by several criteria."""
    out = {}
    for eps in EPSILONS:
        seq = generate_geometric(eps, COUNT)
        params = make_params(seq.doubling_span)
        t0 = time.perf_counter()
        state = run(seq, params, COUNT)
        out[eps] = (seq, params, state, time.perf_counter() - t0)
    return out


def test_criterion_01_measure_bound(runs):
    with criterion(1, "survivor measure >= (1-1/h)^i at every prefix, 60 terms, eps in {1/4,1/8,1/16}"):
        for eps, (seq, p, state, elapsed) in runs.items():
            assert seq.terms[-1] <= 2**22
            assert len(state.history) == COUNT
            for rec in state.history:
                assert rec.measure_after >= (1 - F(1, p.h)) ** rec.j
                assert rec.measure_after >= (1 - F(1, p.h)) ** COUNT
            assert state.survivor.measure() >= (1 - F(1, p.h)) ** COUNT
            assert elapsed < 60, f"eps={eps} took {elapsed:.1f}s"


def test_criterion_02_certificate(runs):
    with criterion(2, "certificate value >= delta, exact agreement with the independent oracle"):
        for eps, (seq, p, state, _) in runs.items():
            cert = extract_theta(state)
            assert p.delta == p.c0 / (p.M * p.log2M_upper)
            assert cert.value >= p.delta
            assert min_dist(cert.theta, seq.terms[:COUNT]).min_value == cert.value
        for eps in EPSILONS[1:]:
            cert, summary, _ = pipeline(eps, COUNT)
            assert cert.value >= F(summary["delta"])
            assert min_dist(cert.theta, generate_geometric(eps, COUNT).terms).min_value == cert.value


def test_criterion_03_katznelson_coloring(runs):
    with criterion(3, "certificate coloring proper on [-1e5, 1e5] with ceil(1/delta) colors, < 30 s"):
        window = (-10**5, 10**5)
        for eps, (seq, p, state, _) in runs.items():
            cert = extract_theta(state)
            t0 = time.perf_counter()
            col = color_from_theta(cert.theta, p.delta, window)
            bad = verify_proper(col, DistanceGraphWindow.of(seq.terms[:COUNT], window))
            elapsed = time.perf_counter() - t0
            assert bad is None
            assert col.k == math.ceil(1 / p.delta)
            assert col.used() <= col.k
            assert elapsed < 30


@pytest.mark.parametrize("m", range(3, 9))
def test_criterion_04_sharpness(m):
    with criterion(4, "chromatic number of {1..m} on [0, 3m] is m+1 for m = 3..8, < 10 s each"):
        t0 = time.perf_counter()
        assert chromatic_exact(DistanceGraphWindow.of(range(1, m + 1), (0, 3 * m))) == m + 1
        assert time.perf_counter() - t0 < 10
        # a superset of {1..m} inside the window keeps the clique
        assert chromatic_exact(DistanceGraphWindow.of(set(range(1, m + 1)) | {3 * m}, (0, 3 * m))) >= m + 1


def test_criterion_05_warmup():
    with criterion(5, "warm-up value >= 1/4, 4^K coloring proper, pipeline colors < 4^K for eps <= 1/8"):
        for terms in [(5, 25, 125), (5, 26), (1, 5, 21, 85, 341, 1365), (3, 13, 53, 213, 853)]:
            cert, chain = warmup_nested(terms)
            assert cert.value >= F(1, 4)
            assert min_dist(cert.theta, terms).min_value == cert.value
        window = (-20000, 20000)
        ratio_seq = validate([7 * 5**k for k in range(8)], 4)
        col = warmup_coloring(ratio_seq, window)
        assert col.k == 4 and col.used() <= 4
        assert verify_proper(col, DistanceGraphWindow.of(ratio_seq.terms, window)) is None
        for eps in (F(1, 8), F(1, 16)):
            seq = generate_geometric(eps, 40)
            K = split_count(eps)
            col = warmup_coloring(seq, window)
            assert col.k == 4**K and col.used() <= 4**K
            assert verify_proper(col, DistanceGraphWindow.of(seq.terms, window)) is None
            cert, summary, _ = pipeline(eps, 40)
            assert summary["colors"] < 4**K
            pcol = color_from_theta(cert.theta, F(summary["delta"]), window)
            assert pcol.k == summary["colors"]
            assert verify_proper(pcol, DistanceGraphWindow.of(seq.terms, window)) is None


def test_criterion_06_hypothesis_chain(runs):
    with criterion(6, "windowed and full-history conditional ratios <= 12 delta <= x(1-x)^h, exact"):
        for eps, (seq, p, state, _) in runs.items():
            assert 12 * p.delta <= p.x * (1 - p.x) ** p.h
            ratios = state.window_ratios()
            assert len(ratios) == COUNT
            assert all(r <= 12 * p.delta for r in ratios)
            assert all(rec.ratio <= 12 * p.delta for rec in state.history)


def test_criterion_07_gamma_brackets():
    with criterion(7, "gamma bracket contains 1/(m+1) for m <= 8, width <= 1e-2 at grid 1024; {1} holds 1/2"):
        for m in range(1, 9):
            s = gamma_lp(range(1, m + 1), 1024)
            v = float(fejer_value(m))
            assert s.gamma_lower - 1e-6 <= v <= s.gamma_upper + 1e-6
            assert s.gamma_upper - s.gamma_lower <= 1e-2
        s = gamma_lp({1}, 1024)
        assert s.gamma_lower - 1e-6 <= 0.5 <= s.gamma_upper + 1e-6


def test_criterion_08_ruzsa():
    with criterion(8, "density <= gamma_upper + 1e-6 on {1..m} and 100 random H in {1..12}, N = 120"):
        for m in range(1, 9):
            rep = check_ruzsa(range(1, m + 1), 120, 1024)
            assert rep, rep.to_json()
        rng = random.Random(2024)
        seen = 0
        while seen < 100:
            H = [h for h in range(1, 13) if rng.random() < 0.4]
            if not H:
                continue
            rep = check_ruzsa(H, 120, 1024)
            assert rep, rep.to_json()
            seen += 1


def test_criterion_09_corollary_chain():
    with criterion(9, "Bohr-class density <= gamma_upper + 1e-6 on 8-12 term truncations"):
        seqs = [validate([2**k for k in range(12)]), generate_geometric(F(1, 4), 12),
                generate_geometric(F(1, 8), 12), generate_geometric(F(1, 16), 12)]
        for seq in seqs:
            for n in range(8, 13):
                params = make_params(max(seq.prefix(n).doubling_span, 4))
                cert = extract_theta(run(seq, params, n))
                rep = corollary_check(seq, cert)
                assert rep, rep.to_json()
                assert rep.values["density"] <= rep.values["gamma_upper"] + 1e-6


def test_criterion_10_oracle_agreement():
    with criterion(10, "optimal_theta equals the Farey search (q <= 400) on 50 random sets, max term <= 12"):
        rng = random.Random(10)
        for _ in range(50):
            terms = sorted(rng.sample(range(1, 13), rng.randint(1, 7)))
            th, v = optimal_theta(terms)
            fth, fv = farey_optimum(terms, 400)
            assert v == fv
            assert min_dist(th, terms).min_value == v
