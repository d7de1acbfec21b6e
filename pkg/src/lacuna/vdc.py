"""Numerical probes of two set functions of a spectrum H of positive integers:

gamma(H) = inf a_0 over nonnegative T(x) = a_0 + sum_{h in H} a_h cos(2 pi h x)
           with T(0) = 1, bracketed by a grid LP and a shift-and-renormalise
           certificate;
delta(H) = sup of upper densities of sets A with (A - A) & H empty, bounded
           below by the largest H-avoiding subset of Z/NZ (bitmask DP).

Floating point is confined to the LP side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from .errors import GridTooCoarse, LPInfeasible, MaskTooWide, PeriodTooSmall
from .rational import format_rational

NORMALIZATION_TOL = 1e-9
COMPARE_TOL = 1e-6
MAX_SPECTRUM = 64
MAX_MASK = 24
VERIFY_FACTOR = 16


@dataclass
class TrigPolySolution:
    H: tuple
    a0: float
    coeffs: np.ndarray  # a_h in the order of H
    grid_size: int
    min_on_grid: float
    gamma_lower: float
    gamma_upper: float
    iterations: int = 0

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        out = np.full(x.shape, self.a0)
        for h, a in zip(self.H, self.coeffs):
            out = out + a * np.cos(2 * np.pi * h * x)
        return out

    def to_json(self) -> dict:
        return {
            "H": list(self.H),
            "a0": self.a0,
            "coefficients": {str(h): float(a) for h, a in zip(self.H, self.coeffs)},
            "grid_size": self.grid_size,
            "min_on_grid": self.min_on_grid,
            "gamma_lower": self.gamma_lower,
            "gamma_upper": self.gamma_upper,
            "iterations": self.iterations,
        }


def _min_certified(H, coeffs, a0, points: int) -> float:
    """Lower bound for min T on [0,1]: sampled minimum minus a Lipschitz margin."""
    x = np.arange(points) / points
    t = np.full(points, a0)
    for h, a in zip(H, coeffs):
        t += a * np.cos(2 * np.pi * h * x)
    lip = 2 * np.pi * float(sum(h * abs(a) for h, a in zip(H, coeffs)))
    # every point lies within 1/(2 points) of a sample
    return float(t.min()) - lip / (2 * points)


def gamma_lp(H: Iterable[int], grid_size: int) -> TrigPolySolution:
    """Minimise a_0 subject to T(g/grid) >= 0 for all g and T(0) = 1.

    The optimum is gamma_lower (a relaxation). For gamma_upper, T is checked on
    a grid VERIFY_FACTOR times finer with a Lipschitz margin; if that lower
    bound eta' of min T is negative, (T + eta)/(1 + eta) with eta = -eta' is
    nonnegative with the same spectrum and value (a_0 + eta)/(1 + eta).
    """
    H = tuple(sorted(set(int(h) for h in H)))
    if any(h < 1 for h in H):
        raise ValueError("spectrum must be positive integers")
    if len(H) > MAX_SPECTRUM:
        raise ValueError(f"|H| = {len(H)} exceeds {MAX_SPECTRUM}")
    if not H:
        return TrigPolySolution(H, 1.0, np.zeros(0), grid_size, 1.0, 1.0, 1.0)
    if grid_size < 8 * max(H):
        raise GridTooCoarse(f"grid {grid_size} < 8 * max(H) = {8 * max(H)}")
    x = np.arange(grid_size) / grid_size
    cosines = np.cos(2 * np.pi * np.outer(x, H))
    nvar = 1 + len(H)
    c = np.zeros(nvar)
    c[0] = 1.0
    a_ub = -np.hstack([np.ones((grid_size, 1)), cosines])
    b_ub = np.zeros(grid_size)
    a_eq = np.ones((1, nvar))
    b_eq = np.array([1.0])
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                  bounds=[(None, None)] * nvar, method="highs")
    if res.status != 0:
        raise LPInfeasible(res.message)
    a0, coeffs = float(res.x[0]), np.asarray(res.x[1:], dtype=np.float64)
    if abs(a0 + coeffs.sum() - 1) > NORMALIZATION_TOL:
        raise LPInfeasible("normalisation T(0) = 1 violated beyond tolerance")
    on_grid = float((a0 + cosines @ coeffs).min())
    floor = _min_certified(H, coeffs, a0, VERIFY_FACTOR * grid_size)
    eta = max(0.0, -floor)
    upper = (a0 + eta) / (1 + eta)
    lower = float(res.fun)
    return TrigPolySolution(H, a0, coeffs, grid_size, on_grid, lower, max(upper, lower),
                            int(getattr(res, "nit", 0) or 0))


def fejer_value(m: int) -> Fraction:
    """a_0 of the normalised Fejer kernel with spectrum {1..m}."""
    return Fraction(1, m + 1)


def fejer_coefficients(m: int):
    """(a_0, [a_1..a_m]) of the Fejer kernel scaled to T(0) = 1."""
    a0 = Fraction(1, m + 1)
    return a0, [Fraction(2 * (m + 1 - h), (m + 1) ** 2) for h in range(1, m + 1)]


@dataclass
class DensityResult:
    H: tuple
    N: int
    best_set: tuple
    density: Fraction

    def to_json(self) -> dict:
        return {"H": list(self.H), "N": self.N, "best_set": list(self.best_set),
                "density": format_rational(self.density)}


def avoids(residues: Iterable[int], H: Iterable[int], N: int) -> bool:
    """True when no two members of the residue set differ by +-h mod N."""
    member = set(int(r) % N for r in residues)
    return not any((r + h) % N in member for r in member for h in H)


def delta_dp(H: Iterable[int], N: int) -> DensityResult:
    """Largest A in Z/NZ with (a + h) mod N not in A for all a in A, h in H.

    Positions are scanned left to right with a w-bit window (w = max H) of the
    most recent choices; bit i of the window is position (current - i). The
    cyclic seam is closed by fixing the first w choices as the start state and
    forcing the last w transitions to replay them. All admissible starts run
    together as columns of one int16 matrix.

    Two exact reductions keep this cheap: if g = gcd(N, H) > 1 the circulant
    graph is g disjoint copies of the (N/g, H/g) instance; and rotating A puts
    0 in A, so only starts that choose position 0 are enumerated.
    """
    H = tuple(sorted(set(int(h) for h in H)))
    if not H:
        return DensityResult(H, N, tuple(range(N)), Fraction(1))
    w = max(H)
    if w > MAX_MASK:
        raise MaskTooWide(f"max(H) = {w} exceeds {MAX_MASK}")
    if N <= 2 * w:
        raise PeriodTooSmall(f"N = {N} must exceed 2 max(H) = {2 * w}")
    g = math.gcd(N, *H)
    if g > 1:
        sub = delta_dp([h // g for h in H], N // g)
        best = tuple(sorted(g * a + r for a in sub.best_set for r in range(g)))
        return DensityResult(H, N, best, sub.density)

    total, s0, best_set = _cyclic_dp(H, N, w)
    if len(best_set) != total or not avoids(best_set, H, N):
        raise AssertionError("DP reconstruction inconsistent")
    return DensityResult(H, N, tuple(best_set), Fraction(total, N))


def _window_tables(H, w):
    hmask = 0
    for h in H:
        hmask |= 1 << (h - 1)
    # a window is valid if no two chosen positions are at a distance in H
    cand = np.arange(1 << w, dtype=np.int64)
    ok = np.ones(cand.size, dtype=bool)
    for h in H:
        ok &= (cand & (cand >> h)) == 0
    valid = cand[ok]
    S = valid.size
    index = np.full(1 << w, S, dtype=np.int64)  # S is the sentinel row
    index[valid] = np.arange(S)
    bit = (valid & 1).astype(bool)
    preds = []
    for top in (0, 1):
        p = (valid >> 1) | (top << (w - 1))
        pi = index[p]
        allowed = ~bit | ((p & hmask) == 0)
        preds.append(np.where(allowed, pi, S))
    popcount = np.zeros(S, dtype=np.int16)
    for i in range(w):
        popcount += ((valid >> i) & 1).astype(np.int16)
    return valid, bit, preds, popcount


_NEG = np.int16(-30000)


def _advance(D, preds, gain):
    out = np.maximum(D[preds[0]], D[preds[1]])
    if gain is not None:
        out += gain
    np.maximum(out, _NEG, out=out)
    return out


def _cyclic_dp(H, N, w):
    valid, bit, preds, popcount = _window_tables(H, w)
    S = valid.size
    top = np.int64(1) << (w - 1)
    starts = np.flatnonzero(valid & top)  # position 0 is chosen
    gain = bit.astype(np.int16)[:, None]
    best_total, best_start = -1, None
    chunk = max(1, (1 << 22) // (S + 1))
    for c in range(0, starts.size, chunk):
        cols = starts[c : c + chunk]
        D = np.full((S + 1, cols.size), _NEG, dtype=np.int16)
        D[cols, np.arange(cols.size)] = popcount[cols]
        for _ in range(N - w):
            D = np.vstack([_advance(D, preds, gain), np.full((1, cols.size), _NEG, np.int16)])
        for k in range(w):
            want = ((valid[cols] >> (w - 1 - k)) & 1).astype(bool)
            D = _advance(D, preds, None)
            D[bit[:, None] != want[None, :]] = _NEG
            D = np.vstack([D, np.full((1, cols.size), _NEG, np.int16)])
        closing = D[cols, np.arange(cols.size)].astype(np.int64)
        i = int(np.argmax(closing))
        if closing[i] > best_total:
            best_total, best_start = int(closing[i]), int(cols[i])
    chosen = _reconstruct(best_start, valid, bit, preds, popcount, w, N)
    return best_total, best_start, chosen


def _reconstruct(start, valid, bit, preds, popcount, w, N):
    """Single-start rerun with back-pointers; returns the chosen residues."""
    S = valid.size
    D = np.full(S + 1, _NEG, dtype=np.int64)
    D[start] = popcount[start]
    s0 = int(valid[start])
    back = []
    for pos in range(w, N + w):
        c0, c1 = D[preds[0]], D[preds[1]]
        arg = np.where(c1 > c0, preds[1], preds[0])
        out = np.maximum(c0, c1)
        if pos < N:
            out = out + bit
        else:
            want = bool((s0 >> (w - 1 - (pos - N))) & 1)
            out = np.where(bit == want, out, _NEG)
        out = np.maximum(out, _NEG)
        back.append(arg)
        D = np.append(out, _NEG)
    state, chosen = start, []
    for pos in range(N + w - 1, w - 1, -1):
        if pos < N and bit[state]:
            chosen.append(pos)
        state = int(back[pos - w][state])
    if state != start:
        raise AssertionError("seam did not close")
    chosen.extend(w - 1 - i for i in range(w) if (s0 >> i) & 1)
    return sorted(chosen)


@dataclass
class CheckReport:
    name: str
    passed: bool
    values: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        out = {"check": self.name, "passed": self.passed}
        for k, v in self.values.items():
            out[k] = format_rational(v) if isinstance(v, Fraction) else v
        return out


def check_ruzsa(H: Iterable[int], N: int, grid: int) -> CheckReport:
    """delta lower bound from the DP must not exceed the certified gamma upper bound."""
    H = tuple(sorted(set(int(h) for h in H)))
    dens = delta_dp(H, N)
    sol = gamma_lp(H, grid)
    ok = float(dens.density) <= sol.gamma_upper + COMPARE_TOL
    return CheckReport("ruzsa", ok, {
        "H": list(H), "N": N, "grid": grid, "density": dens.density,
        "density_float": float(dens.density), "gamma_lower": sol.gamma_lower,
        "gamma_upper": sol.gamma_upper, "lp_iterations": sol.iterations,
    })


def corollary_check(seq, certificate, grid: Optional[int] = None) -> CheckReport:
    """Bohr-class density <= delta_S <= gamma_S on the certificate's truncation S.

    The densest color class A of the theta-coloring has (A - A) & S empty, so
    its density is a lower bound for delta_S, which Ruzsa's inequality caps by
    gamma_S.
    """
    from .coloring import Coloring, class_avoids, densest_color_class

    terms = tuple(int(t) for t in (seq.terms if hasattr(seq, "terms") else seq))[: certificate.n]
    if not terms:
        return CheckReport("corollary", False, {"error": "empty truncation"})
    theta, delta = Fraction(certificate.theta), Fraction(certificate.delta)
    k = -((-delta.denominator) // delta.numerator)
    if grid is None:
        grid = 8 * max(terms)
    sol = gamma_lp(terms, grid)
    j, d = densest_color_class(Coloring(0, np.zeros(0, np.int64), k, theta))
    ok = float(d) <= sol.gamma_upper + COMPARE_TOL
    values = {
        "truncation": len(terms), "grid": grid, "colors": k, "class": j, "density": d,
        "density_float": float(d), "gamma_lower": sol.gamma_lower, "gamma_upper": sol.gamma_upper,
        "implied_delta": Fraction(1, k),
    }
    if theta.denominator <= 2**20:
        values["class_avoids"] = class_avoids(theta, k, j, terms)
        ok = ok and values["class_avoids"]
    return CheckReport("corollary", ok, values)
