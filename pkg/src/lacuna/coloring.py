"""Colorings of integer distance graphs on finite windows.

A window [a, b] of the graph on Z with edges {x, y} whenever |x - y| lies in
the distance set S. Colorings come from a rotation number theta (n gets the
index of the cell of [0, 1) containing frac(n theta)) or from the K-fold
quarter coloring built on the nested-interval thetas.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Tuple

import numpy as np

from .errors import LacunaError, TooLarge, WindowTooLarge
from .sequences import LacunarySequence, split_subsequences
from .survivor import warmup_nested

DEFAULT_CHROMATIC_CAP = 64


@dataclass(frozen=True)
class DistanceGraphWindow:
    forbidden: frozenset
    a: int
    b: int

    def __post_init__(self):
        if any(s < 1 for s in self.forbidden):
            raise ValueError("distances must be positive integers")
        if self.b < self.a:
            raise ValueError("empty window")

    @classmethod
    def of(cls, forbidden: Iterable[int], window: Tuple[int, int]) -> "DistanceGraphWindow":
        return cls(frozenset(int(s) for s in forbidden), int(window[0]), int(window[1]))

    @property
    def size(self) -> int:
        return self.b - self.a + 1


@dataclass(frozen=True, eq=False)
class Coloring:
    start: int
    colors: np.ndarray
    k: int
    theta: Optional[Fraction] = None
    thetas: tuple = ()

    def __getitem__(self, n: int) -> int:
        return int(self.colors[n - self.start])

    @property
    def window(self) -> Tuple[int, int]:
        return self.start, self.start + len(self.colors) - 1

    def used(self) -> int:
        return int(np.unique(self.colors).size)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "color"])
        for i, c in enumerate(self.colors.tolist()):
            w.writerow([self.start + i, c])
        return buf.getvalue()


def _ceil_inv(delta: Fraction) -> int:
    return -((-delta.denominator) // delta.numerator)


def _residues(theta: Fraction, a: int, b: int) -> np.ndarray:
    """(n p) mod q for n in [a, b], theta = p/q."""
    p, q = theta.numerator, theta.denominator
    if q < 2**31 and max(abs(a), abs(b)) * q < 2**62:
        n = np.arange(a, b + 1, dtype=np.int64)
        return (n * (p % q)) % q
    return np.array([(n * p) % q for n in range(a, b + 1)], dtype=object)


def bohr_colors(theta, k: int, a: int, b: int) -> np.ndarray:
    """floor(k * frac(n theta)) for n in [a, b]."""
    theta = Fraction(theta)
    q = theta.denominator
    r = _residues(theta, a, b)
    if r.dtype != object and k * q < 2**62:
        return (k * r) // q
    return np.array([(k * int(v)) // q for v in r], dtype=np.int64)


def color_from_theta(theta, delta, window: Tuple[int, int]) -> Coloring:
    """k = ceil(1/delta) equal cells of length 1/k <= delta."""
    theta, delta = Fraction(theta), Fraction(delta)
    if not 0 < delta <= Fraction(1, 2):
        raise ValueError("need 0 < delta <= 1/2")
    k = _ceil_inv(delta)
    a, b = window
    return Coloring(a, bohr_colors(theta, k, a, b).astype(np.int64), k, theta)


def verify_proper(coloring: Coloring, graph: DistanceGraphWindow) -> Optional[Tuple[int, int]]:
    """None if proper on the window, else the violating pair (x, x+s) with least x, then least s."""
    a, b = graph.a, graph.b
    ca, cb = coloring.window
    if ca > a or cb < b:
        raise ValueError("coloring does not cover the graph window")
    c = coloring.colors[a - ca : b - ca + 1]
    first = None
    for s in sorted(graph.forbidden):
        if s >= c.size:
            continue
        hits = np.flatnonzero(c[:-s] == c[s:])
        if hits.size:
            x = a + int(hits[0])
            if first is None or x < first[0]:
                first = (x, x + s)
    return first


def _adjacency(graph: DistanceGraphWindow):
    n = graph.size
    adj = [0] * n
    for s in graph.forbidden:
        for i in range(n - s):
            adj[i] |= 1 << (i + s)
            adj[i + s] |= 1 << i
    return adj


def greedy_clique(adj) -> list:
    """Largest clique found by greedy extension from every start vertex."""
    best = []
    n = len(adj)
    for v in range(n):
        clique, cand = [v], adj[v]
        while cand:
            # extend by the candidate with most neighbours among candidates, lowest index on ties
            u = max((w for w in range(n) if cand >> w & 1), key=lambda w: (bin(adj[w] & cand).count("1"), -w))
            clique.append(u)
            cand &= adj[u]
        if len(clique) > len(best):
            best = sorted(clique)
    return best


def _dsatur_greedy(adj) -> list:
    n = len(adj)
    color = [-1] * n
    for _ in range(n):
        v = _pick(adj, color)
        taken = {color[u] for u in range(n) if adj[v] >> u & 1 and color[u] >= 0}
        c = 0
        while c in taken:
            c += 1
        color[v] = c
    return color


def _pick(adj, color):
    """Uncolored vertex of max saturation, then max degree, then lowest index."""
    best, key = -1, None
    for v in range(len(adj)):
        if color[v] >= 0:
            continue
        sat = len({color[u] for u in range(len(adj)) if adj[v] >> u & 1 and color[u] >= 0})
        k = (sat, bin(adj[v]).count("1"), -v)
        if key is None or k > key:
            best, key = v, k
    return best


def chromatic_exact(graph: DistanceGraphWindow, cap: int = DEFAULT_CHROMATIC_CAP) -> int:
    """Exact chromatic number of the window by DSATUR branch and bound."""
    if graph.size > cap:
        raise WindowTooLarge(f"window has {graph.size} vertices, cap {cap}")
    adj = _adjacency(graph)
    n = len(adj)
    lower = len(greedy_clique(adj))
    greedy = _dsatur_greedy(adj)
    best = max(greedy) + 1
    if best == lower:
        return best
    color = [-1] * n

    def search(colored: int, used: int) -> bool:
        nonlocal best
        if used >= best:
            return False
        if colored == n:
            best = used
            return best == lower
        v = _pick(adj, color)
        taken = {color[u] for u in range(n) if adj[v] >> u & 1 and color[u] >= 0}
        for c in range(min(used + 1, best - 1)):
            if c in taken:
                continue
            color[v] = c
            if search(colored + 1, max(used, c + 1)):
                return True
            color[v] = -1
        return False

    search(0, 0)
    return best


def warmup_coloring(seq: LacunarySequence, window: Tuple[int, int]) -> Coloring:
    """Color n by the K-tuple of quarter indices floor(4 frac(n theta_r))."""
    subs = split_subsequences(seq)
    if len(subs) > 31:
        raise TooLarge(f"4^{len(subs)} color codes do not fit in int64")
    a, b = window
    codes = np.zeros(b - a + 1, dtype=np.int64)
    thetas = []
    for r, sub in enumerate(subs):
        cert, _ = warmup_nested(sub)
        thetas.append(cert.theta)
        codes += bohr_colors(cert.theta, 4, a, b).astype(np.int64) * (4**r)
    return Coloring(a, codes, 4 ** len(subs), thetas=tuple(thetas))


def class_density(theta, k: int, j: int) -> Fraction:
    """Density of {n : floor(k frac(n theta)) = j}; theta = p/q in lowest terms."""
    q = Fraction(theta).denominator
    # n p mod q runs over all residues t; count t in [0, q) with floor(k t / q) == j
    lo = -((-j * q) // k)
    hi = -((-(j + 1) * q) // k)
    return Fraction(hi - lo, q)


def densest_color_class(coloring: Coloring) -> Tuple[int, Fraction]:
    """(color id, exact density) of the largest class of a theta-coloring."""
    if coloring.theta is None:
        raise LacunaError("densest_color_class needs a coloring built from a rational theta")
    k, q = coloring.k, Fraction(coloring.theta).denominator
    # class sizes are floor(q/k) or ceil(q/k); return the first class of maximal size
    target = Fraction(-(-q // k), q)
    for j in range(k):
        d = class_density(coloring.theta, k, j)
        if d == target:
            return j, d
    raise AssertionError("no class attains ceil(q/k)")


def class_residues(theta, k: int, j: int) -> np.ndarray:
    """Residues n mod q lying in color class j."""
    theta = Fraction(theta)
    q = theta.denominator
    t = np.arange(q, dtype=np.int64)
    colors = (k * ((t * theta.numerator) % q)) // q
    return np.flatnonzero(colors == j)


def class_avoids(theta, k: int, j: int, forbidden: Iterable[int]) -> bool:
    """(A - A) & S is empty for the periodic class A, checked residue by residue."""
    q = Fraction(theta).denominator
    res = class_residues(theta, k, j)
    member = np.zeros(q, dtype=bool)
    member[res] = True
    for s in forbidden:
        if member[(res + s) % q].any():
            return False
    return True
