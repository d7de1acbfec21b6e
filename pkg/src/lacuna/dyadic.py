"""Finite unions of half-open dyadic intervals of [0, 1) with exact measure.

A DyadicSet is stored as sorted, pairwise non-touching runs [s, e) of integer
endpoints at scale 2**level, with level as small as possible. That form is
unique for a given point set. The maximal-dyadic-block view required for
export is derived on demand (``intervals``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Tuple

import numpy as np

from .errors import DeltaTooLarge, EmptySet
from .rational import floor_log2, format_rational

MAX_LEVEL = 62
_I64 = np.int64


def _trailing_zeros(v: int) -> int:
    return (v & -v).bit_length() - 1 if v else MAX_LEVEL


def _merge_segments(starts: np.ndarray, ends: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Union of possibly overlapping/touching segments as sorted disjoint runs."""
    keep = ends > starts
    starts, ends = starts[keep], ends[keep]
    if starts.size == 0:
        return starts, ends
    order = np.argsort(starts, kind="stable")
    starts, ends = starts[order], ends[order]
    reach = np.maximum.accumulate(ends)
    new_run = np.empty(starts.size, dtype=bool)
    new_run[0] = True
    new_run[1:] = starts[1:] > reach[:-1]
    idx = np.flatnonzero(new_run)
    run_starts = starts[idx]
    last = np.append(idx[1:], starts.size) - 1
    run_ends = reach[last]
    return run_starts, run_ends


@dataclass(frozen=True, eq=False)
class DyadicSet:
    level: int
    starts: np.ndarray
    ends: np.ndarray

    # construction ---------------------------------------------------------

    @classmethod
    def _make(cls, level: int, starts, ends, merged: bool = False) -> "DyadicSet":
        starts = np.asarray(starts, dtype=_I64)
        ends = np.asarray(ends, dtype=_I64)
        if not merged:
            starts, ends = _merge_segments(starts, ends)
        if starts.size == 0:
            return cls(0, np.zeros(0, _I64), np.zeros(0, _I64))
        bits = int(np.bitwise_or.reduce(np.concatenate([starts, ends])))
        shift = min(_trailing_zeros(bits), level)
        if shift:
            starts = starts >> shift
            ends = ends >> shift
        return cls(level - shift, starts, ends)

    @classmethod
    def empty(cls) -> "DyadicSet":
        return cls._make(0, [], [])

    @classmethod
    def full(cls) -> "DyadicSet":
        return cls._make(0, [0], [1])

    @classmethod
    def from_intervals(cls, intervals: Iterable[Tuple[int, int]]) -> "DyadicSet":
        """Build from (k, level) pairs denoting [k 2^-level, (k+1) 2^-level)."""
        intervals = list(intervals)
        if not intervals:
            return cls.empty()
        top = max(l for _, l in intervals)
        if top > MAX_LEVEL:
            raise ValueError(f"level {top} exceeds {MAX_LEVEL}")
        starts, ends = [], []
        for k, l in intervals:
            if not 0 <= k < (1 << l):
                raise ValueError(f"interval ({k}, {l}) outside [0, 1)")
            s = k << (top - l)
            starts.append(s)
            ends.append(s + (1 << (top - l)))
        return cls._make(top, starts, ends)

    @classmethod
    def from_mask(cls, mask, level: int) -> "DyadicSet":
        """Cells i with mask[i] true at the given level (test helper)."""
        mask = np.asarray(mask, dtype=bool)
        if mask.size != 1 << level:
            raise ValueError("mask size must be 2**level")
        padded = np.concatenate([[False], mask, [False]]).astype(np.int8)
        d = np.diff(padded)
        return cls._make(level, np.flatnonzero(d == 1), np.flatnonzero(d == -1), merged=True)

    # views ----------------------------------------------------------------

    def __len__(self):
        return int(self.starts.size)

    def __bool__(self):
        return self.starts.size > 0

    def __eq__(self, other):
        if not isinstance(other, DyadicSet):
            return NotImplemented
        return (
            self.level == other.level
            and np.array_equal(self.starts, other.starts)
            and np.array_equal(self.ends, other.ends)
        )

    def __hash__(self):
        return hash((self.level, self.starts.tobytes(), self.ends.tobytes()))

    def __repr__(self):
        return f"DyadicSet(level={self.level}, runs={len(self)}, measure={self.measure()})"

    def runs(self) -> List[Tuple[Fraction, Fraction]]:
        scale = 1 << self.level
        return [(Fraction(int(s), scale), Fraction(int(e), scale)) for s, e in zip(self.starts, self.ends)]

    @property
    def intervals(self) -> List[Tuple[int, int]]:
        """Canonical maximal dyadic blocks as (k, level) pairs, left to right."""
        out = []
        for s, e in zip(self.starts.tolist(), self.ends.tolist()):
            while s < e:
                size = s & -s if s else 1 << self.level
                while size > e - s:
                    size >>= 1
                l = self.level - (size.bit_length() - 1)
                out.append((s // size, l))
                s += size
        return out

    def to_mask(self, level: int) -> np.ndarray:
        if level < self.level:
            raise ValueError("mask level finer than set level required")
        shift = level - self.level
        mask = np.zeros(1 << level, dtype=bool)
        for s, e in zip(self.starts.tolist(), self.ends.tolist()):
            mask[s << shift : e << shift] = True
        return mask

    # algebra ----------------------------------------------------------------

    def _at(self, level: int) -> Tuple[np.ndarray, np.ndarray]:
        shift = level - self.level
        return self.starts << shift, self.ends << shift

    def _combine(self, other: "DyadicSet", keep) -> "DyadicSet":
        level = max(self.level, other.level)
        if level > MAX_LEVEL:
            raise ValueError(f"level {level} exceeds {MAX_LEVEL}")
        xs, xe = self._at(level)
        ys, ye = other._at(level)
        pos = np.concatenate([xs, xe, ys, ye])
        delta = np.concatenate([
            np.ones(xs.size, np.int8), -np.ones(xe.size, np.int8),
            np.full(ys.size, 2, np.int8), np.full(ye.size, -2, np.int8),
        ])
        if pos.size == 0:
            return DyadicSet.empty()
        order = np.argsort(pos, kind="stable")
        pos, delta = pos[order], delta[order]
        uniq, first = np.unique(pos, return_index=True)
        state = np.cumsum(np.add.reduceat(delta.astype(np.int32), first))
        on = keep(state)
        change = np.diff(np.concatenate([[False], on]).astype(np.int8))
        run_starts = uniq[change == 1]
        run_ends = uniq[np.flatnonzero(change == -1)]
        return DyadicSet._make(level, run_starts, run_ends, merged=True)

    def union(self, other: "DyadicSet") -> "DyadicSet":
        return self._combine(other, lambda s: s > 0)

    def intersect(self, other: "DyadicSet") -> "DyadicSet":
        return self._combine(other, lambda s: s == 3)

    def subtract(self, other: "DyadicSet") -> "DyadicSet":
        return self._combine(other, lambda s: s == 1)

    def complement(self) -> "DyadicSet":
        return DyadicSet.full().subtract(self)

    __or__ = union
    __and__ = intersect
    __sub__ = subtract

    def measure(self) -> Fraction:
        return Fraction(int((self.ends - self.starts).sum()), 1 << self.level)

    def contains(self, theta) -> bool:
        theta = Fraction(theta)
        if not 0 <= theta < 1:
            return False
        f = (theta.numerator << self.level) // theta.denominator
        i = int(np.searchsorted(self.starts, f, side="right")) - 1
        return i >= 0 and f < int(self.ends[i])

    __contains__ = contains

    def isdisjoint(self, other: "DyadicSet") -> bool:
        return not self.intersect(other)

    def widest_block(self) -> Tuple[int, int]:
        """(k, level) of the widest maximal block, leftmost among ties."""
        if not self:
            raise EmptySet("empty dyadic set has no blocks")
        s, e = self.starts, self.ends
        length = e - s
        # floor(log2(length)) with float seed and integer correction
        t = np.floor(np.log2(length.astype(np.float64))).astype(_I64)
        t = np.where((np.int64(1) << t) > length, t - 1, t)
        t = np.where((np.int64(1) << (t + 1)) <= length, t + 1, t)
        size = np.int64(1) << t
        aligned = -((-s) // size) * size
        t = np.where(aligned + size <= e, t, t - 1)
        size = np.int64(1) << t
        aligned = -((-s) // size) * size
        best = int(t.max())
        i = int(np.flatnonzero(t == best)[0])
        block_size = 1 << best
        k = int(aligned[i]) // block_size
        return k, self.level - best

    def pick_point(self) -> Fraction:
        """Midpoint of the widest block (leftmost on ties)."""
        k, l = self.widest_block()
        return Fraction(2 * k + 1, 1 << (l + 1))

    # export -----------------------------------------------------------------

    def to_json(self) -> dict:
        return {"intervals": [[k, l] for k, l in self.intervals], "measure": format_rational(self.measure())}

    @classmethod
    def from_json(cls, data) -> "DyadicSet":
        if isinstance(data, str):
            data = json.loads(data)
        return cls.from_intervals((int(k), int(l)) for k, l in data["intervals"])

    def dump(self) -> str:
        return "\n".join(f"{k}/2^{l} .. {k + 1}/2^{l}" for k, l in self.intervals)


def measure(x: DyadicSet) -> Fraction:
    return x.measure()


def subtract(x: DyadicSet, y: DyadicSet) -> DyadicSet:
    return x.subtract(y)


def intersect(x: DyadicSet, y: DyadicSet) -> DyadicSet:
    return x.intersect(y)


def union(x: DyadicSet, y: DyadicSet) -> DyadicSet:
    return x.union(y)


def pick_point(x: DyadicSet) -> Fraction:
    return x.pick_point()


def level_for(n: int, delta) -> int:
    """The unique l with 2^-(l+1) < 2*delta/n <= 2^-l."""
    delta = Fraction(delta)
    if n < 1 or delta <= 0:
        raise ValueError("need n >= 1 and delta > 0")
    v = Fraction(n) / (2 * delta)
    if v < 1:
        raise DeltaTooLarge(f"2*delta/n = {1 / v} exceeds 1")
    return floor_log2(v)


def cover_forbidden(n: int, delta) -> DyadicSet:
    """Level-l dyadic cells meeting E = {theta : ||n theta|| < delta}.

    E is n open arcs of radius delta/n centred at k/n. A half-open cell
    [m, m+1) (in units of 2^-l) meets the arc iff m < c + r and c - r < m + 1.
    The arc is no longer than one cell, so it meets at most two.
    """
    delta = Fraction(delta)
    l = level_for(n, delta)
    if l > MAX_LEVEL:
        raise ValueError(f"level {l} exceeds {MAX_LEVEL}")
    p, q = delta.numerator, delta.denominator
    scale = 1 << l
    rad = scale * p  # radius in cells is rad / (n q)
    fits = rad + n * q < 2**62 and n * n < 2**62
    dtype = _I64 if fits else object
    k = np.arange(n, dtype=_I64).astype(dtype)
    rem = k * (scale % n) % n
    quo = k * (scale // n) + (k * (scale % n)) // n
    lo = quo - (rem * q < rad).astype(dtype)
    hi = quo + 1 + (rem * q + rad > n * q).astype(dtype)
    starts = [lo]
    ends = [hi]
    wrap_lo = lo < 0
    if wrap_lo.any():
        starts.append(lo[wrap_lo] + scale)
        ends.append(np.full(int(wrap_lo.sum()), scale, dtype=dtype))
        lo = np.where(wrap_lo, 0, lo)
        starts[0] = lo
    wrap_hi = hi > scale
    if wrap_hi.any():
        starts.append(np.zeros(int(wrap_hi.sum()), dtype=dtype))
        ends.append(hi[wrap_hi] - scale)
        ends[0] = np.where(wrap_hi, scale, hi)
    s = np.concatenate([np.asarray(a, dtype=_I64) for a in starts])
    e = np.concatenate([np.asarray(a, dtype=_I64) for a in ends])
    return DyadicSet._make(l, s, e)
