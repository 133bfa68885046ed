"""Lines of influence for 2-sided range maxima.

Queries here are open towards the top-left: ``q = (qx, qy)`` covers the
points with ``x <= qx`` and ``y >= qy``. The segment of point ``p`` is the set
of positions ``(x, y(p))``, ``x >= x(p)``, whose query answer is ``p``; it is
semi-open, ``[x_start, x_end)``, and empty for points that never answer a
query (redundant points). The answer to ``q`` is the owner of the lowest
segment at or above ``q`` that spans ``qx``.

The segments follow from a left-to-right sweep that needs one bit and, for
non-empty segments, one unary count per point, so the geometry can be rebuilt
from the point coordinates plus at most ``3n`` bits.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .binio import FormatError, Reader, Writer
from .bits import BitVector, UnaryStream, unary_bits
from .core import POS_INF, PointSet


@dataclass(frozen=True)
class InfluenceSegment:
    owner: int
    y: int
    x_start: int
    x_end: int
    empty: bool

    def spans(self, x: int) -> bool:
        return not self.empty and self.x_start <= x < self.x_end


@dataclass(frozen=True)
class InfluenceSet:
    """One segment per point, in x order (``segments[i].owner == i``)."""

    segments: tuple[InfluenceSegment, ...]
    r: int

    @property
    def n(self) -> int:
        return len(self.segments)

    def nonempty(self) -> list[InfluenceSegment]:
        return [s for s in self.segments if not s.empty]

    def live_at(self, x: int) -> list[InfluenceSegment]:
        """Segments spanning column ``x``, bottom to top."""
        return sorted((s for s in self.segments if s.spans(x)), key=lambda s: s.y)


@dataclass(frozen=True)
class EntropyCode:
    """Case bits (1 = non-empty segment) and the unary kill counts."""

    n: int
    r: int
    cases: BitVector
    kills: UnaryStream

    @property
    def bit_length(self) -> int:
        return self.cases.length + self.kills.bit_length

    def write(self, w: Writer) -> None:
        w.u64(self.n)
        w.u64(self.r)
        self.cases.write(w)
        self.kills.bits.write(w)

    @classmethod
    def read(cls, r: Reader) -> "EntropyCode":
        n = r.u64()
        red = r.u64()
        cases = BitVector.read(r)
        kills = UnaryStream(BitVector.read(r))
        if cases.length != n or cases.zeros != red:
            raise FormatError("case bits disagree with the stored counts")
        return cls(n, red, cases, kills)


def _sweep(ys: Sequence[int], pi: Sequence[int]) -> tuple[list[InfluenceSegment], list[int]]:
    """Segments and per-point kill counts (``-1`` for empty segments)."""
    n = len(ys)
    live_y: list[int] = []
    live_owner: list[int] = []
    x_end = [POS_INF] * n
    empty = [False] * n
    kills = [-1] * n
    for x in range(n):
        y, p = ys[x], pi[x]
        pos = bisect.bisect_left(live_y, y)
        if pos < len(live_y) and pi[live_owner[pos]] > p:
            empty[x] = True
            continue
        lo = pos
        while lo > 0 and pi[live_owner[lo - 1]] < p:
            lo -= 1
        for o in live_owner[lo:pos]:
            x_end[o] = x
        kills[x] = pos - lo
        live_y[lo:pos] = [y]
        live_owner[lo:pos] = [x]
    segs = [InfluenceSegment(x, ys[x], x, x if empty[x] else x_end[x], empty[x]) for x in range(n)]
    return segs, kills


def build_influence(ps: PointSet) -> InfluenceSet:
    segs, _ = _sweep(ps.upsilon, ps.pi)
    return InfluenceSet(tuple(segs), sum(s.empty for s in segs))


def ray_shoot(inf: InfluenceSet, q: tuple[int, int]) -> Optional[int]:
    """Owner of the lowest segment at or above ``q`` spanning ``q``'s column."""
    qx, qy = q
    best = None
    for s in inf.segments:
        if s.y >= qy and s.spans(qx) and (best is None or s.y < best.y):
            best = s
    return None if best is None else best.owner


def count_redundant(inf: InfluenceSet) -> int:
    return inf.r


def encode_priorities(ps: PointSet) -> EntropyCode:
    segs, kills = _sweep(ps.upsilon, ps.pi)
    cases = BitVector([k >= 0 for k in kills])
    stream = UnaryStream(BitVector(unary_bits(k for k in kills if k >= 0)))
    return EntropyCode(ps.n, cases.zeros, cases, stream)


def decode_influence(points_by_x: Sequence[tuple[int, int]], code: EntropyCode) -> InfluenceSet:
    """Rebuild the segments from coordinates alone plus ``code``."""
    n = len(points_by_x)
    if code.n != n or code.cases.length != n:
        raise FormatError(f"code describes {code.cases.length} points, got {n}")
    if len(code.kills) != code.cases.ones:
        raise FormatError(f"{code.cases.ones} non-empty points but {len(code.kills)} kill counts")
    if any(x != i for i, (x, _) in enumerate(points_by_x)):
        raise ValueError("points must be given in x order with x = 0..n-1")
    bits = code.kills.bits
    live_y: list[int] = []
    live_owner: list[int] = []
    x_end = [POS_INF] * n
    segs = []
    pos_bit = 0
    for x, (_, y) in enumerate(points_by_x):
        if not code.cases[x]:
            continue
        end = bits.select1(bits.rank1(pos_bit) + 1)
        k = end - pos_bit
        pos_bit = end + 1
        pos = bisect.bisect_left(live_y, y)
        if k > pos:
            raise FormatError(f"point {x} kills {k} segments but only {pos} lie below it")
        for o in live_owner[pos - k:pos]:
            x_end[o] = x
        live_y[pos - k:pos] = [y]
        live_owner[pos - k:pos] = [x]
    for x, (_, y) in enumerate(points_by_x):
        e = not code.cases[x]
        segs.append(InfluenceSegment(x, y, x, x if e else x_end[x], e))
    return InfluenceSet(tuple(segs), code.cases.zeros)


def analytic_code_bits(n: int, r: int) -> int:
    """Length with enumeratively coded case bits: ``2(n-r) + ceil(log2 C(n, r))``."""
    c = math.comb(n, r)
    return 2 * (n - r) + (c - 1).bit_length()


def build_rmq_gadget(a: Sequence[int], redundant_mask: Sequence[bool]) -> PointSet:
    """Embed 1D range maxima with redundant entries into a 2-sided instance.

    Entry ``t`` becomes the point ``(t + 1, t)`` and a dominating point ``z``
    sits at ``(0, n)``. The 1D query ``[i, j]`` is the 2-sided query at
    ``(j + 1, i)``, which also covers ``z``. Redundant entries get the lowest
    priorities, ``z`` the next one, and the rest follow in value order, so a
    query returns ``z`` exactly when every covered entry is redundant.
    """
    n = len(a)
    if len(redundant_mask) != n:
        raise ValueError(f"{n} values but {len(redundant_mask)} mask entries")
    red = [t for t in range(n) if redundant_mask[t]]
    keep = sorted((t for t in range(n) if not redundant_mask[t]), key=lambda t: (a[t], t))
    pri_of = {}
    for rank, t in enumerate(red):
        pri_of[t] = rank
    z_pri = len(red)
    for rank, t in enumerate(keep):
        pri_of[t] = z_pri + 1 + rank
    ups = [n] + list(range(n))
    pri = [z_pri] + [pri_of[t] for t in range(n)]
    return PointSet(ups, pri)


def gadget_query(i: int, j: int) -> tuple[int, int]:
    """2-sided query point simulating the 1D query ``[i, j]`` on the gadget."""
    return j + 1, i
