"""2-sided range maxima for a sub-problem whose points are not stored.

The structure answers queries open towards the top-left (``x <= qx`` and
``y >= qy``) in the local rank space of a sub-problem of ``n`` points. Point
coordinates are fetched on demand from a :class:`PointProvider`, a small
number of points at a time; the index itself keeps only:

* a skeleton: a subset of the influence segments (the selected lines) that
  cuts the grid into rectangular regions, plus a point-location table;
* per-region bit strings:

  1. endpoint bits: which unselected segments entering a region leave it on
     the right (1a), which segments leaving on the right started inside it
     (1b), and which segments started inside it leave on the right (1c);
  2. unary adjacency strings telling which neighbour each crossing segment
     goes to, for the left and the right wall;
  3. a merge string placing the segments entering from the left among the
     region's points by y;
  4. waypoints: every ``lam``-th region a segment crosses records which
     region holds its owner and the owner's local coordinates;
  5. case bits and unary kill counts of the region's points.

Grid conventions: a region covers columns ``[x0, x1]`` and rows
``[y0, y1]``. The row of a selected line belongs to the region below it, so
the owner of a selected line is the top-left corner point of the region in
which the line starts.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .binio import FormatError, Reader, Writer, pack_ints, unpack_ints, width_for
from .bits import BitVector
from .core import MIRROR_X, MIRROR_Y, Candidate, PointSet, QueryRect
from .global_index import Globals
from .influence import InfluenceSet, build_influence
from .slabs import NodeHeader, SlabCapError, slab_select

C_T = 4
C_R = 4
CHECK_BUDGETS = True

Point = tuple[int, int]


class ProviderCapError(ValueError):
    """A provider was asked for more points than its batch cap."""


class PointProvider:
    """Reports the points of a rectangle given in the problem's coordinates.

    Points come back in the provider's coordinate system (usually top-level),
    sorted by x. That system must order points exactly like the local one.
    """

    cap: Optional[int] = None

    def __init__(self):
        self.calls = 0
        self.max_batch = 0

    def _fetch(self, x_lo: int, x_hi: int, y_lo: int, y_hi: int) -> list[Point]:
        raise NotImplementedError

    def report(self, x_lo: int, x_hi: int, y_lo: int, y_hi: int) -> list[Point]:
        self.calls += 1
        pts = self._fetch(x_lo, x_hi, y_lo, y_hi)
        if self.cap is not None and len(pts) > self.cap:
            raise ProviderCapError(f"{len(pts)} points reported, cap is {self.cap}")
        if len(pts) > self.max_batch:
            self.max_batch = len(pts)
        return pts

    def to_top(self, p: Point) -> Point:
        return p

    def priority(self, p: Point) -> int:
        raise NotImplementedError


class ListProvider(PointProvider):
    """Scans an explicit point set; local and provider coordinates coincide."""

    def __init__(self, ps: PointSet, cap: Optional[int] = None):
        super().__init__()
        self.ps = ps
        self.cap = cap

    def _fetch(self, x_lo, x_hi, y_lo, y_hi):
        ups = self.ps.upsilon
        return [(x, ups[x]) for x in range(max(x_lo, 0), min(x_hi, self.ps.n - 1) + 1)
                if y_lo <= ups[x] <= y_hi]

    def priority(self, p):
        return self.ps.pi[p[0]]


class GlobalsProvider(PointProvider):
    """Range reporting on the global structures; local is top-level."""

    def __init__(self, g: Globals, cap: Optional[int] = None):
        super().__init__()
        self.g = g
        self.cap = cap

    def _fetch(self, x_lo, x_hi, y_lo, y_hi):
        if self.cap is not None and self.g.count(x_lo, x_hi, y_lo, y_hi) > self.cap:
            raise ProviderCapError(f"rectangle holds more than {self.cap} points")
        return self.g.report(x_lo, x_hi, y_lo, y_hi)

    def priority(self, p):
        return self.g.pi[p[0]]


class SlabProvider(PointProvider):
    """Slab-select inside a sub-problem described by its header."""

    def __init__(self, g: Globals, header: NodeHeader, cap: Optional[int] = None):
        super().__init__()
        self.g = g
        self.header = header
        self.cap = cap

    def _fetch(self, x_lo, x_hi, y_lo, y_hi):
        try:
            return slab_select(self.g, self.header, QueryRect(x_lo, x_hi, y_lo, y_hi), self.cap)
        except SlabCapError as e:
            raise ProviderCapError(str(e)) from None

    def priority(self, p):
        return self.g.pi[p[0]]


class OrientedProvider(PointProvider):
    """Presents a provider's problem mirrored by ``orientation``.

    Reported coordinates are negated on mirrored axes, so their order agrees
    with the mirrored local order; :meth:`to_top` undoes this.
    """

    def __init__(self, base: PointProvider, n: int, orientation: int):
        super().__init__()
        self.base = base
        self.n = n
        self.orientation = orientation
        self.cap = base.cap

    def _fetch(self, x_lo, x_hi, y_lo, y_hi):
        n, o = self.n, self.orientation
        if o & MIRROR_X:
            x_lo, x_hi = n - 1 - x_hi, n - 1 - x_lo
        if o & MIRROR_Y:
            y_lo, y_hi = n - 1 - y_hi, n - 1 - y_lo
        pts = self.base.report(x_lo, x_hi, y_lo, y_hi)
        if o & MIRROR_X:
            pts = [(-x, y) for x, y in reversed(pts)]
        if o & MIRROR_Y:
            pts = [(x, -y) for x, y in pts]
        return pts

    def to_top(self, p):
        x, y = p
        if self.orientation & MIRROR_X:
            x = -x
        if self.orientation & MIRROR_Y:
            y = -y
        return self.base.to_top((x, y))

    def from_top(self, p: Point) -> Point:
        x, y = p
        if self.orientation & MIRROR_X:
            x = -x
        if self.orientation & MIRROR_Y:
            y = -y
        return x, y

    def priority(self, p):
        return self.base.priority(self.to_top(p))


# --------------------------------------------------------------------------
# Skeleton


def _select_lines(ys: Sequence[int], inf: InfluenceSet, lam: int) -> list[bool]:
    """Greedy sweep: keep at most ``2 lam`` unselected live segments per band."""
    n = len(ys)
    limit = 2 * lam
    segs = inf.segments
    ends: list[list[int]] = [[] for _ in range(n + 1)]
    for s in segs:
        if not s.empty and s.x_end < n:
            ends[s.x_end].append(s.owner)
    sel = [False] * n
    live_y: list[int] = []
    live_id: list[int] = []

    def fix(lo: int, hi: int) -> None:
        # (lo, hi) exclusive bounds of a band in the live list
        stack = [(lo, hi)]
        while stack:
            lo, hi = stack.pop()
            if hi - lo - 1 > limit:
                m = (lo + hi) // 2
                sel[live_id[m]] = True
                stack.append((lo, m))
                stack.append((m, hi))

    for x in range(n):
        for s in ends[x]:
            i = bisect.bisect_left(live_y, ys[s])
            del live_y[i]
            del live_id[i]
        if segs[x].empty:
            continue
        y = ys[x]
        i = bisect.bisect_left(live_y, y)
        live_y.insert(i, y)
        live_id.insert(i, x)
        lo = i - 1
        while lo >= 0 and not sel[live_id[lo]]:
            lo -= 1
        hi = i + 1
        while hi < len(live_id) and not sel[live_id[hi]]:
            hi += 1
        if sel[x]:
            fix(lo, i)
            fix(i, hi)
        else:
            fix(lo, hi)
    return sel


@dataclass
class Skeleton:
    """Selected lines, the regions they induce, and point location."""

    n: int
    lam: int
    # selected lines: owner (x, y) and exclusive right end, in owner-x order
    line_x: list[int]
    line_y: list[int]
    line_end: list[int]
    # region table
    x0: list[int]
    x1: list[int]
    y0: list[int]
    y1: list[int]
    top: list[int]
    bot: list[int]
    # neighbours across the left / right wall, top to bottom (CSR)
    left_off: list[int]
    left_ids: list[int]
    right_off: list[int]
    right_ids: list[int]
    # x-slab point location: slab breakpoints and regions per slab by y0
    breaks: list[int]
    slab_off: list[int]
    slab_ids: list[int]

    @property
    def n_regions(self) -> int:
        return len(self.x0)

    @property
    def n_lines(self) -> int:
        return len(self.line_x)

    def left_neighbors(self, r: int) -> list[int]:
        return self.left_ids[self.left_off[r]:self.left_off[r + 1]]

    def right_neighbors(self, r: int) -> list[int]:
        return self.right_ids[self.right_off[r]:self.right_off[r + 1]]

    def slab_regions(self, x: int) -> list[int]:
        s = bisect.bisect_right(self.breaks, x) - 1
        return self.slab_ids[self.slab_off[s]:self.slab_off[s + 1]]

    def contains(self, r: int, x: int, y: int) -> bool:
        return self.x0[r] <= x <= self.x1[r] and self.y0[r] <= y <= self.y1[r]

    _ARRAYS = ("line_x", "line_y", "line_end", "x0", "x1", "y0", "y1", "top", "bot",
               "left_off", "left_ids", "right_off", "right_ids", "breaks", "slab_off", "slab_ids")

    def write(self, w: Writer) -> None:
        w.u64(self.n)
        w.u32(self.lam)
        for name in self._ARRAYS:
            w.ints(getattr(self, name), signed=name in ("top", "bot"))

    @classmethod
    def read(cls, r: Reader) -> "Skeleton":
        n = r.u64()
        lam = r.u32()
        arrays = {name: r.ints(signed=name in ("top", "bot")) for name in cls._ARRAYS}
        sk = cls(n, lam, **arrays)
        if sk.n and (not sk.breaks or sk.breaks[0] != 0 or len(sk.slab_off) != len(sk.breaks) + 1):
            raise FormatError("malformed skeleton point-location table")
        return sk


def locate_region(sk: Skeleton, q: Point) -> int:
    """Region containing grid cell ``q``."""
    x, y = q
    s = bisect.bisect_right(sk.breaks, x) - 1
    lo, hi = sk.slab_off[s], sk.slab_off[s + 1]
    i = bisect.bisect_right(sk.slab_ids, y, lo, hi, key=sk.y0.__getitem__) - 1
    return sk.slab_ids[i]


def select_skeleton(ys: Sequence[int], inf: InfluenceSet, lam: int) -> tuple[Skeleton, list[int], list[bool]]:
    """Choose the selected lines and cut the grid into regions.

    Returns the skeleton, the region of every point, and the selection flags
    (indexed by owner).
    """
    if lam < 1:
        raise ValueError(f"lam must be at least 1, got {lam}")
    n = len(ys)
    sel = _select_lines(ys, inf, lam)
    segs = inf.segments
    line_ids = [x for x in range(n) if sel[x]]
    line_no = {x: i for i, x in enumerate(line_ids)}
    ends_sel: list[list[int]] = [[] for _ in range(n + 1)]
    for x in line_ids:
        e = segs[x].x_end
        if e < n:
            ends_sel[e].append(x)

    x0: list[int] = []
    x1: list[int] = []
    y0: list[int] = []
    y1: list[int] = []
    top: list[int] = []
    bot: list[int] = []
    npts: list[int] = []
    region_of = [0] * n
    cap = 2 * lam

    def open_region(x: int, b: int, t: int) -> int:
        x0.append(x)
        x1.append(-1)
        y0.append(ys[b] + 1 if b >= 0 else 0)
        y1.append(ys[t] if t >= 0 else n - 1)
        bot.append(line_no[b] if b >= 0 else -1)
        top.append(line_no[t] if t >= 0 else -1)
        npts.append(0)
        return len(x0) - 1

    live_y: list[int] = []
    live_id: list[int] = []
    opened: dict[tuple[int, int], int] = {}
    for x in range(n):
        changed = x == 0
        for s in ends_sel[x]:
            i = bisect.bisect_left(live_y, ys[s])
            del live_y[i]
            del live_id[i]
            changed = True
        if sel[x]:
            i = bisect.bisect_left(live_y, ys[x])
            live_y.insert(i, ys[x])
            live_id.insert(i, x)
            changed = True
        if changed:
            bands = list(zip([-1] + live_id, live_id + [-1]))
            keys = set(bands)
            for k in [k for k in opened if k not in keys]:
                x1[opened.pop(k)] = x - 1
            for k in bands:
                if k not in opened:
                    opened[k] = open_region(x, *k)
        j = bisect.bisect_left(live_y, ys[x])
        k = (live_id[j - 1] if j > 0 else -1, live_id[j] if j < len(live_id) else -1)
        r = opened[k]
        if npts[r] == cap:
            x1[r] = x - 1
            r = opened[k] = open_region(x, *k)
        npts[r] += 1
        region_of[x] = r
    for r in opened.values():
        x1[r] = n - 1

    nreg = len(x0)
    breaks = sorted(set(x0))
    per_slab: list[list[int]] = [[] for _ in breaks]
    for r in range(nreg):
        a = bisect.bisect_left(breaks, x0[r])
        b = bisect.bisect_right(breaks, x1[r])
        for s in range(a, b):
            per_slab[s].append(r)
    slab_off = [0]
    slab_ids: list[int] = []
    for lst in per_slab:
        lst.sort(key=y0.__getitem__)
        slab_ids.extend(lst)
        slab_off.append(len(slab_ids))

    def overlapping(x: int, lo: int, hi: int) -> list[int]:
        s = bisect.bisect_right(breaks, x) - 1
        lst = per_slab[s]
        return [q for q in reversed(lst) if y0[q] <= hi and y1[q] >= lo]

    left_off, left_ids, right_off, right_ids = [0], [], [0], []
    for r in range(nreg):
        if x0[r] > 0:
            left_ids.extend(overlapping(x0[r] - 1, y0[r], y1[r]))
        left_off.append(len(left_ids))
        if x1[r] < n - 1:
            right_ids.extend(overlapping(x1[r] + 1, y0[r], y1[r]))
        right_off.append(len(right_ids))

    sk = Skeleton(
        n=n, lam=lam,
        line_x=line_ids, line_y=[ys[x] for x in line_ids],
        line_end=[min(segs[x].x_end, n) for x in line_ids],
        x0=x0, x1=x1, y0=y0, y1=y1, top=top, bot=bot,
        left_off=left_off, left_ids=left_ids, right_off=right_off, right_ids=right_ids,
        breaks=breaks, slab_off=slab_off, slab_ids=slab_ids)
    return sk, region_of, sel


# --------------------------------------------------------------------------
# Index


PAYLOADS = ("1a", "1b", "1c", "2l", "2r", "3", "4", "5")


@dataclass
class QueryStats:
    provider_calls: int = 0
    search_steps: int = 0
    hops: int = 0
    max_hops: int = 0
    waypoint_hits: int = 0


@dataclass
class LocalSegment:
    """A segment as seen inside one region after reconstruction.

    ``kind`` is ``"P"`` for a segment owned by a point of the region (``ref``
    is the point) or ``"L"`` for one entering from the left (``ref`` is its
    index in the region's left list). ``killer`` is the point ending the
    segment inside the region, or None when it survives to the right wall.
    """

    kind: str
    ref: object
    killer: Optional[Point] = None


class TwoSidedIndex:
    """Succinct 2-sided index over one (oriented) sub-problem."""

    def __init__(self, skeleton: Skeleton, n_left: list[int], n_right: list[int],
                 n_palive: list[int], n_points: list[int], len5: list[int],
                 payload: dict[str, BitVector], records: list[int]):
        self.sk = skeleton
        self.n = skeleton.n
        self.lam = skeleton.lam
        self.n_left = n_left
        self.n_right = n_right
        self.n_palive = n_palive
        self.n_points = n_points
        self.len5 = len5
        self.payload = payload
        self.records = records
        self.provider: Optional[PointProvider] = None
        self.record_width = width_for(max(self.n - 1, self.sk.n_regions - 1, 1))
        self._offsets()

    def _offsets(self) -> None:
        sk = self.sk
        nreg = sk.n_regions

        def prefix(lengths):
            out = [0]
            for v in lengths:
                out.append(out[-1] + v)
            return out

        deg_l = [sk.left_off[r + 1] - sk.left_off[r] for r in range(nreg)]
        deg_r = [sk.right_off[r + 1] - sk.right_off[r] for r in range(nreg)]
        self.off = {
            "1a": prefix(self.n_left),
            "1b": prefix(self.n_right),
            "1c": prefix(self.n_palive),
            "2l": prefix(a + b for a, b in zip(self.n_left, deg_l)),
            "2r": prefix(a + b for a, b in zip(self.n_right, deg_r)),
            "3": prefix(a + b for a, b in zip(self.n_points, self.n_left)),
            "4": prefix(self.n_right),
            "5": prefix(self.len5),
        }
        for k, offs in self.off.items():
            if offs[-1] != self.payload[k].length:
                raise FormatError(f"payload {k} holds {self.payload[k].length} bits, table says {offs[-1]}")
        if self.payload["4"].ones * 3 != len(self.records):
            raise FormatError("waypoint bits and records disagree")

    # ---- space accounting -------------------------------------------------

    def payload_bits(self) -> dict[str, int]:
        p = self.payload
        return {
            "1": p["1a"].length + p["1b"].length + p["1c"].length,
            "2": p["2l"].length + p["2r"].length,
            "3": p["3"].length,
            "4": p["4"].length + len(self.records) * self.record_width,
            "5": p["5"].length,
        }

    # ---- serialization ----------------------------------------------------

    def write_skeleton(self, w: Writer) -> None:
        self.sk.write(w)
        for arr in (self.n_left, self.n_right, self.n_palive, self.n_points, self.len5):
            w.ints(arr)

    def write_payload(self, item: str, w: Writer) -> None:
        """Write payload group ``item`` ("1" .. "5")."""
        if item == "1":
            for k in ("1a", "1b", "1c"):
                self.payload[k].write(w)
        elif item == "2":
            self.payload["2l"].write(w)
            self.payload["2r"].write(w)
        elif item == "3":
            self.payload["3"].write(w)
        elif item == "4":
            self.payload["4"].write(w)
            w.u8(self.record_width)
            w.u32(len(self.records))
            w.raw(pack_ints(self.records, self.record_width))
        elif item == "5":
            self.payload["5"].write(w)
        else:
            raise ValueError(f"unknown payload group {item!r}")

    @classmethod
    def read(cls, skel: Reader, payloads: dict[str, Reader]) -> "TwoSidedIndex":
        sk = Skeleton.read(skel)
        n_left, n_right, n_palive, n_points, len5 = (skel.ints() for _ in range(5))
        p: dict[str, BitVector] = {}
        r1 = payloads["1"]
        for k in ("1a", "1b", "1c"):
            p[k] = BitVector.read(r1)
        p["2l"] = BitVector.read(payloads["2"])
        p["2r"] = BitVector.read(payloads["2"])
        p["3"] = BitVector.read(payloads["3"])
        r4 = payloads["4"]
        p["4"] = BitVector.read(r4)
        width = r4.u8()
        count = r4.u32()
        records = unpack_ints(r4.raw((count * width + 7) // 8), count, width)
        p["5"] = BitVector.read(payloads["5"])
        idx = cls(sk, n_left, n_right, n_palive, n_points, len5, p, records)
        if idx.record_width != width:
            raise FormatError("waypoint record width mismatch")
        return idx

    def to_bytes(self) -> bytes:
        w = Writer()
        self.write_skeleton(w)
        for item in "12345":
            self.write_payload(item, w)
        return w.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "TwoSidedIndex":
        r = Reader(data)
        return cls.read(r, {k: r for k in "12345"})

    # ---- bit-string helpers ----------------------------------------------

    def _bit(self, k: str, r: int, i: int) -> int:
        return self.payload[k][self.off[k][r] + i]

    def _rank1(self, k: str, r: int, i: int) -> int:
        bv, o = self.payload[k], self.off[k][r]
        return bv.rank1(o + i) - bv.rank1(o)

    def _select1(self, k: str, r: int, j: int) -> int:
        """Local position of the j-th (1-based) one of region ``r``'s string."""
        bv, o = self.payload[k], self.off[k][r]
        return bv.select1(bv.rank1(o) + j) - o

    def _select0(self, k: str, r: int, j: int) -> int:
        bv, o = self.payload[k], self.off[k][r]
        return bv.select0(o - bv.rank1(o) + j) - o

    # ---- reconstruction ---------------------------------------------------

    def _sweep(self, r: int, pts: list[Point], upto: Optional[int] = None):
        """Replay the region's case bits and kill counts over its points.

        Returns ``(live, item_of, killed)``: the surviving items in top-to-bottom
        order, the description of every merged item, and for killed items the
        point that killed them. Items are merged indices: position in the
        descending-y merge of the region's points and left list.
        """
        npts = self.n_points[r]
        if len(pts) != npts:
            raise FormatError(f"region {r}: provider returned {len(pts)} points, index expects {npts}")
        nl = self.n_left[r]
        by_y = sorted(range(npts), key=lambda i: -pts[i][1])
        bv3, o3 = self.payload["3"], self.off["3"][r]
        item_of: list[tuple[str, int]] = []
        merged_of_point = [0] * npts
        pi = li = 0
        for m in range(npts + nl):
            if bv3[o3 + m]:
                item_of.append(("P", by_y[pi]))
                merged_of_point[by_y[pi]] = m
                pi += 1
            else:
                item_of.append(("L", li))
                li += 1
        if pi != npts or li != nl:
            raise FormatError(f"region {r}: merge string disagrees with the counts")
        live = [m for m in range(npts + nl) if item_of[m][0] == "L"]
        killed: dict[int, Point] = {}
        bv5, pos = self.payload["5"], self.off["5"][r]
        end5 = self.off["5"][r + 1]
        for i, p in enumerate(pts):
            if upto is not None and p[0] > upto:
                break
            if pos >= end5:
                raise FormatError(f"region {r}: case/kill string too short")
            case = bv5[pos]
            pos += 1
            if not case:
                continue
            k = 0
            while True:
                if pos >= end5:
                    raise FormatError(f"region {r}: unary kill count overruns")
                if bv5[pos]:
                    pos += 1
                    break
                k += 1
                pos += 1
            m = merged_of_point[i]
            at = bisect.bisect_left(live, m)
            if at + k > len(live):
                raise FormatError(f"region {r}: point kills {k} segments, fewer lie below")
            for victim in live[at:at + k]:
                killed[victim] = p
            live[at:at + k] = [m]
        return live, item_of, killed

    def reconstruct_local(self, r: int, pts: list[Point]) -> list[LocalSegment]:
        """Every segment part inside region ``r``, top to bottom."""
        live, item_of, killed = self._sweep(r, pts)
        out = []
        alive = set(live)
        for m, (kind, ref) in enumerate(item_of):
            if m not in alive and m not in killed:
                continue  # an empty segment
            out.append(LocalSegment(kind, pts[ref] if kind == "P" else ref, killed.get(m)))
        return out

    def _has_corner_owner(self, r: int) -> bool:
        t = self.sk.top[r]
        return t >= 0 and self.sk.line_x[t] == self.sk.x0[r]

    def _crossing_points(self, r: int, pts: list[Point]) -> list[Point]:
        """Points of ``r`` whose segments leave it through the right wall, top to bottom."""
        live, item_of, _ = self._sweep(r, pts)
        alive_p = [pts[item_of[m][1]] for m in live if item_of[m][0] == "P"]
        if self._has_corner_owner(r):
            alive_p = alive_p[1:]
        if len(alive_p) != self.n_palive[r]:
            raise FormatError(f"region {r}: {len(alive_p)} live point segments, index expects {self.n_palive[r]}")
        return [p for i, p in enumerate(alive_p) if self._bit("1c", r, i)]

    def _region_points(self, r: int, st: Optional[QueryStats]) -> list[Point]:
        sk = self.sk
        if st is not None:
            st.provider_calls += 1
        return self.provider.report(sk.x0[r], sk.x1[r], sk.y0[r], sk.y1[r])

    def _point_at(self, x: int, y: int, st: Optional[QueryStats]) -> Point:
        if st is not None:
            st.provider_calls += 1
        pts = self.provider.report(x, x, y, y)
        if len(pts) != 1:
            raise FormatError(f"no point at local ({x}, {y})")
        return pts[0]

    def resolve_left_segment(self, r: int, j: int, st: Optional[QueryStats] = None) -> Point:
        """Owner (provider coordinates) of the ``j``-th segment entering ``r`` from the left."""
        sk = self.sk
        cur, idx = r, j
        for hop in range(1, self.n + 2):
            if st is not None and hop > st.max_hops:
                st.max_hops = hop
            # which left neighbour the segment comes from, and its offset there
            pos = self._select0("2l", cur, idx + 1)
            t = self._rank1("2l", cur, pos)
            start = self._select1("2l", cur, t) + 1 if t else 0
            within = pos - start
            nb = sk.left_ids[sk.left_off[cur] + t]
            u = sk.right_neighbors(nb).index(cur)
            ustart = self._select1("2r", nb, u) + 1 if u else 0
            o = ustart - u + within
            if st is not None:
                st.hops += 1
            if self._bit("4", nb, o):
                k = self.payload["4"].rank1(self.off["4"][nb] + o)
                if st is not None:
                    st.waypoint_hits += 1
                _, x, y = self.records[3 * k:3 * k + 3]
                return self._point_at(x, y, st)
            if self._bit("1b", nb, o):
                b = self._rank1("1b", nb, o)
                return self._crossing_points(nb, self._region_points(nb, st))[b]
            c = o - self._rank1("1b", nb, o)
            idx = self._select1("1a", nb, c + 1)
            cur = nb
        raise FormatError("segment walk did not terminate")

    def query(self, q: Point, q_top: Point, st: Optional[QueryStats] = None) -> Optional[Point]:
        """Answer for local corner ``q``; ``q_top`` is its image in provider coordinates.

        The answer is the highest-priority point with ``x <= q.x`` and
        ``y >= q.y``, in provider coordinates, or None.
        """
        qx, qy = q
        if qx < 0 or qy > self.n - 1 or self.n == 0:
            return None
        qx = min(qx, self.n - 1)
        qy = max(qy, 0)
        tx, ty = q_top
        sk = self.sk
        r = locate_region(sk, (qx, qy))
        pts = self._region_points(r, st)
        live, item_of, _ = self._sweep(r, pts, upto=tx)
        # live is top to bottom; the qualifying items form a prefix
        ia = -1
        ib = len(live)
        for i, m in enumerate(live):
            kind, ref = item_of[m]
            if kind == "P":
                if pts[ref][1] >= ty:
                    ia = i
                else:
                    ib = i
                    break
        best = ia
        found: dict[int, Point] = {}
        lo, hi = ia + 1, ib
        while lo < hi:
            mid = (lo + hi) // 2
            if st is not None:
                st.search_steps += 1
            p = self.resolve_left_segment(r, item_of[live[mid]][1], st)
            found[mid] = p
            if p[1] >= ty:
                best = mid
                lo = mid + 1
            else:
                hi = mid
        if best >= 0:
            kind, ref = item_of[live[best]]
            return pts[ref] if kind == "P" else found[best]
        t = sk.top[r]
        if t < 0:
            return None
        return self._point_at(sk.line_x[t], sk.line_y[t], st)


def build_two_sided(provider: Optional[PointProvider], ys: Sequence[int], inf: InfluenceSet,
                    lam: int) -> TwoSidedIndex:
    """Build the index of the points ``(x, ys[x])`` with influence segments ``inf``.

    Only the segment geometry is used, never priorities, so two priority
    assignments with the same segments give bit-identical indexes.
    """
    n = len(ys)
    if provider is not None and provider.cap is not None and provider.cap < C_R * lam:
        raise ValueError(f"provider cap {provider.cap} is below {C_R} * lam = {C_R * lam}")
    sk, region_of, sel = select_skeleton(ys, inf, lam)
    segs = inf.segments
    nreg = sk.n_regions
    if n:
        assert sk.n_lines <= max(C_T * n // lam, 1), "too many selected lines"
        assert nreg <= max(C_T * n // lam, 1) + 1, "too many regions"

    pts_of: list[list[int]] = [[] for _ in range(nreg)]
    for x in range(n):
        pts_of[region_of[x]].append(x)
    ends_at = [0] * (n + 1)
    for s in segs:
        if not s.empty and s.x_end < n:
            ends_at[s.x_end] += 1

    starts_at: list[list[int]] = [[] for _ in range(n + 1)]
    finish_at: list[list[int]] = [[] for _ in range(n + 1)]
    for r in range(nreg):
        starts_at[sk.x0[r]].append(r)
        finish_at[sk.x1[r] + 1].append(r)

    left: list[list[int]] = [[] for _ in range(nreg)]
    right: list[list[int]] = [[] for _ in range(nreg)]
    path_here: list[dict[int, int]] = [dict() for _ in range(nreg)]
    path = [0] * n
    live_y: list[int] = []
    live_id: list[int] = []
    seg_ends: list[list[int]] = [[] for _ in range(n + 1)]
    for s in segs:
        if not s.empty and s.x_end < n:
            seg_ends[s.x_end].append(s.owner)

    def rows(c_lo: int, c_hi: int, before: int) -> list[int]:
        a = bisect.bisect_left(live_y, c_lo)
        b = bisect.bisect_right(live_y, c_hi)
        return [s for s in reversed(live_id[a:b]) if not sel[s] and s < before]

    for c in range(n + 1):
        if c < n:
            for s in seg_ends[c]:
                i = bisect.bisect_left(live_y, ys[s])
                del live_y[i]
                del live_id[i]
            if not segs[c].empty:
                i = bisect.bisect_left(live_y, ys[c])
                live_y.insert(i, ys[c])
                live_id.insert(i, c)
                path[c] = 0
        for r in finish_at[c]:
            if c < n:
                right[r] = rows(sk.y0[r], sk.y1[r], c)
        for r in starts_at[c]:
            left[r] = rows(sk.y0[r], sk.y1[r], c)
            for s in left[r]:
                path[s] += 1
                path_here[r][s] = path[s]
        # owners start their path in their own region
        if c < n and not segs[c].empty:
            path_here[region_of[c]][c] = 0

    bits: dict[str, list[int]] = {k: [] for k in PAYLOADS}
    records: list[int] = []
    n_left, n_right, n_palive, n_points, len5 = [], [], [], [], []
    for r in range(nreg):
        x0, x1 = sk.x0[r], sk.x1[r]
        L, R, P = left[r], right[r], pts_of[r]
        assert len(P) + len(L) <= C_R * lam, "region over its weight budget"
        n_left.append(len(L))
        n_right.append(len(R))
        n_points.append(len(P))
        # (1)
        bits["1a"].extend(int(segs[s].x_end > x1 + 1) for s in L)
        bits["1b"].extend(int(s >= x0) for s in R)
        palive = sorted((x for x in P if not segs[x].empty and not sel[x] and segs[x].x_end > x1),
                        key=lambda x: -ys[x])
        n_palive.append(len(palive))
        bits["1c"].extend(int(segs[x].x_end > x1 + 1) for x in palive)
        # (2)
        for key, lst, nbrs in (("2l", L, sk.left_neighbors(r)), ("2r", R, sk.right_neighbors(r))):
            i = 0
            for nb in nbrs:
                while i < len(lst) and ys[lst[i]] >= sk.y0[nb]:
                    bits[key].append(0)
                    i += 1
                bits[key].append(1)
            assert i == len(lst), "segment crossing a wall with no neighbour"
        # (3)
        merged = sorted([(ys[x], 1) for x in P] + [(ys[s], 0) for s in L], reverse=True)
        bits["3"].extend(b for _, b in merged)
        # (4)
        for s in R:
            i = path_here[r][s]
            if i >= lam and i % lam == 0:
                bits["4"].append(1)
                records.extend((region_of[s], s, ys[s]))
            else:
                bits["4"].append(0)
        # (5)
        start = len(bits["5"])
        for x in P:
            if segs[x].empty:
                bits["5"].append(0)
            else:
                bits["5"].append(1)
                k = 0 if x == x0 else ends_at[x]
                bits["5"].extend([0] * k)
                bits["5"].append(1)
        len5.append(len(bits["5"]) - start)

    payload = {k: BitVector(v) for k, v in bits.items()}
    idx = TwoSidedIndex(sk, n_left, n_right, n_palive, n_points, len5, payload, records)
    idx.provider = provider
    pb = idx.payload_bits()
    if CHECK_BUDGETS:
        # The budgets are asymptotic; a few bits of overshoot occur for n <= 8.
        slack = {"payload_1_3_5_bits": 2 * C_R * lam, "payload_2_ones": C_R}
        for name, (value, limit) in payload_budgets(idx).items():
            assert value <= limit + slack.get(name, 0), f"payload budget {name} exceeded: {value} > {limit}"
    return idx


def payload_budgets(idx: TwoSidedIndex) -> dict[str, tuple[float, float]]:
    """Measured payload sizes against their budgets, as ``name -> (value, limit)``."""
    n, lam = idx.n, idx.lam
    pb = idx.payload_bits()
    p2 = idx.payload["2l"], idx.payload["2r"]
    return {
        "payload_1_3_5_bits": (pb["1"] + pb["3"] + pb["5"], 8 * n),
        "payload_2_ones": (sum(b.ones for b in p2), 4 * n / lam),
        "payload_2_zeros": (sum(b.zeros for b in p2), 4 * n),
        "payload_4_bits": (pb["4"], 8 * (n / lam) * 3 * idx.record_width),
        "selected_lines": (idx.sk.n_lines, max(C_T * n / lam, 1)),
        "region_weight": (max((a + b for a, b in zip(idx.n_points, idx.n_left)), default=0), C_R * lam),
    }


def build_for_points(ps: PointSet, lam: int, provider: Optional[PointProvider] = None) -> TwoSidedIndex:
    """Index over ``ps`` (already in the open-top-left orientation)."""
    if provider is None:
        provider = ListProvider(ps)
    return build_two_sided(provider, ps.upsilon, build_influence(ps), lam)


def query_two_sided(idx: TwoSidedIndex, q: Point, q_top: Optional[Point] = None,
                    st: Optional[QueryStats] = None) -> Optional[Candidate]:
    """Candidate (top-level coordinates and priority) for corner ``q``."""
    prov = idx.provider
    if q_top is None:
        q_top = q
    p = idx.query(q, q_top, st)
    if p is None:
        return None
    x, y = prov.to_top(p)
    return Candidate(x, y, prov.priority(p))


def default_lambda(n: int) -> int:
    return max(1, math.ceil(math.sqrt(math.log2(n)))) if n > 1 else 1
