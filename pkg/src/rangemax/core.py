"""Rank-space points, query rectangles and the brute-force oracle.

Every structure in the package is checked against :func:`brute_force_max`.
Points live in rank space: point ``i`` is ``(i, upsilon[i])`` with priority
``pi[i]``, and both arrays are permutations of ``range(n)``.
"""
from __future__ import annotations

import bisect
import random
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

# Open sides of a rectangle. Far outside any coordinate range we ever use, so
# clipping a rectangle against a box is a plain max/min.
NEG_INF = -(1 << 62)
POS_INF = 1 << 62

# Quadrant codes for reflect(): bit 0 mirrors x, bit 1 mirrors y.
IDENTITY = 0
MIRROR_X = 1
MIRROR_Y = 2
MIRROR_XY = 3


class DuplicateError(ValueError):
    """Raised when raw input violates general position."""


class Candidate(NamedTuple):
    x: int
    y: int
    priority: int


def _check_permutation(name: str, values: Sequence[int], n: int) -> None:
    seen = [False] * n
    for i, v in enumerate(values):
        if not (0 <= v < n) or seen[v]:
            raise ValueError(f"{name} is not a permutation of range({n}): bad entry {v!r} at index {i}")
        seen[v] = True


def invert(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for i, v in enumerate(perm):
        inv[v] = i
    return inv


class PointSet:
    """N points in rank space with distinct priorities."""

    __slots__ = ("n", "upsilon", "pi", "_upsilon_inv")

    def __init__(self, upsilon: Sequence[int], pi: Sequence[int]):
        n = len(upsilon)
        if len(pi) != n:
            raise ValueError(f"upsilon has {n} entries but pi has {len(pi)}")
        _check_permutation("upsilon", upsilon, n)
        _check_permutation("pi", pi, n)
        self.n = n
        self.upsilon = tuple(upsilon)
        self.pi = tuple(pi)
        self._upsilon_inv = tuple(invert(upsilon))

    @classmethod
    def from_triples(cls, triples: Sequence[tuple[int, int, int]]) -> "PointSet":
        """Build from ``(x, y, priority)`` triples already in rank space."""
        n = len(triples)
        ups = [-1] * n
        pri = [-1] * n
        for x, y, p in triples:
            if not 0 <= x < n or ups[x] != -1:
                raise ValueError(f"x-coordinates are not a permutation of range({n}): {x}")
            ups[x] = y
            pri[x] = p
        return cls(ups, pri)

    def x_of_y(self, y: int) -> int:
        return self._upsilon_inv[y]

    def points(self) -> list[tuple[int, int]]:
        return [(i, y) for i, y in enumerate(self.upsilon)]

    def triples(self) -> list[tuple[int, int, int]]:
        return [(i, y, p) for i, (y, p) in enumerate(zip(self.upsilon, self.pi))]

    def candidate(self, x: int) -> Candidate:
        return Candidate(x, self.upsilon[x], self.pi[x])

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.upsilon == other.upsilon and self.pi == other.pi

    def __hash__(self) -> int:
        return hash((self.upsilon, self.pi))

    def __repr__(self) -> str:
        return f"PointSet(upsilon={list(self.upsilon)}, pi={list(self.pi)})"


@dataclass(frozen=True)
class QueryRect:
    """Inclusive axis-parallel rectangle; open sides hold NEG_INF / POS_INF."""

    x_lo: int = NEG_INF
    x_hi: int = POS_INF
    y_lo: int = NEG_INF
    y_hi: int = POS_INF

    @property
    def bounded(self) -> tuple[bool, bool, bool, bool]:
        """Which of (x_lo, x_hi, y_lo, y_hi) are finite."""
        return (self.x_lo != NEG_INF, self.x_hi != POS_INF,
                self.y_lo != NEG_INF, self.y_hi != POS_INF)

    @property
    def sidedness(self) -> int:
        # 0- and 1-sided rectangles are legal and answered as degenerate
        # 2-sided queries; report them as 2.
        return max(2, sum(self.bounded))

    def is_empty(self) -> bool:
        return self.x_lo > self.x_hi or self.y_lo > self.y_hi

    def contains(self, x: int, y: int) -> bool:
        return self.x_lo <= x <= self.x_hi and self.y_lo <= y <= self.y_hi

    def clip(self, x_lo: int, x_hi: int, y_lo: int, y_hi: int) -> "QueryRect":
        return QueryRect(max(self.x_lo, x_lo), min(self.x_hi, x_hi),
                         max(self.y_lo, y_lo), min(self.y_hi, y_hi))

    @classmethod
    def full(cls) -> "QueryRect":
        return cls()


@dataclass(frozen=True)
class CoordMaps:
    """Sorted original coordinates, used to map real rectangles to rank space."""

    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self):
        for name, vals in (("xs", self.xs), ("ys", self.ys)):
            if any(a >= b for a, b in zip(vals, vals[1:])):
                raise ValueError(f"{name} must be strictly increasing")


def _ranks(values: Sequence[float], what: str) -> list[int]:
    order = sorted(range(len(values)), key=values.__getitem__)
    for a, b in zip(order, order[1:]):
        if values[a] == values[b]:
            raise DuplicateError(f"duplicate {what} {values[a]!r} at input rows {a} and {b}")
    ranks = [0] * len(values)
    for r, i in enumerate(order):
        ranks[i] = r
    return ranks


def rank_reduce(raw: Sequence[tuple[float, float, float]]) -> tuple[PointSet, CoordMaps]:
    """Replace real coordinates and priorities by their ranks."""
    xs = [t[0] for t in raw]
    ys = [t[1] for t in raw]
    ps = [t[2] for t in raw]
    rx = _ranks(xs, "x-coordinate")
    ry = _ranks(ys, "y-coordinate")
    rp = _ranks(ps, "priority")
    n = len(raw)
    ups = [0] * n
    pri = [0] * n
    for i in range(n):
        ups[rx[i]] = ry[i]
        pri[rx[i]] = rp[i]
    return PointSet(ups, pri), CoordMaps(tuple(sorted(xs)), tuple(sorted(ys)))


def map_rect(maps: CoordMaps, x_lo: float = float("-inf"), x_hi: float = float("inf"),
             y_lo: float = float("-inf"), y_hi: float = float("inf")) -> QueryRect:
    """Smallest rank rectangle holding exactly the points of a real rectangle.

    The result may be empty (``x_lo > x_hi``), which callers treat as a query
    with no answer.
    """
    rx_lo = bisect.bisect_left(maps.xs, x_lo)
    rx_hi = bisect.bisect_right(maps.xs, x_hi) - 1
    ry_lo = bisect.bisect_left(maps.ys, y_lo)
    ry_hi = bisect.bisect_right(maps.ys, y_hi) - 1
    return QueryRect(rx_lo, rx_hi, ry_lo, ry_hi)


def brute_force_max(ps: PointSet, r: QueryRect) -> Optional[Candidate]:
    best = None
    lo = max(r.x_lo, 0)
    hi = min(r.x_hi, ps.n - 1)
    ups, pri = ps.upsilon, ps.pi
    for x in range(lo, hi + 1):
        y = ups[x]
        if r.y_lo <= y <= r.y_hi and (best is None or pri[x] > pri[best]):
            best = x
    return None if best is None else ps.candidate(best)


def reflect(ps: PointSet, orientation: int) -> PointSet:
    """Mirror the point set; priorities travel with their points."""
    n = ps.n
    ups = list(ps.upsilon)
    pri = list(ps.pi)
    if orientation & MIRROR_X:
        ups.reverse()
        pri.reverse()
    if orientation & MIRROR_Y:
        ups = [n - 1 - y for y in ups]
    return PointSet(ups, pri)


def reflect_rect(r: QueryRect, n: int, orientation: int) -> QueryRect:
    def flip(lo, hi):
        return (NEG_INF if hi == POS_INF else n - 1 - hi,
                POS_INF if lo == NEG_INF else n - 1 - lo)

    x_lo, x_hi, y_lo, y_hi = r.x_lo, r.x_hi, r.y_lo, r.y_hi
    if orientation & MIRROR_X:
        x_lo, x_hi = flip(x_lo, x_hi)
    if orientation & MIRROR_Y:
        y_lo, y_hi = flip(y_lo, y_hi)
    return QueryRect(x_lo, x_hi, y_lo, y_hi)


def reflect_point(x: int, y: int, n: int, orientation: int) -> tuple[int, int]:
    if orientation & MIRROR_X:
        x = n - 1 - x
    if orientation & MIRROR_Y:
        y = n - 1 - y
    return x, y


def random_pointset(n: int, rng: random.Random) -> PointSet:
    ups = list(range(n))
    pri = list(range(n))
    rng.shuffle(ups)
    rng.shuffle(pri)
    return PointSet(ups, pri)


def random_rect(n: int, rng: random.Random, sides: Optional[int] = None) -> QueryRect:
    """Random rectangle inside [0, n) with the requested number of bounded sides.

    ``sides=None`` always bounds all four sides. Open sides are chosen so the
    bounded ones include one x-side and one y-side when ``sides == 2``.
    """
    x1, x2 = sorted((rng.randrange(n), rng.randrange(n)))
    y1, y2 = sorted((rng.randrange(n), rng.randrange(n)))
    if sides is None or sides == 4:
        return QueryRect(x1, x2, y1, y2)
    keep = [True, True, True, True]
    if sides == 3:
        keep[rng.randrange(4)] = False
    elif sides == 2:
        keep[rng.randrange(2)] = False
        keep[2 + rng.randrange(2)] = False
    else:
        raise ValueError(f"sides must be 2, 3 or 4, got {sides}")
    return QueryRect(x1 if keep[0] else NEG_INF, x2 if keep[1] else POS_INF,
                     y1 if keep[2] else NEG_INF, y2 if keep[3] else POS_INF)
