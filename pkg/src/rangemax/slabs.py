"""Translating between a sub-problem's local ranks and top-level coordinates.

A sub-problem is described only by its header: the top-level bounding box of
its points and its size. Every top-level point inside the box belongs to the
sub-problem, so local ranks are plain range counts inside the box, and the
way back is a range selection on the global arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import QueryRect
from .global_index import AXIS_X, AXIS_Y, Globals

HORIZONTAL = 0
VERTICAL = 1


class SlabCapError(ValueError):
    """A slab-select request would return more points than allowed."""


@dataclass(frozen=True)
class NodeHeader:
    """Top-level bounding box (inclusive) of a sub-problem and its size."""

    x_lo: int
    x_hi: int
    y_lo: int
    y_hi: int
    n: int

    @classmethod
    def root(cls, n: int) -> "NodeHeader":
        return cls(0, n - 1, 0, n - 1, n)

    def contains(self, x: int, y: int) -> bool:
        return self.x_lo <= x <= self.x_hi and self.y_lo <= y <= self.y_hi


@dataclass(frozen=True)
class SlabRef:
    """Slab ``index`` (of ``k`` points) of the sub-problem ``header``."""

    header: NodeHeader
    axis: int
    index: int
    k: int

    def __post_init__(self):
        if self.k <= 0 or self.header.n % self.k:
            raise ValueError(f"slab size {self.k} does not divide problem size {self.header.n}")
        if not 0 <= self.index < self.header.n // self.k:
            raise ValueError(f"slab index {self.index} out of range")

    @property
    def local_lo(self) -> int:
        return self.index * self.k

    @property
    def local_hi(self) -> int:
        return self.index * self.k + self.k - 1


def top_x(g: Globals, h: NodeHeader, lx: int) -> int:
    """Top-level x of the point with local x-rank ``lx``."""
    if lx == 0:
        return h.x_lo
    if lx == h.n - 1:
        return h.x_hi
    left = g.count(0, h.x_lo - 1, h.y_lo, h.y_hi)
    return g.Y[g.select(AXIS_Y, h.y_lo, h.y_hi, left + lx + 1)]


def top_y(g: Globals, h: NodeHeader, ly: int) -> int:
    """Top-level y of the point with local y-rank ``ly``."""
    if ly == 0:
        return h.y_lo
    if ly == h.n - 1:
        return h.y_hi
    below = g.count(h.x_lo, h.x_hi, 0, h.y_lo - 1)
    return g.X[g.select(AXIS_X, h.x_lo, h.x_hi, below + ly + 1)]


def local_x(g: Globals, h: NodeHeader, x: int) -> int:
    """Number of the sub-problem's points with top-level x below ``x``."""
    if x <= h.x_lo:
        return 0
    if x > h.x_hi:
        return h.n
    return g.count(h.x_lo, x - 1, h.y_lo, h.y_hi)


def local_y(g: Globals, h: NodeHeader, y: int) -> int:
    if y <= h.y_lo:
        return 0
    if y > h.y_hi:
        return h.n
    return g.count(h.x_lo, h.x_hi, h.y_lo, y - 1)


def to_local_rect(g: Globals, h: NodeHeader, r: QueryRect) -> QueryRect:
    """Local rectangle holding exactly the sub-problem points inside ``r``.

    ``r`` is in top-level coordinates; the result is clipped to ``[0, n)``.
    """
    return QueryRect(local_x(g, h, r.x_lo), local_x(g, h, r.x_hi + 1) - 1,
                     local_y(g, h, r.y_lo), local_y(g, h, r.y_hi + 1) - 1)


def to_top_rect(g: Globals, h: NodeHeader, r: QueryRect) -> QueryRect:
    """Top-level rectangle inside ``h`` holding the points of local rect ``r``."""
    x_lo, x_hi = max(r.x_lo, 0), min(r.x_hi, h.n - 1)
    y_lo, y_hi = max(r.y_lo, 0), min(r.y_hi, h.n - 1)
    if x_lo > x_hi or y_lo > y_hi:
        return QueryRect(0, -1, 0, -1)
    return QueryRect(top_x(g, h, x_lo), top_x(g, h, x_hi), top_y(g, h, y_lo), top_y(g, h, y_hi))


def slab_header(g: Globals, slab: SlabRef) -> NodeHeader:
    """Header of the child sub-problem formed by ``slab``'s points."""
    h = slab.header
    if slab.k == h.n:
        return h
    lo, hi = slab.local_lo, slab.local_hi
    if slab.axis == VERTICAL:
        xa, xb = top_x(g, h, lo), top_x(g, h, hi)
        below = g.count(xa, xb, 0, h.y_lo - 1)
        ya = g.X[g.select(AXIS_X, xa, xb, below + 1)]
        yb = g.X[g.select(AXIS_X, xa, xb, below + slab.k)]
        return NodeHeader(xa, xb, ya, yb, slab.k)
    ya, yb = top_y(g, h, lo), top_y(g, h, hi)
    left = g.count(0, h.x_lo - 1, ya, yb)
    xa = g.Y[g.select(AXIS_Y, ya, yb, left + 1)]
    xb = g.Y[g.select(AXIS_Y, ya, yb, left + slab.k)]
    return NodeHeader(xa, xb, ya, yb, slab.k)


def slab_rank(g: Globals, slab: SlabRef, p_top: tuple[int, int], p_local: tuple[int, int]) -> tuple[int, int]:
    """Local coordinates, inside the slab's own sub-problem, of a slab point."""
    lx, ly = p_local
    along = lx if slab.axis == VERTICAL else ly
    if not slab.local_lo <= along <= slab.local_hi:
        raise ValueError(f"local point {p_local} is not in slab {slab.index}")
    h = slab.header
    x, y = p_top
    if slab.axis == VERTICAL:
        xa, xb = top_x(g, h, slab.local_lo), top_x(g, h, slab.local_hi)
        return lx - slab.local_lo, g.count(xa, xb, h.y_lo, y - 1)
    ya, yb = top_y(g, h, slab.local_lo), top_y(g, h, slab.local_hi)
    return g.count(h.x_lo, x - 1, ya, yb), ly - slab.local_lo


def slab_select(g: Globals, h: NodeHeader, local_rect: QueryRect,
                cap: int | None = None) -> list[tuple[int, int]]:
    """Top-level points whose local image lies in ``local_rect``, in x order.

    Raises :class:`SlabCapError` when more than ``cap`` points qualify.
    """
    top = to_top_rect(g, h, local_rect)
    if top.is_empty():
        return []
    if cap is not None:
        c = g.count(top.x_lo, top.x_hi, top.y_lo, top.y_hi)
        if c > cap:
            raise SlabCapError(f"{c} points in the rectangle, cap is {cap}")
    return g.report(top.x_lo, top.x_hi, top.y_lo, top.y_hi)
