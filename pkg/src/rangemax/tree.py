"""Recursive slab decomposition answering 4-sided range maxima.

A node of ``n`` points is cut into ``n/k`` vertical and ``n/k`` horizontal
slabs of ``k`` points; each slab is a child node. A square matrix keeps the
maximum of every vertical-slab/horizontal-slab intersection, with a sparse
table for rectangle-of-cells maxima. Queries bounded on at most two
non-opposite sides are answered by one of four mirrored 2-sided indexes.
Small nodes are leaves that keep their points and scan them.

Nodes store only O(1) words of header each (their top-level bounding box);
everything else about their points is recovered from the global structures.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Optional

from .core import (IDENTITY, MIRROR_X, MIRROR_XY, MIRROR_Y, NEG_INF, POS_INF, Candidate,
                   PointSet, QueryRect, reflect)
from .global_index import Globals
from .influence import build_influence
from .slabs import NodeHeader
from .two_sided import (C_R, OrientedProvider, QueryStats, SlabProvider, TwoSidedIndex,
                        build_two_sided)

ORIENTATIONS = (IDENTITY, MIRROR_X, MIRROR_Y, MIRROR_XY)


def lambda_rule(n: int) -> int:
    return max(1, math.ceil(math.sqrt(math.log2(n)))) if n > 1 else 1


def _pow2_floor(v: float) -> int:
    return 1 << max(0, math.floor(math.log2(v))) if v >= 1 else 1


@dataclass(frozen=True)
class BuildConfig:
    """Sizes and parameters of the decomposition.

    ``n`` is the number of real points, ``n_pad`` the power of two the point
    set is padded to, ``L = log2(n_pad)``.
    """

    n: int
    n_pad: int
    L: int
    base_threshold: int
    lambda_override: Optional[int] = None

    def k(self, n: int) -> int:
        """Slab size for a node of ``n`` points (a power of two)."""
        return _pow2_floor(math.sqrt(n * self.L)) if self.L else n

    def lam(self, n: int) -> int:
        return self.lambda_override if self.lambda_override else lambda_rule(n)

    def is_leaf_size(self, n: int) -> bool:
        return n <= self.base_threshold or self.k(n) >= n

    def level_sizes(self) -> list[int]:
        sizes = [self.n_pad]
        while not self.is_leaf_size(sizes[-1]):
            sizes.append(self.k(sizes[-1]))
        return sizes

    @property
    def depth(self) -> int:
        return len(self.level_sizes()) - 1


def make_config(n: int, base_threshold: Optional[int] = None,
                lambda_override: Optional[int] = None) -> BuildConfig:
    if n < 1:
        raise ValueError("need at least one point")
    n_pad = 1 << (n - 1).bit_length()
    L = n_pad.bit_length() - 1
    if base_threshold is None:
        if L <= 1:
            base_threshold = n_pad
        else:
            target = L / math.log2(L)
            probe = BuildConfig(n, n_pad, L, 1)
            size, r = n_pad, 0
            while (1 << r) < target and probe.k(size) < size:
                size = probe.k(size)
                r += 1
            base_threshold = size
    return BuildConfig(n, n_pad, L, base_threshold, lambda_override)


def pad_points(ps: PointSet, n_pad: int) -> PointSet:
    """Add diagonal points ``(n+i, n+i)`` with the lowest priorities."""
    n = ps.n
    extra = n_pad - n
    ups = list(ps.upsilon) + list(range(n, n_pad))
    pri = [p + extra for p in ps.pi] + list(range(extra))
    return PointSet(ups, pri)


class SquareMatrix:
    """Per-cell maxima with a 2D sparse table of argmax cells.

    Cell ``(a, b)`` is vertical slab ``a`` crossed with horizontal slab ``b``;
    it stores the top-level ``x``, ``y`` and priority of its maximum, or -1.
    """

    def __init__(self, m: int, cell_x: list[int], cell_y: list[int], cell_p: list[int]):
        self.m = m
        self.cell_x = cell_x
        self.cell_y = cell_y
        self.cell_p = cell_p
        self.table = self._sparse_table()

    def _better(self, c1: int, c2: int) -> int:
        if c1 < 0:
            return c2
        if c2 < 0:
            return c1
        return c1 if self.cell_p[c1] > self.cell_p[c2] else c2

    def _sparse_table(self) -> dict[tuple[int, int], list[int]]:
        m = self.m
        lg = m.bit_length() - 1
        table: dict[tuple[int, int], list[int]] = {}
        table[(0, 0)] = [c if self.cell_x[c] >= 0 else -1 for c in range(m * m)]
        for i in range(lg + 1):
            if i:
                prev = table[(i - 1, 0)]
                half = 1 << (i - 1)
                cur = [-1] * (m * m)
                for a in range(m - (1 << i) + 1):
                    for b in range(m):
                        cur[a * m + b] = self._better(prev[a * m + b], prev[(a + half) * m + b])
                table[(i, 0)] = cur
            for j in range(1, lg + 1):
                prev = table[(i, j - 1)]
                half = 1 << (j - 1)
                cur = [-1] * (m * m)
                for a in range(m - (1 << i) + 1):
                    for b in range(m - (1 << j) + 1):
                        cur[a * m + b] = self._better(prev[a * m + b], prev[a * m + b + half])
                table[(i, j)] = cur
        return table

    def query(self, a_lo: int, a_hi: int, b_lo: int, b_hi: int) -> Optional[Candidate]:
        """Maximum stored cell over columns ``[a_lo, a_hi]`` and rows ``[b_lo, b_hi]``."""
        if a_lo > a_hi or b_lo > b_hi:
            return None
        m = self.m
        i = (a_hi - a_lo + 1).bit_length() - 1
        j = (b_hi - b_lo + 1).bit_length() - 1
        t = self.table[(i, j)]
        a2 = a_hi - (1 << i) + 1
        b2 = b_hi - (1 << j) + 1
        best = self._better(self._better(t[a_lo * m + b_lo], t[a_lo * m + b2]),
                            self._better(t[a2 * m + b_lo], t[a2 * m + b2]))
        if best < 0:
            return None
        return Candidate(self.cell_x[best], self.cell_y[best], self.cell_p[best])

    def table_entries(self) -> int:
        return sum(len(v) for v in self.table.values())

    def _valid(self, i: int, j: int):
        m = self.m
        for a in range(m - (1 << i) + 1):
            for b in range(m - (1 << j) + 1):
                yield a, b

    def encode_levels(self) -> list[list[int]]:
        """Level tables past (0, 0) as in-block argmax offsets; ``1 << (i+j)`` marks empty."""
        m = self.m
        lg = m.bit_length() - 1
        out = []
        for i in range(lg + 1):
            for j in range(lg + 1):
                if i == j == 0:
                    continue
                t = self.table[(i, j)]
                empty = 1 << (i + j)
                row = []
                for a, b in self._valid(i, j):
                    c = t[a * m + b]
                    row.append(empty if c < 0 else ((c // m - a) << j) | (c % m - b))
                out.append(row)
        return out

    @classmethod
    def from_levels(cls, m: int, cell_x: list[int], cell_y: list[int], cell_p: list[int],
                    levels: list[list[int]]) -> "SquareMatrix":
        mat = cls.__new__(cls)
        mat.m, mat.cell_x, mat.cell_y, mat.cell_p = m, cell_x, cell_y, cell_p
        lg = m.bit_length() - 1
        table = {(0, 0): [c if cell_x[c] >= 0 else -1 for c in range(m * m)]}
        it = iter(levels)
        for i in range(lg + 1):
            for j in range(lg + 1):
                if i == j == 0:
                    continue
                row = next(it, None)
                cells = list(mat._valid(i, j))
                if row is None or len(row) != len(cells):
                    raise ValueError(f"matrix level ({i}, {j}) has the wrong size")
                empty = 1 << (i + j)
                cur = [-1] * (m * m)
                for (a, b), off in zip(cells, row):
                    if off > empty:
                        raise ValueError(f"matrix level ({i}, {j}) offset out of range")
                    cur[a * m + b] = -1 if off == empty else (a + (off >> j)) * m + b + (off & ((1 << j) - 1))
                table[(i, j)] = cur
        if next(it, None) is not None:
            raise ValueError("extra matrix levels")
        mat.table = table
        return mat


class Node:
    """A sub-problem: header plus either leaf points or the internal parts."""

    __slots__ = ("header", "level", "leaf_xs", "k", "vchildren", "hchildren",
                 "vx_lo", "vx_hi", "hy_lo", "hy_hi", "matrix", "two_sided")

    def __init__(self, header: NodeHeader, level: int):
        self.header = header
        self.level = level
        self.leaf_xs: Optional[list[int]] = None
        self.k = 0
        self.vchildren: list[Node] = []
        self.hchildren: list[Node] = []
        self.vx_lo: list[int] = []
        self.vx_hi: list[int] = []
        self.hy_lo: list[int] = []
        self.hy_hi: list[int] = []
        self.matrix: Optional[SquareMatrix] = None
        self.two_sided: list[TwoSidedIndex] = []

    @property
    def is_leaf(self) -> bool:
        return self.leaf_xs is not None

    def set_children(self, vchildren: list["Node"], hchildren: list["Node"]) -> None:
        self.vchildren = vchildren
        self.hchildren = hchildren
        self.vx_lo = [c.header.x_lo for c in vchildren]
        self.vx_hi = [c.header.x_hi for c in vchildren]
        self.hy_lo = [c.header.y_lo for c in hchildren]
        self.hy_hi = [c.header.y_hi for c in hchildren]

    def walk(self):
        """Nodes in pre-order: self, vertical children, horizontal children."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.hchildren))
            stack.extend(reversed(node.vchildren))


def attach_providers(g: Globals, node: Node, lam: int) -> None:
    """Point every 2-sided index of ``node`` at a slab-select provider."""
    base = SlabProvider(g, node.header, cap=C_R * lam)
    for o, idx in zip(ORIENTATIONS, node.two_sided):
        idx.provider = OrientedProvider(base, node.header.n, o)


def _header_of(g: Globals, xs: list[int]) -> NodeHeader:
    ys = [g.X[x] for x in xs]
    return NodeHeader(xs[0], xs[-1], min(ys), max(ys), len(xs))


def build_node(g: Globals, xs: list[int], level: int, cfg: BuildConfig) -> Node:
    """Build the node holding the top-level points with x-coordinates ``xs`` (sorted)."""
    header = _header_of(g, xs)
    node = Node(header, level)
    n = len(xs)
    if cfg.is_leaf_size(n):
        node.leaf_xs = list(xs)
        return node
    k = cfg.k(n)
    m = n // k
    node.k = k
    X, pi = g.X, g.pi
    by_y = sorted(xs, key=X.__getitem__)
    ly_of = {x: i for i, x in enumerate(by_y)}
    vch = [build_node(g, xs[s * k:(s + 1) * k], level + 1, cfg) for s in range(m)]
    hch = [build_node(g, sorted(by_y[s * k:(s + 1) * k]), level + 1, cfg) for s in range(m)]
    node.set_children(vch, hch)

    cell_x = [-1] * (m * m)
    cell_p = [-1] * (m * m)
    for lx, x in enumerate(xs):
        c = (lx // k) * m + ly_of[x] // k
        if pi[x] > cell_p[c]:
            cell_p[c] = pi[x]
            cell_x[c] = x
    cell_y = [X[x] if x >= 0 else -1 for x in cell_x]
    node.matrix = SquareMatrix(m, cell_x, cell_y, cell_p)

    ups = [ly_of[x] for x in xs]
    prank = {x: i for i, x in enumerate(sorted(xs, key=pi.__getitem__))}
    local = PointSet(ups, [prank[x] for x in xs])
    lam = cfg.lam(n)
    for o in ORIENTATIONS:
        ps_o = reflect(local, o)
        node.two_sided.append(build_two_sided(None, ps_o.upsilon, build_influence(ps_o), lam))
    attach_providers(g, node, lam)
    return node


def build_tree(g: Globals, cfg: BuildConfig) -> Node:
    return build_node(g, list(range(g.n)), 0, cfg)


# --------------------------------------------------------------------------
# Query


@dataclass
class TreeStats:
    nodes: int = 0
    candidates: int = 0
    two_sided: int = 0
    matrix: int = 0
    leaves: int = 0
    provider_calls: int = 0
    max_batch: int = 0
    ts: QueryStats = field(default_factory=QueryStats)


# Piece kinds produced by decompose_query.
CHILD = "child"
TWO_SIDED = "two_sided"
MATRIX = "matrix"
LEAF = "leaf"


def decompose_query(node: Node, r: tuple[int, int, int, int]) -> list[tuple]:
    """Split a top-level rectangle (already clipped to the node box) into pieces.

    Pieces are ``(CHILD, child, rect)``, ``(TWO_SIDED, orientation)``,
    ``(MATRIX, a_lo, a_hi, b_lo, b_hi)`` or ``(LEAF,)``; their point sets
    partition the node's points inside ``r``.
    """
    if node.leaf_xs is not None:
        return [(LEAF,)]
    X_lo, X_hi, Y_lo, Y_hi = r
    h = node.header
    bl, br, bb, bt = X_lo > h.x_lo, X_hi < h.x_hi, Y_lo > h.y_lo, Y_hi < h.y_hi
    if not (bl and br) and not (bb and bt):
        o = (MIRROR_X if bl and not br else 0) | (MIRROR_Y if bt and not bb else 0)
        return [(TWO_SIDED, o)]
    vx_lo, vx_hi = node.vx_lo, node.vx_hi
    a_lo = bisect.bisect_left(vx_hi, X_lo)
    a_hi = bisect.bisect_right(vx_lo, X_hi) - 1
    if a_lo > a_hi:
        return []
    if a_lo == a_hi:
        return [(CHILD, node.vchildren[a_lo], r)]
    hy_lo, hy_hi = node.hy_lo, node.hy_hi
    b_lo = bisect.bisect_left(hy_hi, Y_lo)
    b_hi = bisect.bisect_right(hy_lo, Y_hi) - 1
    if b_lo > b_hi:
        return []
    if b_lo == b_hi:
        return [(CHILD, node.hchildren[b_lo], r)]
    out: list[tuple] = []
    left_cut = X_lo > vx_lo[a_lo]
    right_cut = X_hi < vx_hi[a_hi]
    fa_lo = a_lo + 1 if left_cut else a_lo
    fa_hi = a_hi - 1 if right_cut else a_hi
    if left_cut:
        out.append((CHILD, node.vchildren[a_lo], r))
    if right_cut:
        out.append((CHILD, node.vchildren[a_hi], r))
    if fa_lo <= fa_hi:
        cx_lo = max(X_lo, vx_lo[fa_lo])
        cx_hi = min(X_hi, vx_hi[fa_hi])
        bottom_cut = Y_lo > hy_lo[b_lo]
        top_cut = Y_hi < hy_hi[b_hi]
        fb_lo = b_lo + 1 if bottom_cut else b_lo
        fb_hi = b_hi - 1 if top_cut else b_hi
        if bottom_cut:
            out.append((CHILD, node.hchildren[b_lo], (cx_lo, cx_hi, Y_lo, Y_hi)))
        if top_cut:
            out.append((CHILD, node.hchildren[b_hi], (cx_lo, cx_hi, Y_lo, Y_hi)))
        if fb_lo <= fb_hi:
            out.append((MATRIX, fa_lo, fa_hi, fb_lo, fb_hi))
    return out


def two_sided_corner(g: Globals, node: Node, r: tuple[int, int, int, int], o: int):
    """Local corner and provider-coordinate corner of ``r`` for orientation ``o``."""
    h = node.header
    X_lo, X_hi, Y_lo, Y_hi = r
    n = h.n
    if o & MIRROR_X:
        qx = n - 1 - (g.count(h.x_lo, X_lo - 1, h.y_lo, h.y_hi) if X_lo > h.x_lo else 0)
        tx = -X_lo
    else:
        qx = g.count(h.x_lo, X_hi, h.y_lo, h.y_hi) - 1 if X_hi < h.x_hi else n - 1
        tx = X_hi
    if o & MIRROR_Y:
        qy = n - 1 - (g.count(h.x_lo, h.x_hi, h.y_lo, Y_hi) - 1 if Y_hi < h.y_hi else n - 1)
        ty = -Y_hi
    else:
        qy = g.count(h.x_lo, h.x_hi, h.y_lo, Y_lo - 1) if Y_lo > h.y_lo else 0
        ty = Y_lo
    return (qx, qy), (tx, ty)


def base_query(g: Globals, node: Node, r: tuple[int, int, int, int]) -> Optional[Candidate]:
    X_lo, X_hi, Y_lo, Y_hi = r
    X, pi = g.X, g.pi
    best = -1
    xs = node.leaf_xs
    for i in range(bisect.bisect_left(xs, X_lo), bisect.bisect_right(xs, X_hi)):
        x = xs[i]
        if Y_lo <= X[x] <= Y_hi and (best < 0 or pi[x] > pi[best]):
            best = x
    return None if best < 0 else Candidate(best, X[best], pi[best])


def query_tree(g: Globals, root: Node, r: QueryRect, st: Optional[TreeStats] = None) -> Optional[Candidate]:
    """Highest-priority point in ``r`` (top-level rank coordinates), or None."""
    best: Optional[Candidate] = None
    stack = [(root, (r.x_lo, r.x_hi, r.y_lo, r.y_hi))]
    while stack:
        node, (X_lo, X_hi, Y_lo, Y_hi) = stack.pop()
        h = node.header
        X_lo = max(X_lo, h.x_lo)
        X_hi = min(X_hi, h.x_hi)
        Y_lo = max(Y_lo, h.y_lo)
        Y_hi = min(Y_hi, h.y_hi)
        if X_lo > X_hi or Y_lo > Y_hi:
            continue
        rect = (X_lo, X_hi, Y_lo, Y_hi)
        if st is not None:
            st.nodes += 1
        for piece in decompose_query(node, rect):
            kind = piece[0]
            if kind == CHILD:
                stack.append((piece[1], piece[2]))
                continue
            if kind == LEAF:
                c = base_query(g, node, rect)
                if st is not None:
                    st.leaves += 1
            elif kind == MATRIX:
                c = node.matrix.query(*piece[1:])
                if st is not None:
                    st.matrix += 1
            else:
                o = piece[1]
                idx = node.two_sided[o]
                q, q_top = two_sided_corner(g, node, rect, o)
                ts = st.ts if st is not None else None
                p = idx.query(q, q_top, ts)
                if p is None:
                    c = None
                else:
                    x, y = idx.provider.to_top(p)
                    c = Candidate(x, y, g.pi[x])
                if st is not None:
                    st.two_sided += 1
            if st is not None:
                st.candidates += 1
            if c is not None and (best is None or c.priority > best.priority):
                best = c
    return best


def candidate_bound(depth: int) -> int:
    return 13 * (depth + 1) + 1


def node_bound(depth: int) -> int:
    return 5 * (depth + 1)
