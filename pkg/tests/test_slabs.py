import random

import pytest

from rangemax.core import PointSet, QueryRect, random_pointset
from rangemax.global_index import Globals
from rangemax.slabs import (HORIZONTAL, VERTICAL, NodeHeader, SlabCapError, SlabRef, local_x, local_y,
                            slab_header, slab_rank, slab_select, to_local_rect, top_x, top_y)
from slab_oracle import local_coords, slab_points

N4 = PointSet([1, 3, 0, 2], [0, 1, 2, 3])


def test_whole_problem_slab_is_identity():
    g = Globals(N4)
    root = NodeHeader.root(4)
    slab = SlabRef(root, VERTICAL, 0, 4)
    assert slab_header(g, slab) == root
    for x, y in N4.points():
        assert slab_rank(g, slab, (x, y), (x, y)) == (x, y)


def test_n4_examples():
    g = Globals(N4)
    root = NodeHeader.root(4)
    assert slab_rank(g, SlabRef(root, VERTICAL, 0, 2), (1, 3), (1, 3)) == (1, 1)
    hs = SlabRef(root, HORIZONTAL, 0, 2)
    assert slab_rank(g, hs, (2, 0), (2, 0)) == (1, 0)
    child = slab_header(g, hs)
    assert slab_select(g, child, QueryRect(0, 1, 0, 0)) == [(2, 0)]
    assert slab_select(g, root, QueryRect()) == N4.points()


def test_slab_select_cap():
    g = Globals(N4)
    with pytest.raises(SlabCapError):
        slab_select(g, NodeHeader.root(4), QueryRect(0, 3, 0, 3), cap=3)
    assert len(slab_select(g, NodeHeader.root(4), QueryRect(0, 3, 0, 3), cap=4)) == 4


def test_slabref_validation():
    root = NodeHeader.root(8)
    with pytest.raises(ValueError):
        SlabRef(root, VERTICAL, 0, 3)
    with pytest.raises(ValueError):
        SlabRef(root, VERTICAL, 2, 4)


def _walk(g, header, points, depth, rng, out):
    """Descend through random nested slabs, checking every level against the oracle."""
    loc = local_coords(points)
    for p, (lx, ly) in loc.items():
        assert (top_x(g, header, lx), top_y(g, header, ly)) == (p[0], g.X[p[0]])
        assert (local_x(g, header, p[0]), local_y(g, header, p[1])) == (lx, ly)
    if depth == 0 or header.n < 2:
        return
    k = header.n // 2
    for axis in (VERTICAL, HORIZONTAL):
        idx = rng.randrange(2)
        slab = SlabRef(header, axis, idx, k)
        pts = slab_points(points, axis == VERTICAL, idx, k)
        child = slab_header(g, slab)
        assert child.n == k
        assert all(child.contains(*p) for p in pts)
        child_loc = local_coords(pts)
        for p in pts:
            assert slab_rank(g, slab, p, loc[p]) == child_loc[p]
        out.append(len(pts))
        _walk(g, child, pts, depth - 1, rng, out)


@pytest.mark.parametrize("n", [2, 8, 32, 64])
def test_nested_slabs_against_sorting_oracle(n):
    rng = random.Random(n)
    ps = random_pointset(n, rng)
    g = Globals(ps)
    out = []
    _walk(g, NodeHeader.root(n), ps.points(), 3, rng, out)
    assert out


def test_slab_select_matches_local_filter():
    rng = random.Random(11)
    ps = random_pointset(64, rng)
    g = Globals(ps)
    slab = SlabRef(NodeHeader.root(64), HORIZONTAL, 2, 16)
    child = slab_header(g, slab)
    pts = slab_points(ps.points(), False, 2, 16)
    loc = local_coords(pts)
    for _ in range(300):
        x1, x2 = sorted(rng.randrange(16) for _ in range(2))
        y1, y2 = sorted(rng.randrange(16) for _ in range(2))
        want = sorted(p for p in pts if x1 <= loc[p][0] <= x2 and y1 <= loc[p][1] <= y2)
        assert slab_select(g, child, QueryRect(x1, x2, y1, y2)) == want
        top = to_local_rect(g, child, QueryRect(0, 63, 0, 63))
        assert (top.x_lo, top.x_hi, top.y_lo, top.y_hi) == (0, 15, 0, 15)
