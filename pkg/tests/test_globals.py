import random

import pytest

from rangemax.core import PointSet, QueryRect, random_pointset
from rangemax.global_index import (AXIS_X, AXIS_Y, Globals, WaveletMatrix, build_globals, max_point,
                                   range_count, range_report, range_select)
from rangemax.binio import Reader, Writer

P5 = PointSet([2, 4, 1, 0, 3], [3, 0, 4, 2, 1])


def test_p5_arrays_and_queries():
    g = build_globals(P5)
    assert g.X == [2, 4, 1, 0, 3]
    assert g.Y == [3, 2, 0, 4, 1]
    assert g.count(0, 2, 0, 2) == 2
    assert range_count(g, QueryRect(0, 2, 0, 2)) == 2
    assert range_report(g, QueryRect(0, 2, 0, 2)) == [(0, 2), (2, 1)]
    assert range_select(g, AXIS_X, 0, 4, 1) == 3
    assert g.select(AXIS_Y, 0, 4, 1) == 2
    assert max_point(g, 0, 4, 0, 4) == 2


def test_wavelet_matrix_against_scan():
    rng = random.Random(2)
    for sigma in (1, 2, 7, 64, 300):
        vals = [rng.randrange(sigma) for _ in range(200)]
        wm = WaveletMatrix(vals, sigma)
        for _ in range(300):
            s = rng.randrange(201)
            e = rng.randrange(s, 201)
            lo = rng.randrange(sigma)
            hi = rng.randrange(lo, sigma)
            seg = vals[s:e]
            assert wm.count_range(s, e, lo, hi) == sum(lo <= v <= hi for v in seg)
            assert wm.report(s, e, lo, hi) == sorted(v for v in seg if lo <= v <= hi)
            if seg:
                k = rng.randrange(len(seg))
                assert wm.quantile(s, e, k) == sorted(seg)[k]


@pytest.mark.parametrize("n", [1, 2, 33, 200])
def test_globals_against_scan(n):
    rng = random.Random(n)
    ps = random_pointset(n, rng)
    g = Globals(ps)
    pts = ps.points()
    for _ in range(400):
        x1, x2 = sorted(rng.randrange(-2, n + 2) for _ in range(2))
        y1, y2 = sorted(rng.randrange(-2, n + 2) for _ in range(2))
        inside = [p for p in pts if x1 <= p[0] <= x2 and y1 <= p[1] <= y2]
        assert g.count(x1, x2, y1, y2) == len(inside)
        assert g.report(x1, x2, y1, y2) == inside
    for _ in range(200):
        i = rng.randrange(n)
        j = rng.randrange(i, n)
        k = rng.randrange(1, j - i + 2)
        xs = sorted(range(i, j + 1), key=lambda x: ps.upsilon[x])
        assert g.select(AXIS_X, i, j, k) == xs[k - 1]
        ys = sorted(range(i, j + 1), key=lambda y: ps.x_of_y(y))
        assert g.select(AXIS_Y, i, j, k) == ys[k - 1]


def test_select_errors():
    g = Globals(P5)
    with pytest.raises(IndexError):
        g.select(AXIS_X, 0, 5, 1)
    with pytest.raises(IndexError):
        g.select(AXIS_X, 1, 2, 3)
    with pytest.raises(ValueError):
        g.select(7, 0, 1, 1)


def test_globals_roundtrip():
    g = Globals(random_pointset(500, random.Random(0)))
    w = Writer()
    g.write(w)
    g2 = Globals.read(Reader(w.getvalue()))
    assert g2.X == g.X and g2.pi == g.pi
    assert g2.count(10, 400, 30, 250) == g.count(10, 400, 30, 250)
    assert g2.report(0, 499, 0, 40) == g.report(0, 499, 0, 40)
