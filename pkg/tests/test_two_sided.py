import itertools
import math
import random

import pytest

from rangemax.binio import FormatError
from rangemax.core import PointSet, random_pointset
from rangemax.influence import build_influence
from rangemax.two_sided import (C_R, C_T, ListProvider, QueryStats, TwoSidedIndex, build_for_points,
                                default_lambda, locate_region, payload_budgets, query_two_sided,
                                select_skeleton)
from oracles import dominance_max

P5 = PointSet([2, 4, 1, 0, 3], [3, 0, 4, 2, 1])


def staircases(n):
    up = list(range(n))
    return [PointSet(up, up), PointSet(up[::-1], up), PointSet(up, up[::-1]), PointSet(up[::-1], up[::-1])]


def check_all_corners(ps, idx):
    n = ps.n
    for qx in range(n):
        for qy in range(n):
            want = dominance_max(ps.upsilon, ps.pi, qx, qy)
            got = query_two_sided(idx, (qx, qy))
            assert (tuple(got) if got else None) == want, (qx, qy)


def test_p5():
    idx = build_for_points(P5, 2, ListProvider(P5, cap=C_R * 2))
    assert idx.sk.n_lines <= 10
    assert all(a + b <= 8 for a, b in zip(idx.n_points, idx.n_left))
    check_all_corners(P5, idx)
    assert tuple(query_two_sided(idx, (3, 0))) == (2, 1, 4)
    r = locate_region(idx.sk, (3, 0))
    assert idx.sk.contains(r, 3, 0)


def test_reconstruction_keeps_p5_answer_alive():
    idx = build_for_points(P5, 2)
    r = locate_region(idx.sk, (2, 1))
    pts = idx.provider.report(idx.sk.x0[r], idx.sk.x1[r], idx.sk.y0[r], idx.sk.y1[r])
    segs = idx.reconstruct_local(r, pts)
    owner = [s for s in segs if s.kind == "P" and s.ref == (2, 1)]
    assert owner and owner[0].killer is None


@pytest.mark.parametrize("n", [1, 2, 3, 8, 23, 64])
@pytest.mark.parametrize("lam", [1, 2, 3, 4])
def test_exhaustive_corners(n, lam):
    rng = random.Random(n * 10 + lam)
    for ps in [random_pointset(n, rng) for _ in range(3)] + staircases(n):
        idx = build_for_points(ps, lam, ListProvider(ps, cap=C_R * lam))
        check_all_corners(ps, idx)


def test_locate_region_contains_every_corner():
    rng = random.Random(3)
    for n in (10, 64):
        ps = random_pointset(n, rng)
        idx = build_for_points(ps, 2)
        regions = set()
        for qx, qy in itertools.product(range(n), repeat=2):
            r = locate_region(idx.sk, (qx, qy))
            assert idx.sk.contains(r, qx, qy)
            regions.add(r)
        assert regions == set(range(idx.sk.n_regions))


def test_tiny_problem_is_one_region():
    for n in (1, 2, 3, 4):
        idx = build_for_points(random_pointset(n, random.Random(n)), 2)
        assert idx.sk.n_regions == 1


def test_skeleton_invariants_random_4096():
    ps = random_pointset(4096, random.Random(0))
    lam = default_lambda(4096)
    sk, region_of, sel = select_skeleton(ps.upsilon, build_influence(ps), lam)
    assert sk.n_lines <= C_T * 4096 // lam
    assert sk.n_regions <= C_T * 4096 // lam + 1
    assert sum(sel) == sk.n_lines


def test_left_segments_resolve_to_their_owners():
    rng = random.Random(1)
    cases = [random_pointset(n, rng) for n in (5, 40, 128) for _ in range(4)]
    cases += staircases(64) + staircases(200)
    for ps in cases:
        inf = build_influence(ps)
        for lam in (1, 2, 3):
            idx = build_for_points(ps, lam)
            sk = idx.sk
            lines = set(sk.line_x)
            for r in range(sk.n_regions):
                st = QueryStats()
                got = [idx.resolve_left_segment(r, j, st)[0] for j in range(idx.n_left[r])]
                want = [s.owner for s in sorted(inf.segments, key=lambda s: -s.y)
                        if s.owner not in lines and s.x_start < sk.x0[r] and s.spans(sk.x0[r])
                        and sk.y0[r] <= s.y <= sk.y1[r]]
                assert got == want
                assert st.max_hops <= lam


def test_query_search_bounds_and_provider_cap():
    rng = random.Random(2)
    for ps in [random_pointset(300, rng), *staircases(300)]:
        for lam in (2, 3):
            prov = ListProvider(ps, cap=C_R * lam)
            idx = build_for_points(ps, lam, prov)
            limit = math.ceil(math.log2(C_R * lam)) + 1
            for _ in range(500):
                st = QueryStats()
                query_two_sided(idx, (rng.randrange(300), rng.randrange(300)), st=st)
                assert st.search_steps <= limit
            assert prov.max_batch <= C_R * lam


def test_payload_budgets():
    for n in (256, 4096):
        ps = random_pointset(n, random.Random(n))
        for lam in (default_lambda(n), 2, int(math.log2(n))):
            idx = build_for_points(ps, lam)
            for name, (value, limit) in payload_budgets(idx).items():
                assert value <= limit, name
            assert idx.payload["3"].length == sum(idx.n_points) + sum(idx.n_left)
    for ps in staircases(1024):
        idx = build_for_points(ps, 3)
        for name, (value, limit) in payload_budgets(idx).items():
            assert value <= limit, name


def test_log_lambda_payload_is_linear():
    n = 4096
    idx = build_for_points(random_pointset(n, random.Random(5)), int(math.log2(n)))
    assert sum(idx.payload_bits().values()) <= 16 * n


def test_serialization_roundtrip_and_determinism():
    rng = random.Random(4)
    ps = random_pointset(500, rng)
    idx = build_for_points(ps, 3)
    data = idx.to_bytes()
    assert build_for_points(ps, 3).to_bytes() == data
    again = TwoSidedIndex.from_bytes(data)
    again.provider = ListProvider(ps)
    assert again.to_bytes() == data
    for _ in range(300):
        q = (rng.randrange(500), rng.randrange(500))
        assert query_two_sided(again, q) == query_two_sided(idx, q)
    with pytest.raises(FormatError):
        TwoSidedIndex.from_bytes(data[:-5])


def test_index_stores_no_priorities():
    groups = {}
    for pri in itertools.permutations(range(6)):
        ps = PointSet([3, 5, 1, 4, 0, 2], list(pri))
        key = build_influence(ps).segments
        groups.setdefault(key, []).append(build_for_points(ps, 1).to_bytes())
    assert any(len(v) > 1 for v in groups.values())
    for blobs in groups.values():
        assert len(set(blobs)) == 1
