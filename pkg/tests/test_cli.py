import io
import subprocess
import sys

import pytest

from rangemax.cli import (BENCH_HEADER, InputError, parse_points, parse_queries, points_from_bytes,
                          points_to_bytes, run)
from rangemax.core import NEG_INF, POS_INF, QueryRect, random_pointset

P5_TEXT = "5\n0 2 3\n1 4 0\n2 1 4\n3 0 2\n4 3 1\n"


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


@pytest.fixture
def p5(tmp_path):
    pts = tmp_path / "p5.txt"
    pts.write_text(P5_TEXT)
    idx = tmp_path / "p5.idx"
    assert call("build", "--input", str(pts), "--out", str(idx))[0] == 0
    return tmp_path, pts, idx


def test_p5_queries(p5):
    tmp, _, idx = p5
    q = tmp / "q.txt"
    q.write_text("0 0 2 2\n* * * *\n0 0 0 0\n3 * * 0\n# comment\n\n2 1 2 1\n")
    code, out = call("query", "--index", str(idx), "--queries", str(q))
    assert code == 0
    assert out.splitlines() == ["2 1 4", "2 1 4", "NONE", "3 0 2", "2 1 4"]


def test_query_from_points_file(p5):
    tmp, pts, _ = p5
    q = tmp / "q.txt"
    q.write_text("0 0 2 2\n")
    assert call("query", "--input", str(pts), "--queries", str(q)) == (0, "2 1 4\n")


def test_gen_format(tmp_path):
    code, out = call("gen", "--n", "5", "--seed", "1")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "5" and len(lines) == 6
    cols = list(zip(*[map(int, line.split()) for line in lines[1:]]))
    assert all(sorted(c) == list(range(5)) for c in cols)
    path = tmp_path / "g.txt"
    call("gen", "--n", "5", "--seed", "1", "--out", str(path))
    assert path.read_text() == out


def test_gen_binary_roundtrip(tmp_path):
    path = tmp_path / "g.bin"
    assert call("gen", "--n", "40", "--seed", "2", "--format", "binary", "--out", str(path))[0] == 0
    ps = points_from_bytes(path.read_bytes())
    assert ps == random_pointset(40, __import__("random").Random(2))
    code, out = call("verify", "--input", str(path), "--format", "binary", "--trials", "200")
    assert code == 0 and "mismatches 0" in out


def test_verify_random():
    code, out = call("verify", "--n", "64", "--trials", "100")
    assert code == 0
    assert out.splitlines() == ["queries 100", "mismatches 0"]


def test_verify_with_queries_file(p5):
    tmp, pts, idx = p5
    q = tmp / "q.txt"
    q.write_text("0 0 2 2\n* 1 3 *\n")
    assert call("verify", "--index", str(idx), "--queries", str(q))[0] == 0


def test_bench_csv():
    code, out = call("bench", "--sizes", "64,128", "--trials", "20")
    lines = out.splitlines()
    assert code == 0 and lines[0] == BENCH_HEADER and len(lines) == 3
    row = dict(zip(BENCH_HEADER.split(","), lines[1].split(",")))
    assert row["n"] == "64" and int(row["max_candidates"]) <= int(row["candidate_bound"])


def test_space_csv_and_json(p5):
    _, _, idx = p5
    code, out = call("space", "--index", str(idx))
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()[1:]]
    comps = {r[1]: int(r[2]) for r in rows if r[0] == "component"}
    total = [r for r in rows if r[0] == "total"][0]
    assert sum(comps.values()) == int(total[2]) == 8 * idx.stat().st_size
    code, out = call("space", "--n", "100", "--json")
    assert code == 0 and out.startswith('{"kind": "component"')


def test_parse_points_errors():
    with pytest.raises(InputError, match="header says 3"):
        parse_points("3\n0 0 0\n1 1 1\n")
    with pytest.raises(InputError, match=r":2: expected 'x y priority'"):
        parse_points("2\n0 0\n1 1 1\n")
    with pytest.raises(InputError, match="y column is not a permutation"):
        parse_points("2\n0 0 0\n1 0 1\n")
    with pytest.raises(InputError, match="priority column"):
        parse_points("2\n0 0 5\n1 1 1\n")
    with pytest.raises(InputError, match="field 2"):
        parse_points("2\n0 x 0\n1 1 1\n")
    with pytest.raises(InputError, match="empty"):
        parse_points("# nothing\n")
    with pytest.raises(InputError, match="magic"):
        points_from_bytes(b"nope")


def test_parse_queries():
    qs = parse_queries("1 2 3 4\n* 2 3 *\n")
    assert qs[0] == QueryRect(1, 3, 2, 4)
    assert qs[1] == QueryRect(NEG_INF, 3, 2, POS_INF)
    with pytest.raises(InputError, match=":1: expected 'x1 y1 x2 y2'"):
        parse_queries("1 2 3\n")


def test_error_exit_codes(p5, capsys):
    tmp, _, idx = p5
    bad = tmp / "bad.txt"
    bad.write_text("2\n0 0 0\n0 1 1\n")
    assert call("build", "--input", str(bad), "--out", str(tmp / "o.idx"))[0] == 2
    data = bytearray(idx.read_bytes())
    data[-1] ^= 1
    broken = tmp / "broken.idx"
    broken.write_bytes(bytes(data))
    q = tmp / "q.txt"
    q.write_text("0 0 1 1\n")
    assert call("query", "--index", str(broken), "--queries", str(q))[0] == 2
    assert "checksum" in capsys.readouterr().err
    assert call("query", "--index", str(tmp / "missing.idx"), "--queries", str(q))[0] == 2
    assert call("build", "--input", str(bad))[0] == 2


def test_points_bytes_roundtrip():
    ps = random_pointset(30, __import__("random").Random(0))
    assert points_from_bytes(points_to_bytes(ps)) == ps


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "rangemax", "verify", "--n", "16", "--trials", "50"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "mismatches 0" in res.stdout
