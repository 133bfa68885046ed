import hashlib
import random
import zlib

import pytest

from rangemax.binio import FormatError
from rangemax.core import random_pointset, random_rect
from rangemax.index import RangeMaxIndex
from rangemax.serialize import SECTIONS, dumps, load, loads, read_sections, save, space_report
from rangemax.tree import SquareMatrix


@pytest.mark.parametrize("n", [1, 2, 7, 64, 300])
def test_roundtrip_answers_and_bytes(n):
    rng = random.Random(n)
    ps = random_pointset(n, rng)
    ix = RangeMaxIndex.build(ps)
    data = dumps(ix)
    again = loads(data)
    assert dumps(again) == data
    assert again.points() == ps
    for _ in range(300):
        r = random_rect(n, rng, rng.choice((2, 3, 4)))
        assert again.query(r) == ix.query(r)


def test_deterministic_build():
    ps = random_pointset(500, random.Random(3))
    h1 = hashlib.sha256(dumps(RangeMaxIndex.build(ps))).hexdigest()
    h2 = hashlib.sha256(dumps(RangeMaxIndex.build(random_pointset(500, random.Random(3))))).hexdigest()
    assert h1 == h2


def test_save_load(tmp_path):
    ps = random_pointset(100, random.Random(0))
    ix = RangeMaxIndex.build(ps, lambda_override=2, base_threshold=8)
    path = tmp_path / "x.idx"
    size = save(ix, str(path))
    assert size == path.stat().st_size
    again = load(str(path))
    assert again.cfg == ix.cfg


def test_header_and_sections():
    data = dumps(RangeMaxIndex.build(random_pointset(64, random.Random(1))))
    assert data[:4] == b"RMXI"
    assert list(read_sections(data)) == list(SECTIONS)


def _corrupt(data, pos):
    b = bytearray(data)
    b[pos] ^= 0x40
    return bytes(b)


def test_corruption_detected():
    data = dumps(RangeMaxIndex.build(random_pointset(64, random.Random(2))))
    with pytest.raises(FormatError, match="magic"):
        loads(b"XXXX" + data[4:])
    with pytest.raises(FormatError, match="version"):
        loads(data[:4] + (99).to_bytes(4, "little") + data[8:])
    with pytest.raises(FormatError, match="checksum"):
        loads(_corrupt(data, len(data) - 10))
    with pytest.raises(FormatError):
        loads(data[:len(data) // 2])
    with pytest.raises(FormatError):
        loads(data[:6])


def test_space_report_reconciles():
    for n in (5, 200, 2048):
        ps = random_pointset(n, random.Random(n))
        ix = RangeMaxIndex.build(ps)
        data = dumps(ix)
        rep = space_report(ix, ps, data)
        assert rep.reconciles()
        assert sum(rep.components.values()) + rep.framing_bits == 8 * len(data)
        assert set(rep.components) == set(SECTIONS)
        assert all(ok for *_, ok in rep.checks), rep.checks
        csv = rep.to_csv().splitlines()
        assert csv[0] == "kind,name,value,limit,ok"
        assert any(line.startswith("check,entropy_code_bits_over_3n,") for line in csv)


def test_matrix_level_encoding_roundtrip():
    rng = random.Random(4)
    for m in (1, 2, 4, 8):
        cx = [rng.randrange(-1, 50) for _ in range(m * m)]
        cp = [rng.randrange(1000) if x >= 0 else -1 for x in cx]
        cy = [x if x >= 0 else -1 for x in cx]
        mat = SquareMatrix(m, cx, cy, cp)
        again = SquareMatrix.from_levels(m, cx, cy, cp, mat.encode_levels())
        assert again.table == mat.table
    with pytest.raises(ValueError):
        SquareMatrix.from_levels(2, [0] * 4, [0] * 4, [0, 1, 2, 3], [[0]])
