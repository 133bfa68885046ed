import random

import pytest

from rangemax.binio import FormatError, Reader, Writer, pack_ints, unpack_ints, width_for
from rangemax.bits import BitVector, UnaryStream, unary_bits, unary_decode, unary_encode


def naive_rank(bits, i):
    return sum(bits[:i])


def naive_select(bits, bit, j):
    seen = 0
    for pos, b in enumerate(bits):
        if b == bit:
            seen += 1
            if seen == j:
                return pos
    raise AssertionError("not found")


@pytest.mark.parametrize("n,density", [(0, 0.5), (1, 1.0), (63, 0.3), (64, 0.5), (65, 0.9),
                                       (511, 0.1), (512, 0.5), (513, 0.5), (3000, 0.02), (5000, 0.97)])
def test_rank_select_against_naive(n, density):
    rng = random.Random(n)
    bits = [rng.random() < density for _ in range(n)]
    bv = BitVector(bits)
    assert len(bv) == n and list(bv) == bits
    assert bv.ones == sum(bits)
    for i in range(n + 1):
        assert bv.rank1(i) == naive_rank(bits, i)
        assert bv.rank0(i) == i - naive_rank(bits, i)
    for j in range(1, bv.ones + 1):
        assert bv.select1(j) == naive_select(bits, True, j)
    for j in range(1, bv.zeros + 1):
        assert bv.select0(j) == naive_select(bits, False, j)


def test_rank_select_inverse():
    rng = random.Random(9)
    bv = BitVector([rng.random() < 0.4 for _ in range(4000)])
    for j in range(1, bv.ones + 1):
        assert bv.rank1(bv.select1(j)) == j - 1
        assert bv[bv.select1(j)]


def test_out_of_range_errors():
    bv = BitVector([1, 0, 1])
    with pytest.raises(IndexError):
        bv.rank1(4)
    with pytest.raises(IndexError):
        bv.select1(3)
    with pytest.raises(IndexError):
        bv.select0(2)
    with pytest.raises(IndexError):
        bv[3]


@pytest.mark.parametrize("n", [0, 10, 512, 1000])
def test_serialization_roundtrip(n):
    rng = random.Random(n)
    bv = BitVector([rng.random() < 0.5 for _ in range(n)])
    again = BitVector.from_bytes(bv.to_bytes())
    assert again == bv
    assert again.rank1(n) == bv.ones


def test_directory_only_for_long_vectors():
    assert BitVector([1] * 512).directory_bits() == 0
    long = BitVector([1] * 1000)
    assert long.directory_bits() == 32 * 2 + 16 * 16


def test_corrupt_directory_rejected():
    data = bytearray(BitVector([1, 0] * 600).to_bytes())
    data[-1] ^= 0xFF
    with pytest.raises(FormatError):
        BitVector.from_bytes(bytes(data))


def test_truncated_rejected():
    with pytest.raises(FormatError):
        BitVector.from_bytes(BitVector([1] * 200).to_bytes()[:-3])


def test_unary_roundtrip():
    ks = [0, 3, 1, 0, 0, 7, 2]
    s = unary_encode(ks)
    assert s.bit_length == sum(ks) + len(ks)
    assert unary_decode(s) == ks
    assert [s[i] for i in range(len(ks))] == ks
    assert unary_bits([2]) == [False, False, True]
    with pytest.raises(ValueError):
        unary_bits([-1])


def test_pack_ints_roundtrip():
    rng = random.Random(3)
    for width in (1, 5, 17, 40):
        vals = [rng.randrange(1 << width) for _ in range(100)]
        assert unpack_ints(pack_ints(vals, width), len(vals), width) == vals
    with pytest.raises(ValueError):
        pack_ints([8], 3)
    assert width_for(0) == 1 and width_for(8) == 4


def test_writer_reader_ints():
    w = Writer()
    w.ints([5, 0, 1023])
    w.ints([-7, 3, 12], signed=True)
    w.u8(9)
    r = Reader(w.getvalue())
    assert r.ints() == [5, 0, 1023]
    assert r.ints(signed=True) == [-7, 3, 12]
    assert r.u8() == 9 and r.at_end()
    with pytest.raises(FormatError):
        r.u32()
