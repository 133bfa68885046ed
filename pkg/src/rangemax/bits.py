"""Static bit vectors with rank/select, and unary-coded integer streams.

Layout: bits are packed little-endian into 64-bit words (bit ``i`` is bit
``i & 63`` of word ``i >> 6``). Vectors longer than one superblock (512 bits)
carry a two-level rank directory:

* ``super[s]``: 32-bit count of ones before superblock ``s``;
* ``sub[w]``: 16-bit count of ones between the start of word ``w``'s
  superblock and word ``w``;

Select binary-searches the directory. The directory costs 0.3125 bits per
bit; vectors of at most eight words keep none and count their words when
loaded.
"""
from __future__ import annotations

import bisect
from typing import Iterable, Sequence

import numpy as np

from .binio import FormatError, Reader, Writer

WORD = 64
SUPER_WORDS = 8
SUPER_BITS = WORD * SUPER_WORDS


def _select_in_word(word: int, j: int) -> int:
    """Bit position of the j-th (1-based) set bit of ``word``."""
    for _ in range(j - 1):
        word &= word - 1
    return (word & -word).bit_length() - 1


def _words_from_bools(bits: Sequence[bool] | np.ndarray) -> tuple[list[int], int]:
    arr = np.asarray(bits, dtype=np.uint8).ravel()
    n = int(arr.size)
    nwords = (n + WORD - 1) // WORD
    packed = np.packbits(arr, bitorder="little")
    padded = np.zeros(nwords * 8, dtype=np.uint8)
    padded[:packed.size] = packed
    return padded.view("<u8").tolist(), n


class BitVector:
    """Immutable bit vector supporting rank and select in either bit value."""

    __slots__ = ("length", "words", "ones", "_super", "_sub", "cum")

    def __init__(self, bits: Iterable[bool] | np.ndarray = ()):
        if not isinstance(bits, np.ndarray):
            bits = list(bits)
        words, n = _words_from_bools(bits)
        self._setup(words, n)

    @classmethod
    def from_words(cls, words: list[int], length: int) -> "BitVector":
        bv = cls.__new__(cls)
        bv._setup(words, length)
        return bv

    def _setup(self, words: list[int], length: int) -> None:
        if len(words) != (length + WORD - 1) // WORD:
            raise FormatError(f"{len(words)} words cannot hold exactly {length} bits")
        tail = length & (WORD - 1)
        if tail and words[-1] >> tail:
            raise FormatError("bits set beyond the vector length")
        self.length = length
        self.words = words
        self.ones = sum(w.bit_count() for w in words)
        self._super: list[int] = []
        self._sub: list[int] = []
        if len(words) > SUPER_WORDS:
            self._build_directory()
            sup, sub = self._super, self._sub
            cum = [sup[w >> 3] + sub[w] for w in range(len(words))]
        else:
            cum = []
            t = 0
            for word in words:
                cum.append(t)
                t += word.bit_count()
        # In-memory decoding of the directory: ones before each word.
        cum.append(self.ones)
        self.cum = cum

    def _build_directory(self) -> None:
        sup, sub = self._super, self._sub
        total = 0
        base = 0
        for w, word in enumerate(self.words):
            if w % SUPER_WORDS == 0:
                sup.append(total)
                base = total
            sub.append(total - base)
            total += word.bit_count()

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> bool:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return bool((self.words[i >> 6] >> (i & 63)) & 1)

    def __iter__(self):
        for i in range(self.length):
            yield bool((self.words[i >> 6] >> (i & 63)) & 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.length == other.length and self.words == other.words

    def __repr__(self) -> str:
        s = "".join("1" if b else "0" for b in self) if self.length <= 64 else f"<{self.length} bits>"
        return f"BitVector({s})"

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self)

    @property
    def zeros(self) -> int:
        return self.length - self.ones

    def rank1(self, i: int) -> int:
        """Number of ones in positions ``[0, i)``."""
        if not 0 <= i <= self.length:
            raise IndexError(f"rank position {i} outside [0, {self.length}]")
        w = i >> 6
        if i & 63:
            return self.cum[w] + (self.words[w] & ((1 << (i & 63)) - 1)).bit_count()
        return self.cum[w]

    def rank0(self, i: int) -> int:
        return i - self.rank1(i)

    def rank(self, bit: int, i: int) -> int:
        return self.rank1(i) if bit else i - self.rank1(i)

    def select1(self, j: int) -> int:
        """0-based position of the j-th one (``j >= 1``)."""
        if not 1 <= j <= self.ones:
            raise IndexError(f"select1({j}) but the vector holds {self.ones} ones")
        w = bisect.bisect_left(self.cum, j) - 1
        return w * WORD + _select_in_word(self.words[w], j - self.cum[w])

    def select0(self, j: int) -> int:
        """0-based position of the j-th zero (``j >= 1``)."""
        if not 1 <= j <= self.zeros:
            raise IndexError(f"select0({j}) but the vector holds {self.zeros} zeros")
        cum = self.cum
        w = bisect.bisect_left(range(len(cum)), j, key=lambda k: k * WORD - cum[k]) - 1
        # Bits beyond the length are zero in storage; j never reaches them.
        return w * WORD + _select_in_word(~self.words[w] & ((1 << WORD) - 1), j - (w * WORD - cum[w]))

    def select(self, bit: int, j: int) -> int:
        return self.select1(j) if bit else self.select0(j)

    def directory_bits(self) -> int:
        return 32 * len(self._super) + 16 * len(self._sub)

    def write(self, w: Writer) -> None:
        w.u64(self.length)
        for word in self.words:
            w.u64(word)
        if self._super:
            w.raw(np.asarray(self._super, dtype="<u4").tobytes())
            w.raw(np.asarray(self._sub, dtype="<u2").tobytes())

    @classmethod
    def read(cls, r: Reader) -> "BitVector":
        length = r.u64()
        nwords = (length + WORD - 1) // WORD
        words = np.frombuffer(r.raw(8 * nwords), dtype="<u8").tolist()
        bv = cls.from_words(words, length)
        if bv._super:
            sup = np.frombuffer(r.raw(4 * len(bv._super)), dtype="<u4").tolist()
            sub = np.frombuffer(r.raw(2 * len(bv._sub)), dtype="<u2").tolist()
            if (sup, sub) != (bv._super, bv._sub):
                raise FormatError("stored rank directory disagrees with the bits")
        return bv

    def to_bytes(self) -> bytes:
        w = Writer()
        self.write(w)
        return w.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "BitVector":
        return cls.read(Reader(data))


class UnaryStream:
    """Non-negative integers coded as ``0^k 1`` one after another."""

    __slots__ = ("bits",)

    def __init__(self, bits: BitVector):
        self.bits = bits

    def __len__(self) -> int:
        return self.bits.ones

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < len(self):
            raise IndexError(i)
        start = self.bits.select1(i) + 1 if i else 0
        return self.bits.select1(i + 1) - start

    def __eq__(self, other: object) -> bool:
        return isinstance(other, UnaryStream) and self.bits == other.bits

    @property
    def bit_length(self) -> int:
        return self.bits.length


def unary_bits(ks: Iterable[int]) -> list[bool]:
    out: list[bool] = []
    for k in ks:
        if k < 0:
            raise ValueError(f"cannot unary-code negative value {k}")
        out.extend([False] * k)
        out.append(True)
    return out


def unary_encode(ks: Iterable[int]) -> UnaryStream:
    return UnaryStream(BitVector(unary_bits(ks)))


def unary_decode(stream: UnaryStream | BitVector) -> list[int]:
    bits = stream.bits if isinstance(stream, UnaryStream) else stream
    out = []
    k = 0
    for b in bits:
        if b:
            out.append(k)
            k = 0
        else:
            k += 1
    if k:
        raise FormatError(f"unary stream ends inside a code ({k} trailing zeros)")
    return out
