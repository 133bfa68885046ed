"""Little-endian binary writer/reader used by every serializer."""
from __future__ import annotations

import struct
from typing import Sequence

import numpy as np

_U8 = struct.Struct("<B")
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_I64 = struct.Struct("<q")


class FormatError(ValueError):
    """Malformed or truncated binary data."""


def width_for(max_value: int) -> int:
    """Bits needed to store every integer in ``[0, max_value]``."""
    return max(1, int(max_value).bit_length())


def pack_ints(values: Sequence[int], width: int) -> bytes:
    if not len(values):
        return b""
    arr = np.asarray(values, dtype=np.int64)
    if arr.min() < 0 or (width < 63 and arr.max() >> width):
        raise ValueError(f"values do not fit in {width} unsigned bits")
    bits = (arr[:, None] >> np.arange(width, dtype=np.int64)) & 1
    return np.packbits(bits.astype(np.uint8).ravel(), bitorder="little").tobytes()


def unpack_ints(data: bytes, count: int, width: int) -> list[int]:
    if not count:
        return []
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    bits = bits[:count * width].reshape(count, width).astype(np.int64)
    return (bits << np.arange(width, dtype=np.int64)).sum(axis=1).tolist()


class Writer:
    def __init__(self):
        self._parts: list[bytes] = []
        self.size = 0

    def _put(self, b: bytes) -> None:
        self._parts.append(b)
        self.size += len(b)

    def u8(self, v: int) -> None:
        self._put(_U8.pack(v))

    def u32(self, v: int) -> None:
        self._put(_U32.pack(v))

    def u64(self, v: int) -> None:
        self._put(_U64.pack(v))

    def i64(self, v: int) -> None:
        self._put(_I64.pack(v))

    def raw(self, b: bytes) -> None:
        self._put(b)

    def ints(self, values: Sequence[int], signed: bool = False) -> None:
        """Length-prefixed bit-packed integer array.

        Signed arrays are stored with an offset of ``-min``; the smallest
        width that holds every value is chosen automatically.
        """
        values = list(values)
        base = min(values) if (signed and values) else 0
        shifted = [v - base for v in values] if base else values
        width = width_for(max(shifted)) if shifted else 1
        self.u32(len(values))
        self.u8(width)
        if signed:
            self.i64(base)
        self._put(pack_ints(shifted, width))

    def getvalue(self) -> bytes:
        return b"".join(self._parts)


class Reader:
    def __init__(self, data: bytes, pos: int = 0):
        self.data = memoryview(data)
        self.pos = pos

    def _take(self, n: int) -> memoryview:
        if self.pos + n > len(self.data):
            raise FormatError(f"truncated data: need {n} bytes at offset {self.pos}, have {len(self.data) - self.pos}")
        b = self.data[self.pos:self.pos + n]
        self.pos += n
        return b

    def u8(self) -> int:
        return _U8.unpack(self._take(1))[0]

    def u32(self) -> int:
        return _U32.unpack(self._take(4))[0]

    def u64(self) -> int:
        return _U64.unpack(self._take(8))[0]

    def i64(self) -> int:
        return _I64.unpack(self._take(8))[0]

    def raw(self, n: int) -> bytes:
        return bytes(self._take(n))

    def ints(self, signed: bool = False) -> list[int]:
        count = self.u32()
        width = self.u8()
        base = self.i64() if signed else 0
        nbytes = (count * width + 7) // 8
        vals = unpack_ints(bytes(self._take(nbytes)), count, width)
        if base:
            vals = [v + base for v in vals]
        return vals

    def at_end(self) -> bool:
        return self.pos == len(self.data)
