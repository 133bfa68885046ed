"""Points stored once, with range counting, reporting and selection.

One wavelet matrix over ``X`` (``X[i]`` is the y-coordinate of the point
with x-coordinate ``i``) answers counting and reporting; selection on either
axis uses the matrix over that axis' array. These stand in for the cited
O(log N / log log N) structures: the contracts are identical, the query
costs are O(log N) per level walk instead.
"""
from __future__ import annotations

from typing import Optional, Sequence

from .binio import FormatError, Reader, Writer, width_for
from .bits import BitVector
from .core import QueryRect, PointSet, invert

AXIS_X = 0
AXIS_Y = 1
SCAN_WIDTH = 32


class WaveletMatrix:
    """Wavelet matrix over a sequence of integers in ``[0, sigma)``."""

    def __init__(self, values: Sequence[int], sigma: int):
        self.n = len(values)
        self.sigma = sigma
        self.nlevels = width_for(max(sigma - 1, 0))
        self.levels: list[BitVector] = []
        self.zeros: list[int] = []
        cur = list(values)
        for lvl in range(self.nlevels):
            b = self.nlevels - 1 - lvl
            bits = [(v >> b) & 1 for v in cur]
            self.levels.append(BitVector(bits))
            self.zeros.append(len(cur) - sum(bits))
            cur = [v for v in cur if not (v >> b) & 1] + [v for v in cur if (v >> b) & 1]

    @classmethod
    def _from_parts(cls, n, sigma, levels, zeros):
        wm = cls.__new__(cls)
        wm.n, wm.sigma, wm.levels, wm.zeros = n, sigma, levels, zeros
        wm.nlevels = len(levels)
        return wm

    def count_less(self, s: int, e: int, v: int) -> int:
        """Number of values ``< v`` among positions ``[s, e)``."""
        if s >= e or v <= 0:
            return 0
        if v >> self.nlevels:
            return e - s
        res = 0
        b = self.nlevels
        for bv, z in zip(self.levels, self.zeros):
            b -= 1
            words, cum = bv.words, bv.cum
            os_ = cum[s >> 6] + (words[s >> 6] & ((1 << (s & 63)) - 1)).bit_count() if s & 63 else cum[s >> 6]
            oe = cum[e >> 6] + (words[e >> 6] & ((1 << (e & 63)) - 1)).bit_count() if e & 63 else cum[e >> 6]
            if (v >> b) & 1:
                res += (e - oe) - (s - os_)
                s, e = z + os_, z + oe
            else:
                s, e = s - os_, e - oe
            if s == e:
                break
        return res

    def count_range(self, s: int, e: int, lo: int, hi: int) -> int:
        """Number of values in ``[lo, hi]`` among positions ``[s, e)``."""
        if lo > hi:
            return 0
        return self.count_less(s, e, hi + 1) - self.count_less(s, e, lo)

    def quantile(self, s: int, e: int, k: int) -> int:
        """The ``k``-th smallest (0-based) value among positions ``[s, e)``."""
        if not 0 <= k < e - s:
            raise IndexError(f"quantile rank {k} outside a range of {e - s} values")
        val = 0
        b = self.nlevels
        for bv, z in zip(self.levels, self.zeros):
            b -= 1
            words, cum = bv.words, bv.cum
            os_ = cum[s >> 6] + (words[s >> 6] & ((1 << (s & 63)) - 1)).bit_count() if s & 63 else cum[s >> 6]
            oe = cum[e >> 6] + (words[e >> 6] & ((1 << (e & 63)) - 1)).bit_count() if e & 63 else cum[e >> 6]
            nz = (e - oe) - (s - os_)
            if k < nz:
                s, e = s - os_, e - oe
            else:
                k -= nz
                val |= 1 << b
                s, e = z + os_, z + oe
        return val

    def report(self, s: int, e: int, lo: int, hi: int) -> list[int]:
        """Values in ``[lo, hi]`` among positions ``[s, e)``, in increasing order."""
        out: list[int] = []
        if s >= e or lo > hi:
            return out
        nl = self.nlevels
        stack = [(0, s, e, 0)]
        while stack:
            lvl, s, e, prefix = stack.pop()
            if lvl == nl:
                out.extend([prefix] * (e - s))
                continue
            b = nl - 1 - lvl
            span = (1 << b) - 1
            bv = self.levels[lvl]
            os_ = bv.rank1(s)
            oe = bv.rank1(e)
            one = prefix | (1 << b)
            # Push the 1-child first so the 0-child pops first (ascending output).
            if oe > os_ and one <= hi and one + span >= lo:
                z = self.zeros[lvl]
                stack.append((lvl + 1, z + os_, z + oe, one))
            if (e - oe) > (s - os_) and prefix <= hi and prefix + span >= lo:
                stack.append((lvl + 1, s - os_, e - oe, prefix))
        return out

    def write(self, w: Writer) -> None:
        w.u64(self.n)
        w.u64(self.sigma)
        w.u32(self.nlevels)
        w.ints(self.zeros)
        for bv in self.levels:
            bv.write(w)

    @classmethod
    def read(cls, r: Reader) -> "WaveletMatrix":
        n = r.u64()
        sigma = r.u64()
        nl = r.u32()
        zeros = r.ints()
        if len(zeros) != nl:
            raise FormatError("wavelet matrix level count mismatch")
        levels = [BitVector.read(r) for _ in range(nl)]
        if any(len(bv) != n for bv in levels):
            raise FormatError("wavelet matrix level length mismatch")
        return cls._from_parts(n, sigma, levels, zeros)

    def bit_size(self) -> int:
        return sum(bv.length + bv.directory_bits() for bv in self.levels)


class Globals:
    """The global point store shared by every recursive problem.

    Priorities are kept here too (``pi``): candidates from different terminal
    structures are compared by priority, and the point data is the one place
    that owns them.
    """

    def __init__(self, ps: PointSet):
        self.n = ps.n
        self.X = list(ps.upsilon)
        self.Y = invert(self.X)
        self.pi = list(ps.pi)
        self._wx = WaveletMatrix(self.X, self.n)
        self._wy = WaveletMatrix(self.Y, self.n)

    @classmethod
    def _from_parts(cls, X, pi, wx, wy) -> "Globals":
        g = cls.__new__(cls)
        g.n = len(X)
        g.X = X
        g.Y = invert(X)
        g.pi = pi
        g._wx, g._wy = wx, wy
        return g

    def count(self, x_lo: int, x_hi: int, y_lo: int, y_hi: int) -> int:
        """Points in the inclusive box; bounds may exceed ``[0, n)``."""
        if x_lo < 0:
            x_lo = 0
        if x_hi >= self.n:
            x_hi = self.n - 1
        if x_lo > x_hi or y_lo > y_hi:
            return 0
        return self._wx.count_range(x_lo, x_hi + 1, y_lo, y_hi)

    def report(self, x_lo: int, x_hi: int, y_lo: int, y_hi: int) -> list[tuple[int, int]]:
        x_lo = max(x_lo, 0)
        x_hi = min(x_hi, self.n - 1)
        y_lo = max(y_lo, 0)
        y_hi = min(y_hi, self.n - 1)
        if x_lo > x_hi or y_lo > y_hi:
            return []
        X, Y = self.X, self.Y
        # Narrow ranges: a bounded scan beats walking the levels.
        if x_hi - x_lo < SCAN_WIDTH:
            return [(x, X[x]) for x in range(x_lo, x_hi + 1) if y_lo <= X[x] <= y_hi]
        if y_hi - y_lo < SCAN_WIDTH:
            return sorted((Y[y], y) for y in range(y_lo, y_hi + 1) if x_lo <= Y[y] <= x_hi)
        xs = sorted(Y[y] for y in self._wx.report(x_lo, x_hi + 1, y_lo, y_hi))
        return [(x, X[x]) for x in xs]

    def select(self, axis: int, i: int, j: int, k: int) -> int:
        """Index in ``[i, j]`` holding the k-th smallest (1-based) of A[i..j]."""
        if not 0 <= i <= j < self.n:
            raise IndexError(f"range [{i}, {j}] outside [0, {self.n})")
        if not 1 <= k <= j - i + 1:
            raise IndexError(f"ordinal {k} outside [1, {j - i + 1}]")
        if axis == AXIS_X:
            return self.Y[self._wx.quantile(i, j + 1, k - 1)]
        if axis == AXIS_Y:
            return self.X[self._wy.quantile(i, j + 1, k - 1)]
        raise ValueError(f"unknown axis {axis!r}")

    def write(self, w: Writer) -> None:
        w.ints(self.X)
        w.ints(self.pi)
        self._wx.write(w)
        self._wy.write(w)

    @classmethod
    def read(cls, r: Reader) -> "Globals":
        X = r.ints()
        pi = r.ints()
        wx = WaveletMatrix.read(r)
        wy = WaveletMatrix.read(r)
        return cls._from_parts(X, pi, wx, wy)


def build_globals(ps: PointSet) -> Globals:
    return Globals(ps)


def range_count(g: Globals, r: QueryRect) -> int:
    return g.count(r.x_lo, r.x_hi, r.y_lo, r.y_hi)


def range_report(g: Globals, r: QueryRect) -> list[tuple[int, int]]:
    return g.report(r.x_lo, r.x_hi, r.y_lo, r.y_hi)


def range_select(g: Globals, axis: int, i: int, j: int, k: int) -> int:
    return g.select(axis, i, j, k)


def max_point(g: Globals, x_lo: int, x_hi: int, y_lo: int, y_hi: int) -> Optional[int]:
    """Brute-force argmax over the reported points; a test convenience."""
    pts = g.report(x_lo, x_hi, y_lo, y_hi)
    if not pts:
        return None
    return max(pts, key=lambda p: g.pi[p[0]])[0]
