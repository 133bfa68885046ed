"""Independent reference implementations used by the tests.

Nothing here imports the structures under test; inputs are plain lists.
"""
from __future__ import annotations

INF = float("inf")


def scan_max(ups, pri, x_lo, x_hi, y_lo, y_hi):
    """(x, y, priority) of the best point in the inclusive box, or None."""
    best = None
    for x in range(max(x_lo, 0), min(x_hi, len(ups) - 1) + 1):
        y = ups[x]
        if y_lo <= y <= y_hi and (best is None or pri[x] > best[2]):
            best = (x, y, pri[x])
    return best


def dominance_max(ups, pri, qx, qy):
    """Best point with x <= qx and y >= qy (open top-left quadrant)."""
    return scan_max(ups, pri, 0, qx, qy, len(ups) - 1)


def influence_segments(ups, pri):
    """Per point ``(y, x_start, x_end, empty)`` from the quadrant semantics.

    The segment of point ``p`` is the set of columns ``c`` at which the
    quadrant query with corner ``(c, y_p)`` answers ``p``; ``x_end`` is
    ``None`` when that set runs to the last column.
    """
    n = len(ups)
    out = []
    for p in range(n):
        cols = [c for c in range(n) if (dominance_max(ups, pri, c, ups[p]) or (None,))[0] == p]
        if not cols:
            out.append((ups[p], p, p, True))
            continue
        assert cols == list(range(cols[0], cols[-1] + 1)), "segment is not contiguous"
        out.append((ups[p], cols[0], None if cols[-1] == n - 1 else cols[-1] + 1, False))
    return out


def exhaustive_answers(ups, pri):
    """Yield ``((x_lo, x_hi, y_lo, y_hi), best)`` for every non-empty 4-sided box.

    Incremental in ``x_hi`` so the whole sweep costs O(n^4).
    """
    n = len(ups)
    for y_lo in range(n):
        for y_hi in range(y_lo, n):
            for x_lo in range(n):
                best = None
                for x_hi in range(x_lo, n):
                    y = ups[x_hi]
                    if y_lo <= y <= y_hi and (best is None or pri[x_hi] > best[2]):
                        best = (x_hi, y, pri[x_hi])
                    yield (x_lo, x_hi, y_lo, y_hi), best


def range_max_1d(a, i, j):
    """Index of the maximum of ``a[i..j]`` (ties to the right-most)."""
    best = i
    for t in range(i, j + 1):
        if a[t] >= a[best]:
            best = t
    return best
