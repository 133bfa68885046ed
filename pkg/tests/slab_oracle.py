"""Sorting-based reference for nested slab coordinates."""


def local_coords(points):
    """Map each top-level point of ``points`` to its (x-rank, y-rank) in the set."""
    xr = {p: i for i, p in enumerate(sorted(points))}
    yr = {p: i for i, p in enumerate(sorted(points, key=lambda p: p[1]))}
    return {p: (xr[p], yr[p]) for p in points}


def slab_points(points, axis_vertical, index, k):
    loc = local_coords(points)
    along = 0 if axis_vertical else 1
    return [p for p in points if index * k <= loc[p][along] < index * k + k]
