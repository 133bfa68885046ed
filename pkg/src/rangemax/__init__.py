"""Static 2D range-maxima queries over points in rank space."""
from .core import Candidate, PointSet, QueryRect, brute_force_max, rank_reduce
from .index import RangeMaxIndex
from .serialize import dumps, load, loads, save, space_report

__all__ = ["Candidate", "PointSet", "QueryRect", "RangeMaxIndex", "brute_force_max",
           "dumps", "load", "loads", "rank_reduce", "save", "space_report"]
