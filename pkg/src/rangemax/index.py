"""The complete range-maxima index over a rank-space point set."""
from __future__ import annotations

from typing import Optional

from .core import Candidate, PointSet, QueryRect
from .global_index import Globals
from .tree import BuildConfig, Node, TreeStats, build_tree, make_config, pad_points, query_tree


class RangeMaxIndex:
    """Global structures plus the recursive tree over the padded point set."""

    def __init__(self, cfg: BuildConfig, g: Globals, root: Node):
        self.cfg = cfg
        self.g = g
        self.root = root

    @classmethod
    def build(cls, ps: PointSet, base_threshold: Optional[int] = None,
              lambda_override: Optional[int] = None) -> "RangeMaxIndex":
        cfg = make_config(ps.n, base_threshold, lambda_override)
        g = Globals(pad_points(ps, cfg.n_pad))
        return cls(cfg, g, build_tree(g, cfg))

    @property
    def n(self) -> int:
        return self.cfg.n

    @property
    def depth(self) -> int:
        return self.cfg.depth

    def query(self, r: QueryRect, st: Optional[TreeStats] = None) -> Optional[Candidate]:
        """Highest-priority point inside ``r``; open sides use NEG_INF / POS_INF."""
        r = r.clip(0, self.n - 1, 0, self.n - 1)
        if r.is_empty():
            return None
        c = query_tree(self.g, self.root, r, st)
        if c is None:
            return None
        return Candidate(c.x, c.y, c.priority - (self.cfg.n_pad - self.cfg.n))

    def points(self) -> PointSet:
        """The unpadded input point set, recovered from the global store."""
        n, shift = self.cfg.n, self.cfg.n_pad - self.cfg.n
        return PointSet(self.g.X[:n], [p - shift for p in self.g.pi[:n]])

    def nodes(self):
        return self.root.walk()
