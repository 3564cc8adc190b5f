"""Rooted metric trees with exact lengths, and the dyadic Ważewski approximants.

A tree on vertices ``0..n-1`` is stored as a parent array (``parent[0] == -1``
for the root) plus the length of the edge from each vertex up to its parent.
Parents need not have smaller ids: splitting an edge inserts a new vertex
above an old one.

Trees built by :func:`wazewski_approximant` carry a construction log that
records, per vertex, the level it appeared at and how (tip of a new branch or
subdivision point of an older edge).  Stages of the construction and the
bonding maps between them are read off that log.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .complex_core import fraction_to_json, to_fraction
from .errors import DomainError, MalformedInput


@dataclass(frozen=True)
class TreePoint:
    """Point on the edge above ``v`` at distance ``t`` below ``parent(v)``.

    ``TreePoint(0, 0)`` is the root.
    """

    v: int
    t: Fraction

    def __post_init__(self):
        object.__setattr__(self, "t", to_fraction(self.t))


ROOT = TreePoint(0, Fraction(0))


@dataclass
class ConstructionLog:
    """Per-vertex provenance.  ``kind`` is ``root``, ``tip`` or ``split``.

    For a split vertex, ``split[v] = (upper, lower, s)``: it was inserted on
    the then-existing edge from ``upper`` down to ``lower`` at fraction ``s``.
    ``edge_level[v]`` is the level of the branch the edge above ``v`` belongs to.
    """

    level: list
    kind: list
    edge_level: list
    split: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "level": list(self.level),
            "kind": list(self.kind),
            "edge_level": list(self.edge_level),
            "split": {str(v): [u, w, fraction_to_json(s)] for v, (u, w, s) in sorted(self.split.items())},
        }

    @classmethod
    def from_json(cls, doc):
        split = {int(k): (int(u), int(w), to_fraction(s)) for k, (u, w, s) in doc.get("split", {}).items()}
        return cls(list(doc["level"]), list(doc["kind"]), list(doc["edge_level"]), split)

    @property
    def depth(self):
        return max(self.level, default=0)


class PointedTree:
    def __init__(self, parent, lengths, log: ConstructionLog | None = None):
        self.parent = tuple(int(p) for p in parent)
        n = len(self.parent)
        if n == 0 or self.parent[0] != -1:
            raise MalformedInput("vertex 0 must be the root (parent -1)")
        self.lengths = tuple([Fraction(0)] + [to_fraction(x) for x in list(lengths)[1:]])
        if len(self.lengths) != n:
            raise MalformedInput("lengths must have one entry per vertex")
        for v in range(1, n):
            if not 0 <= self.parent[v] < n or self.parent[v] == v:
                raise MalformedInput(f"vertex {v} has invalid parent {self.parent[v]}")
            if self.lengths[v] <= 0:
                raise MalformedInput(f"edge above vertex {v} has non-positive length")
        self.log = log
        self.depths  # detects cycles

    @classmethod
    def trivial(cls):
        return cls([-1], [0])

    @classmethod
    def path(cls, lengths):
        lengths = list(lengths)
        return cls([-1] + list(range(len(lengths))), [0] + lengths)

    @classmethod
    def star(cls, lengths):
        return cls([-1] + [0] * len(lengths), [0] + list(lengths))

    def __len__(self):
        return len(self.parent)

    @property
    def is_trivial(self):
        return len(self.parent) == 1

    def __repr__(self):
        return f"PointedTree({len(self)} vertices)"

    @cached_property
    def children(self):
        ch = [[] for _ in self.parent]
        for v in range(1, len(self.parent)):
            ch[self.parent[v]].append(v)
        return ch

    @cached_property
    def order(self):
        """Vertices in BFS order from the root."""
        out = [0]
        for v in out:
            out.extend(self.children[v])
        if len(out) != len(self.parent):
            raise MalformedInput("parent array contains a cycle")
        return out

    @cached_property
    def depths(self):
        d = [Fraction(0)] * len(self.parent)
        for v in self.order[1:]:
            d[v] = d[self.parent[v]] + self.lengths[v]
        return d

    @cached_property
    def _hops(self):
        h = [0] * len(self.parent)
        for v in self.order[1:]:
            h[v] = h[self.parent[v]] + 1
        return h

    def degree(self, v):
        return len(self.children[v]) + (v != 0)

    def branch_points(self):
        return [v for v in range(len(self)) if self.degree(v) >= 3]

    def leaves(self):
        return [v for v in range(1, len(self)) if not self.children[v]]

    def edges(self):
        return [(self.parent[v], v, self.lengths[v]) for v in range(1, len(self))]

    @cached_property
    def total_length(self):
        return sum(self.lengths, Fraction(0))

    # -- points --------------------------------------------------------------

    def check_point(self, p: TreePoint):
        if not 0 <= p.v < len(self) or not 0 <= p.t <= self.lengths[p.v]:
            raise DomainError(f"{p} is not a point of the tree", "invalid-point")

    def depth_of(self, p: TreePoint) -> Fraction:
        self.check_point(p)
        if p.v == 0:
            return Fraction(0)
        return self.depths[self.parent[p.v]] + p.t

    def lca(self, a, b):
        h = self._hops
        while h[a] > h[b]:
            a = self.parent[a]
        while h[b] > h[a]:
            b = self.parent[b]
        while a != b:
            a, b = self.parent[a], self.parent[b]
        return a

    def is_ancestor(self, a, b):
        """True if vertex ``a`` lies on the path from ``b`` to the root."""
        h = self._hops
        while h[b] > h[a]:
            b = self.parent[b]
        return a == b

    def distance(self, p: TreePoint, q: TreePoint) -> Fraction:
        dp, dq = self.depth_of(p), self.depth_of(q)
        if p.v == q.v:
            return abs(dp - dq)
        if self.is_ancestor(p.v, q.v):
            return dq - dp
        if self.is_ancestor(q.v, p.v):
            return dp - dq
        w = self.lca(p.v, q.v)
        return dp + dq - 2 * self.depths[w]

    def vertex_point(self, v) -> TreePoint:
        return TreePoint(v, self.lengths[v])

    def toward_root(self, p: TreePoint, s) -> TreePoint:
        """The point reached from ``p`` after moving distance ``s`` toward the root."""
        s = to_fraction(s)
        self.check_point(p)
        v, t = p.v, p.t
        while v != 0 and s > t:
            s -= t
            v = self.parent[v]
            t = self.lengths[v]
        if v == 0:
            return ROOT
        return TreePoint(v, t - s)

    # -- global shape --------------------------------------------------------

    def _farthest(self, src):
        adj = [[] for _ in self.parent]
        for v in range(1, len(self)):
            u = self.parent[v]
            adj[u].append((v, self.lengths[v]))
            adj[v].append((u, self.lengths[v]))
        dist = {src: Fraction(0)}
        stack = [src]
        while stack:
            x = stack.pop()
            for y, ln in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + ln
                    stack.append(y)
        far = max(dist, key=lambda v: (dist[v], -v))
        return far, dist[far]

    @cached_property
    def diameter(self) -> Fraction:
        a, _ = self._farthest(0)
        _, d = self._farthest(a)
        return d

    @cached_property
    def height(self) -> Fraction:
        return max(self.depths)

    def scaled(self, c) -> "PointedTree":
        c = to_fraction(c)
        if c <= 0:
            raise ValueError("scale factor must be positive")
        return PointedTree(self.parent, [x * c for x in self.lengths], self.log)

    @cached_property
    def canonical_code(self):
        """Isometry invariant of the pointed tree.

        Degree-2 vertices other than the root are suppressed, then each
        subtree is encoded as the sorted tuple of ``(edge length, child code)``.
        Two pointed trees are isometric by a root-preserving isometry iff
        their codes agree.
        """
        codes = {}
        for v in reversed(self.order):
            items = []
            for c in self.children[v]:
                ln, w = self.lengths[c], c
                while len(self.children[w]) == 1:
                    w = self.children[w][0]
                    ln += self.lengths[w]
                items.append((ln, codes[w]))
            codes[v] = tuple(sorted(items))
        return codes[0]

    def stage(self, n) -> "PointedTree":
        """The level-``n`` stage of a logged construction, vertices renumbered."""
        log = self.require_log()
        keep = [v for v in self.order if log.level[v] <= n]
        index = {v: k for k, v in enumerate(keep)}
        parent, lengths = [-1], [Fraction(0)]
        for v in keep[1:]:
            ln, u = self.lengths[v], self.parent[v]
            while log.level[u] > n:
                ln += self.lengths[u]
                u = self.parent[u]
            parent.append(index[u])
            lengths.append(ln)
        return PointedTree(parent, lengths)

    def require_log(self) -> ConstructionLog:
        if self.log is None:
            raise DomainError("tree has no construction log", "missing-construction-log")
        return self.log

    # -- JSON ----------------------------------------------------------------

    def to_json(self):
        doc = {
            "schema_version": 1,
            "parent": list(self.parent),
            "lengths": [fraction_to_json(x) for x in self.lengths],
        }
        if self.log is not None:
            doc["log"] = self.log.to_json()
        return doc

    @classmethod
    def from_json(cls, doc):
        try:
            log = ConstructionLog.from_json(doc["log"]) if "log" in doc else None
            return cls(doc["parent"], doc["lengths"], log)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise MalformedInput(f"bad tree JSON: {exc}") from exc


def wazewski_approximant(k: int, b: int = 3, lam=Fraction(1, 2)) -> PointedTree:
    """Finite dyadic approximant of the universal dendrite.

    Level 0 is the unit segment from the root.  At each level ``j = 1..k``
    every existing vertex, and every point lying at a multiple of ``2**-j``
    along an edge (measured from the top of the branch that edge belongs to),
    receives ``b`` new branches of length ``lam**j``.

    Parameters
    ----------
    k : int
        Depth, ``k >= 0``.
    b : int
        Branches added per site and level, ``b >= 3``.
    lam : rational in (0, 1)
        Length decay per level.

    Returns
    -------
    PointedTree
        Carries a :class:`ConstructionLog`; vertex ids of the depth-``k``
        tree extend those of the depth-``k-1`` tree.
    """
    lam = to_fraction(lam)
    if k < 0 or b < 3 or not 0 < lam < 1:
        raise ValueError("need k >= 0, b >= 3 and 0 < lam < 1")
    parent = [-1, 0]
    lengths = [Fraction(0), Fraction(1)]
    # offset of each vertex from the top of the branch its upper edge belongs to
    offset = [Fraction(0), Fraction(1)]
    log = ConstructionLog(level=[0, 0], kind=["root", "tip"], edge_level=[0, 0])
    for j in range(1, k + 1):
        step = Fraction(1, 2 ** j)
        n_before = len(parent)
        # subdivide each edge at the new dyadic offsets of its branch
        for v in range(1, n_before):
            upper, ln = parent[v], lengths[v]
            top = offset[v] - ln
            cuts = []
            m = top // step + 1
            while m * step < offset[v]:
                cuts.append(m * step)
                m += 1
            prev, prev_off = upper, top
            for a in cuts:
                w = len(parent)
                parent.append(prev)
                lengths.append(a - prev_off)
                offset.append(a)
                log.level.append(j)
                log.kind.append("split")
                log.edge_level.append(log.edge_level[v])
                log.split[w] = (upper, v, (a - top) / ln)
                prev, prev_off = w, a
            parent[v] = prev
            lengths[v] = offset[v] - prev_off
        for s in range(len(parent)):
            for _ in range(b):
                parent.append(s)
                lengths.append(lam ** j)
                offset.append(lam ** j)
                log.level.append(j)
                log.kind.append("tip")
                log.edge_level.append(j)
    return PointedTree(parent, lengths, log)


def covering_radius(tree: PointedTree, centers) -> Fraction:
    """Exact sup over all tree points of the distance to the nearest center vertex."""
    centers = list(centers)
    if not centers:
        return None
    adj = [[] for _ in tree.parent]
    for u, v, ln in tree.edges():
        adj[u].append((v, ln))
        adj[v].append((u, ln))
    dist = {c: Fraction(0) for c in centers}
    heap = [(Fraction(0), c) for c in centers]
    heapq.heapify(heap)
    while heap:
        d, x = heapq.heappop(heap)
        if d > dist[x]:
            continue
        for y, ln in adj[x]:
            nd = d + ln
            if y not in dist or nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return max((dist[u] + dist[v] + ln) / 2 for u, v, ln in tree.edges()) if len(tree) > 1 else Fraction(0)
