"""Finite metric multigraphs: pruning to the core skeleton, cycle rank, exact distances."""

from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .complex_core import fraction_to_json, to_fraction
from .errors import DomainError, MalformedInput


@dataclass(frozen=True)
class Edge:
    id: int
    u: object
    v: object
    length: Fraction

    @property
    def is_loop(self):
        return self.u == self.v

    def other(self, w):
        return self.v if w == self.u else self.u


@dataclass(frozen=True)
class GraphPoint:
    """Point on edge ``edge`` at distance ``t`` from its tail ``u``."""

    edge: int
    t: Fraction

    def __post_init__(self):
        object.__setattr__(self, "t", to_fraction(self.t))


class MetricGraph:
    """Multigraph with positive rational edge lengths; loops and parallel edges allowed.

    Edge ids are preserved by :meth:`subgraph`, so a pruned graph can be
    compared edge-for-edge with its parent.
    """

    def __init__(self, vertices, edges, allow_disconnected=False):
        self.vertices = tuple(vertices)
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise MalformedInput("duplicate vertex ids")
        es = []
        for k, e in enumerate(edges):
            if not isinstance(e, Edge):
                u, v, *rest = e
                e = Edge(k, u, v, to_fraction(rest[0]) if rest else Fraction(1))
            else:
                e = Edge(e.id, e.u, e.v, to_fraction(e.length))
            if e.u not in vset or e.v not in vset:
                raise MalformedInput(f"edge {e.id} has an unknown endpoint")
            if e.length <= 0:
                raise MalformedInput(f"edge {e.id} has non-positive length")
            es.append(e)
        self.edges = tuple(es)
        self._by_id = {e.id: e for e in es}
        if len(self._by_id) != len(es):
            raise MalformedInput("duplicate edge ids")
        if not allow_disconnected and not self.is_connected:
            raise DomainError("graph is disconnected", "disconnected-input")

    @classmethod
    def empty(cls):
        return cls((), ())

    @property
    def is_empty(self):
        return not self.vertices

    def __repr__(self):
        if self.is_empty:
            return "MetricGraph(empty)"
        return f"MetricGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    def __eq__(self, other):
        return (isinstance(other, MetricGraph) and set(self.vertices) == set(other.vertices)
                and set(self.edges) == set(other.edges))

    def __hash__(self):
        return hash(frozenset(self.edges))

    def edge(self, eid) -> Edge:
        return self._by_id[eid]

    @cached_property
    def incidence(self):
        inc = defaultdict(list)
        for e in self.edges:
            inc[e.u].append(e)
            if not e.is_loop:
                inc[e.v].append(e)
        return inc

    def degree(self, v):
        return sum(2 if e.is_loop else 1 for e in self.incidence.get(v, ()))

    @cached_property
    def is_connected(self):
        if not self.vertices:
            return True
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            w = stack.pop()
            for e in self.incidence.get(w, ()):
                x = e.other(w)
                if x not in seen:
                    seen.add(x)
                    stack.append(x)
        return len(seen) == len(self.vertices)

    def require_connected(self):
        if not self.is_connected:
            raise DomainError("graph is disconnected", "disconnected-input")

    def subgraph(self, edge_ids, vertices=None) -> "MetricGraph":
        keep = [e for e in self.edges if e.id in set(edge_ids)]
        if vertices is None:
            used = {e.u for e in keep} | {e.v for e in keep}
            vertices = [v for v in self.vertices if v in used]
        return MetricGraph(vertices, keep, allow_disconnected=True)

    def subdivide(self, eid, t, new_vertex=None) -> "MetricGraph":
        """Split edge ``eid`` at distance ``t`` from its tail.

        The two halves get ids ``eid`` (tail side) and ``max_id + 1``.
        """
        e = self.edge(eid)
        t = to_fraction(t)
        if not 0 < t < e.length:
            raise ValueError("split point must be interior")
        if new_vertex is None:
            new_vertex = _fresh_vertex(self.vertices)
        nid = max(x.id for x in self.edges) + 1
        edges = [x for x in self.edges if x.id != eid]
        edges += [Edge(eid, e.u, new_vertex, t), Edge(nid, new_vertex, e.v, e.length - t)]
        edges.sort(key=lambda x: x.id)
        return MetricGraph(self.vertices + (new_vertex,), edges,
                           allow_disconnected=not self.is_connected)

    @cached_property
    def vertex_distances(self):
        """Exact all-pairs shortest-path distances between vertices."""
        out = {}
        for s in self.vertices:
            dist = {s: Fraction(0)}
            heap = [(Fraction(0), 0, s)]
            order = {v: k for k, v in enumerate(self.vertices)}
            while heap:
                d, _, u = heapq.heappop(heap)
                if d > dist[u]:
                    continue
                for e in self.incidence.get(u, ()):
                    w = e.other(u)
                    nd = d + e.length
                    if w not in dist or nd < dist[w]:
                        dist[w] = nd
                        heapq.heappush(heap, (nd, order[w], w))
            out[s] = dist
        return out

    def point_key(self, p: GraphPoint):
        """Canonical identity of a point: a vertex, or an interior (edge, t)."""
        e = self.edge(p.edge)
        if not 0 <= p.t <= e.length:
            raise DomainError(f"parameter {p.t} outside edge {e.id}", "invalid-point")
        if p.t == 0:
            return ("v", e.u)
        if p.t == e.length:
            return ("v", e.v)
        return ("e", e.id, p.t)

    def vertex_point(self, v) -> GraphPoint:
        for e in self.edges:
            if e.u == v:
                return GraphPoint(e.id, 0)
            if e.v == v:
                return GraphPoint(e.id, e.length)
        raise DomainError(f"vertex {v!r} has no incident edge", "invalid-point")

    @cached_property
    def total_length(self):
        return sum((e.length for e in self.edges), Fraction(0))

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "vertices": list(self.vertices),
            "edges": [{"id": e.id, "u": e.u, "v": e.v, "len": str(e.length)}
                      for e in self.edges],
        }

    @classmethod
    def from_json(cls, doc, allow_disconnected=False) -> "MetricGraph":
        try:
            verts = [_jsonable_vertex(v) for v in doc["vertices"]]
            edges = []
            for k, e in enumerate(doc["edges"]):
                edges.append(Edge(int(e.get("id", k)), _jsonable_vertex(e["u"]),
                                  _jsonable_vertex(e["v"]), to_fraction(e.get("len", 1))))
        except (KeyError, TypeError, AttributeError) as exc:
            raise MalformedInput(f"bad graph JSON: {exc}") from exc
        return cls(verts, edges, allow_disconnected=allow_disconnected)


def _jsonable_vertex(v):
    return tuple(v) if isinstance(v, list) else v


def _fresh_vertex(vertices):
    ints = [v for v in vertices if isinstance(v, int) and not isinstance(v, bool)]
    return max(ints, default=-1) + 1 if len(ints) == len(vertices) else f"s{len(vertices)}"


def core_skeleton(G: MetricGraph) -> MetricGraph:
    """Iteratively delete degree-1 vertices with their edges.

    Returns :meth:`MetricGraph.empty` iff ``G`` is a tree.  Isolated vertices
    left over are dropped.
    """
    G.require_connected()
    alive = {e.id for e in G.edges}
    deg = {v: G.degree(v) for v in G.vertices}
    queue = [v for v in G.vertices if deg[v] == 1]
    while queue:
        v = queue.pop()
        if deg[v] != 1:
            continue
        e = next(e for e in G.incidence[v] if e.id in alive)
        alive.discard(e.id)
        deg[v] = 0
        w = e.other(v)
        deg[w] -= 1
        if deg[w] == 1:
            queue.append(w)
    if not alive:
        return MetricGraph.empty()
    return G.subgraph(alive)


def first_betti(G: MetricGraph) -> int:
    """Cycle rank ``|E| - |V| + 1`` of a connected graph (0 for the empty graph)."""
    G.require_connected()
    if G.is_empty:
        return 0
    return len(G.edges) - len(G.vertices) + 1


def is_tree(G: MetricGraph) -> bool:
    return G.is_connected and first_betti(G) == 0


def _ends(G, p: GraphPoint):
    e = G.edge(p.edge)
    return ((e.u, p.t), (e.v, e.length - p.t))


def shortest_path_metric(G: MetricGraph, p: GraphPoint, q: GraphPoint) -> Fraction:
    """Exact intrinsic distance between two points of ``G``."""
    G.require_connected()
    kp, kq = G.point_key(p), G.point_key(q)
    if kp == kq:
        return Fraction(0)
    best = None
    if p.edge == q.edge:
        best = abs(p.t - q.t)
    vd = G.vertex_distances
    for a, da in _ends(G, p):
        for b, db in _ends(G, q):
            cand = da + vd[a][b] + db
            if best is None or cand < best:
                best = cand
    return best


def bridges(G: MetricGraph) -> set:
    """Ids of edges whose removal disconnects their component."""
    index = {}
    low = {}
    out = set()
    counter = [0]

    def visit(root):
        stack = [(root, None, iter(G.incidence.get(root, ())))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        while stack:
            v, via, it = stack[-1]
            advanced = False
            for e in it:
                if e.id == via:
                    continue
                w = e.other(v)
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append((w, e.id, iter(G.incidence.get(w, ()))))
                    advanced = True
                    break
                low[v] = min(low[v], index[w])
            if not advanced:
                stack.pop()
                if stack:
                    parent = stack[-1][0]
                    low[parent] = min(low[parent], low[v])
                    if low[v] > index[parent]:
                        out.add(via)

    for v in G.vertices:
        if v not in index:
            visit(v)
    return out


def lengths_to_json(lengths):
    return [fraction_to_json(x) for x in lengths]
