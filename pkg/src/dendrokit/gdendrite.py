"""Graphs with pointed trees glued on at finitely many sites.

A point of a :class:`GDendrite` is either a :class:`GraphPoint` of the base
graph or a :class:`FiberPoint` (a site together with a point of the tree
attached there).  Distances combine the tree metric, the graph metric and the
tree metric again, so the base sits inside isometrically and every fiber
retracts onto its site.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .complex_core import fraction_to_json, to_fraction
from .errors import DomainError, MalformedInput
from .graph_topology import GraphPoint, MetricGraph, core_skeleton, shortest_path_metric
from .trees import ROOT, PointedTree, TreePoint, wazewski_approximant

EXEMPT_FIBERS = 8
DEFAULT_LAMBDA = Fraction(1, 2)


@dataclass(frozen=True)
class FiberPoint:
    site: GraphPoint
    point: TreePoint


class GeometricDecay:
    """``decay(k) = lam**k``."""

    def __init__(self, lam=DEFAULT_LAMBDA):
        self.lam = to_fraction(lam)

    def __call__(self, k):
        return self.lam ** k

    def to_json(self):
        return {"kind": "geometric", "lambda": fraction_to_json(self.lam)}


class HarmonicDecay:
    """``decay(k) = 1/k``, slow enough for fibers of diameter ``1/r``."""

    def __call__(self, k):
        return Fraction(1, max(k, 1))

    def to_json(self):
        return {"kind": "harmonic"}


def decay_from_json(doc):
    if doc is None:
        return GeometricDecay()
    if doc.get("kind") == "harmonic":
        return HarmonicDecay()
    return GeometricDecay(to_fraction(doc.get("lambda", "1/2")))


def _site_sort_key(key):
    # ("v", vertex) or ("e", edge_id, t); vertices first, then by edge and offset
    if key[0] == "v":
        return (0, str(type(key[1]).__name__), str(key[1]), 0, Fraction(0))
    return (1, "", "", key[1], key[2])


class GDendrite:
    """Base graph plus fibers; build with :func:`attach`."""

    def __init__(self, base: MetricGraph, fibers, decay, exempt, scale, site_levels=None):
        self.base = base
        # construction level of each site (None for hand-assembled models)
        self.site_levels = site_levels
        self.fibers = fibers  # tuple of (site GraphPoint, PointedTree), sorted by site
        self.decay = decay
        self.exempt = exempt
        self.scale = scale  # per-fiber rescale factor (1 when untouched)
        self._by_key = {base.point_key(g): k for k, (g, _) in enumerate(fibers)}

    def __repr__(self):
        return f"GDendrite(base={self.base!r}, {len(self.fibers)} fibers)"

    def site_index(self, g: GraphPoint):
        return self._by_key.get(self.base.point_key(g))

    def sites(self):
        return [g for g, _ in self.fibers]

    def sprouting_points(self):
        """Sites whose fiber is not a single point."""
        return [g for g, t in self.fibers if not t.is_trivial]

    def check_point(self, x):
        if isinstance(x, GraphPoint):
            try:
                self.base.point_key(x)
            except KeyError:
                raise DomainError(f"no edge {x.edge} in the base", "invalid-point") from None
            return
        if isinstance(x, FiberPoint):
            k = self.site_index(x.site)
            if k is None:
                raise DomainError(f"{x.site} carries no fiber", "invalid-point")
            self.fibers[k][1].check_point(x.point)
            return
        raise DomainError(f"not a point: {x!r}", "invalid-point")

    def _split(self, x):
        """``(site, tree, tree point)``; base points are their own root."""
        self.check_point(x)
        if isinstance(x, GraphPoint):
            k = self.site_index(x)
            tree = self.fibers[k][1] if k is not None else PointedTree.trivial()
            return x, k, tree, ROOT
        k = self.site_index(x.site)
        return x.site, k, self.fibers[k][1], x.point

    def to_json(self):
        return {
            "schema_version": 1,
            "base": self.base.to_json(),
            "fibers": [
                {"edge": g.edge, "t": fraction_to_json(g.t), "tree": t.to_json(),
                 "scale": fraction_to_json(s)}
                for (g, t), s in zip(self.fibers, self.scale)
            ],
            "decay": self.decay.to_json(),
            "exempt": self.exempt,
            "site_levels": list(self.site_levels) if self.site_levels is not None else None,
        }

    @classmethod
    def from_json(cls, doc):
        try:
            base = MetricGraph.from_json(doc["base"])
            fibers = [(GraphPoint(int(f["edge"]), to_fraction(f["t"])), PointedTree.from_json(f["tree"]))
                      for f in doc["fibers"]]
        except (KeyError, TypeError) as exc:
            raise MalformedInput(f"bad G-dendrite JSON: {exc}") from exc
        X = attach(base, fibers, decay=decay_from_json(doc.get("decay")),
                   exempt=int(doc.get("exempt", EXEMPT_FIBERS)))
        levels = doc.get("site_levels")
        if levels is not None:
            X.site_levels = tuple(int(x) for x in levels)
        return X

    @cached_property
    def flat(self):
        return flatten(self)


def attach(G: MetricGraph, fibers, decay=None, exempt=EXEMPT_FIBERS, rescale=False,
           site_levels=None) -> GDendrite:
    """Glue pointed trees onto ``G``.

    ``fibers`` is an iterable of ``(GraphPoint, PointedTree)`` or a mapping.
    Sorted decreasingly, the diameters ``d_1 >= d_2 >= ...`` of the
    nontrivial fibers must satisfy ``d_r <= decay(r - exempt)`` for every
    ``r > exempt``.  With ``rescale=True`` offending fibers are shrunk
    uniformly to meet the bound instead of being rejected.

    ``site_levels`` optionally maps each site's ``point_key`` to the
    construction level it belongs to; staged views of the model need it.
    """
    G.require_connected()
    decay = decay or GeometricDecay()
    items = list(fibers.items()) if isinstance(fibers, dict) else list(fibers)
    keyed = {}
    for g, tree in items:
        try:
            key = G.point_key(g)
        except KeyError:
            raise DomainError(f"no edge {g.edge} in the base", "invalid-point") from None
        if key in keyed:
            raise DomainError(f"two fibers at site {key}", "duplicate-site")
        keyed[key] = (g, tree)
    order = sorted(keyed, key=_site_sort_key)
    sites = [keyed[k][0] for k in order]
    trees = [keyed[k][1] for k in order]
    scale = [Fraction(1)] * len(trees)
    ranked = sorted((k for k, t in enumerate(trees) if not t.is_trivial),
                    key=lambda k: -trees[k].diameter)
    for r, k in enumerate(ranked, start=1):
        if r <= exempt:
            continue
        bound = decay(r - exempt)
        d = trees[k].diameter
        if d > bound:
            if not rescale:
                raise DomainError(
                    f"fiber diameter {d} at rank {r} exceeds decay bound {bound}", "decay-violation")
            scale[k] = bound / d
            trees[k] = trees[k].scaled(scale[k])
    levels = None
    if site_levels is not None:
        levels = tuple(site_levels[k] for k in order)
    return GDendrite(G, tuple(zip(sites, trees)), decay, exempt, tuple(scale), levels)


def distance(X: GDendrite, x, y) -> Fraction:
    """Exact distance: tree metric within a fiber, else depth + graph distance + depth."""
    gx, kx, tx, px = X._split(x)
    gy, ky, ty, py = X._split(y)
    if kx is not None and kx == ky:
        return tx.distance(px, py)
    return tx.depth_of(px) + shortest_path_metric(X.base, gx, gy) + ty.depth_of(py)


def retraction(X: GDendrite, x) -> GraphPoint:
    """Collapse each fiber onto its site; identity on the base."""
    X.check_point(x)
    return x if isinstance(x, GraphPoint) else x.site


def fiber(X: GDendrite, g: GraphPoint) -> PointedTree:
    k = X.site_index(g)
    return PointedTree.trivial() if k is None else X.fibers[k][1]


def fiber_geodesic(X: GDendrite, x, s):
    """Move ``x`` distance ``s`` along its fiber toward the site (stops there)."""
    X.check_point(x)
    if isinstance(x, GraphPoint):
        return x
    tree = X.fibers[X.site_index(x.site)][1]
    return FiberPoint(x.site, tree.toward_root(x.point, s))


def sample_point(X: GDendrite, rng, denominator=64):
    """Random point with rational coordinates: on the base or inside a fiber, equally likely."""
    live = [k for k, (_, t) in enumerate(X.fibers) if not t.is_trivial]
    if live and rng.random() < 0.5:
        k = live[int(rng.integers(len(live)))]
        g, tree = X.fibers[k]
        v = int(rng.integers(1, len(tree)))
        t = tree.lengths[v] * Fraction(int(rng.integers(0, denominator + 1)), denominator)
        return FiberPoint(g, TreePoint(v, t))
    e = X.base.edges[int(rng.integers(len(X.base.edges)))]
    return GraphPoint(e.id, e.length * Fraction(int(rng.integers(0, denominator + 1)), denominator))


# ---------------------------------------------------------------------------
# the universal construction


def _tent(u, delta):
    return u + delta * (1 - abs(2 * u - 1))


def universal_g_dendrite_approximant(G: MetricGraph, k: int, b: int = 3, lam=DEFAULT_LAMBDA,
                                     offset=0) -> GDendrite:
    """Finite stage of the universal construction over a leafless graph ``G``.

    An edge of length ``L`` is cut into ``ceil(L) * 2**k`` equal steps; the
    step endpoints (vertices included) are the sites.  A site first appearing
    at dyadic scale ``2**-j`` gets ``wazewski_approximant(k - j, b, lam)``
    scaled by ``lam**j``.  Depth 0 gives the bare graph.

    ``offset`` in ``[0, 1/2)`` moves interior sites by a monotone tent map of
    each edge; it changes where the sites are but not which trees grow there.
    """
    offset = to_fraction(offset)
    lam = to_fraction(lam)
    if not 0 <= offset < Fraction(1, 2):
        raise ValueError("offset must lie in [0, 1/2)")
    G.require_connected()
    if G.is_empty or core_skeleton(G) != G:
        raise DomainError("base graph has vertices of degree <= 1", "leafy-base")
    if k == 0:
        return attach(G, [])
    cache = {}

    def tree_for(level):
        if level not in cache:
            cache[level] = wazewski_approximant(k - level, b, lam).scaled(lam ** level)
        return cache[level]

    fibers = {}
    levels = {}
    for v in G.vertices:
        g = G.vertex_point(v)
        fibers[G.point_key(g)] = (g, tree_for(0))
        levels[G.point_key(g)] = 0
    for e in G.edges:
        n = math.ceil(e.length) * 2 ** k
        for i in range(1, n):
            j = k
            while j > 0 and i % 2 ** (k - j + 1) == 0:
                j -= 1
            u = _tent(Fraction(i, n), offset)
            g = GraphPoint(e.id, u * e.length)
            fibers[G.point_key(g)] = (g, tree_for(j))
            levels[G.point_key(g)] = j
    return attach(G, list(fibers.values()), decay=GeometricDecay(lam), rescale=True,
                  site_levels=levels)


# ---------------------------------------------------------------------------
# flattening to one metric graph


@dataclass
class FlatModel:
    """A :class:`GDendrite` as a single :class:`MetricGraph`.

    Vertices are ``("g", v)`` for base vertices, ``("s", k)`` for the site of
    fiber ``k`` when it is interior to an edge, and ``("f", k, u)`` for
    non-root vertex ``u`` of fiber ``k``.  ``site_vertex[k]`` names the
    vertex the root of fiber ``k`` is glued to.
    """

    graph: MetricGraph
    site_vertex: list
    base_edges: set  # edge ids coming from the base graph


def flatten(X: GDendrite) -> FlatModel:
    G = X.base
    site_vertex = [None] * len(X.fibers)
    cuts = {e.id: [] for e in G.edges}
    for k, (g, _) in enumerate(X.fibers):
        key = G.point_key(g)
        if key[0] == "v":
            site_vertex[k] = ("g", key[1])
        else:
            site_vertex[k] = ("s", k)
            cuts[key[1]].append((key[2], k))
    vertices = [("g", v) for v in G.vertices] + [sv for sv in site_vertex if sv[0] == "s"]
    edges = []
    for e in G.edges:
        prev, prev_t = ("g", e.u), Fraction(0)
        for t, k in sorted(cuts[e.id]):
            edges.append((prev, ("s", k), t - prev_t))
            prev, prev_t = ("s", k), t
        edges.append((prev, ("g", e.v), e.length - prev_t))
    base_ids = set(range(len(edges)))
    for k, (_, tree) in enumerate(X.fibers):
        name = lambda u: site_vertex[k] if u == 0 else ("f", k, u)  # noqa: E731
        for u in range(1, len(tree)):
            vertices.append(name(u))
        for p, u, ln in tree.edges():
            edges.append((name(p), name(u), ln))
    return FlatModel(MetricGraph(vertices, edges), site_vertex, base_ids)


def graph_covering_radius(G: MetricGraph, centers):
    """Exact sup over all points of ``G`` of the distance to the nearest center vertex."""
    centers = list(centers)
    if not centers:
        return None
    order = {v: k for k, v in enumerate(G.vertices)}
    dist = {c: Fraction(0) for c in centers}
    heap = [(Fraction(0), order[c], c) for c in centers]
    heapq.heapify(heap)
    while heap:
        d, _, x = heapq.heappop(heap)
        if d > dist[x]:
            continue
        for e in G.incidence.get(x, ()):
            y = e.other(x)
            nd = d + e.length
            if y not in dist or nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, order[y], y))
    return max((dist[e.u] + dist[e.v] + e.length) / 2 for e in G.edges)


def branch_vertices(G: MetricGraph):
    return [v for v in G.vertices if G.degree(v) >= 3]


def branch_covering_radius(X: GDendrite):
    flat = X.flat.graph
    return graph_covering_radius(flat, branch_vertices(flat))
