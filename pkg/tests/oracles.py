"""Independent reference computations used to cross-check the library.

None of these import the routines they check.  They favour obviously correct
brute force over speed.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import networkx as nx


# ---------------------------------------------------------------------------
# geometry


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def _clamp(x):
    return min(max(x, Fraction(0)), Fraction(1))


def segment_distance2(p0, p1, q0, q1) -> Fraction:
    """Exact squared distance between segments, by minimising over the four
    boundary lines of the parameter square and the interior critical point."""
    p0, p1, q0, q1 = ([Fraction(c) for c in x] for x in (p0, p1, q0, q1))
    u, v = _sub(p1, p0), _sub(q1, q0)

    def at(s, t):
        d = tuple(a + s * b - c - t * e for a, b, c, e in zip(p0, u, q0, v))
        return _dot(d, d)

    def best_t(s):
        vv = _dot(v, v)
        if vv == 0:
            return Fraction(0)
        base = tuple(a + s * b - c for a, b, c in zip(p0, u, q0))
        return _clamp(_dot(base, v) / vv)

    def best_s(t):
        uu = _dot(u, u)
        if uu == 0:
            return Fraction(0)
        base = tuple(c + t * e - a for a, c, e in zip(p0, q0, v))
        return _clamp(_dot(base, u) / uu)

    cands = [(Fraction(0), best_t(Fraction(0))), (Fraction(1), best_t(Fraction(1))),
             (best_s(Fraction(0)), Fraction(0)), (best_s(Fraction(1)), Fraction(1))]
    a, b, c = _dot(u, u), _dot(u, v), _dot(v, v)
    w = _sub(p0, q0)
    det = a * c - b * b
    if det != 0:
        s = (b * _dot(v, w) - c * _dot(u, w)) / det
        t = (a * _dot(v, w) - b * _dot(u, w)) / det
        if 0 <= s <= 1 and 0 <= t <= 1:
            cands.append((s, t))
    return min(at(s, t) for s, t in cands)


def plane_segments_cross(a, b, c, d) -> bool:
    """True if closed segments ab and cd share a point (exact)."""
    def orient(p, q, r):
        x = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
        return (x > 0) - (x < 0)

    def within(p, q, r):
        return min(p[0], q[0]) <= r[0] <= max(p[0], q[0]) and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])

    o1, o2, o3, o4 = orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b)
    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return True
    return ((o1 == 0 and within(a, b, c)) or (o2 == 0 and within(a, b, d))
            or (o3 == 0 and within(c, d, a)) or (o4 == 0 and within(c, d, b)))


def brute_force_crossings(segments):
    """All index pairs of segments that meet somewhere other than one shared endpoint."""
    out = []
    for i, j in itertools.combinations(range(len(segments)), 2):
        a, b = segments[i]
        c, d = segments[j]
        shared = {a, b} & {c, d}
        if shared:
            if len(shared) == 2:
                out.append((i, j))
                continue
            p = shared.pop()
            x = b if a == p else a
            y = d if c == p else c
            cross = (x[0] - p[0]) * (y[1] - p[1]) - (x[1] - p[1]) * (y[0] - p[0])
            dot = (x[0] - p[0]) * (y[0] - p[0]) + (x[1] - p[1]) * (y[1] - p[1])
            if cross == 0 and dot > 0:
                out.append((i, j))
            continue
        if plane_segments_cross(a, b, c, d):
            out.append((i, j))
    return out


def affine_rank(points) -> int:
    """Rank of the differences ``p_i - p_0`` by exact Gaussian elimination."""
    rows = [[Fraction(x) - Fraction(y) for x, y in zip(p, points[0])] for p in points[1:]]
    rank = 0
    cols = len(rows[0]) if rows else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = rows[r][c] / rows[rank][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# graphs


def to_nx_multigraph(G):
    H = nx.MultiGraph()
    H.add_nodes_from(G.vertices)
    for e in G.edges:
        H.add_edge(e.u, e.v, key=e.id, length=e.length)
    return H


def _cycle_edges(G):
    """Edges lying on some cycle: ``e`` is on a cycle iff its ends stay connected without it."""
    out = set()
    for e in G.edges:
        if e.u == e.v:
            out.add(e.id)
            continue
        H = nx.MultiGraph()
        H.add_nodes_from(G.vertices)
        H.add_edges_from((f.u, f.v) for f in G.edges if f.id != e.id)
        if nx.has_path(H, e.u, e.v):
            out.add(e.id)
    return out


def minimal_cycle_hull(G):
    """Smallest edge set inducing a connected subgraph that contains every cycle edge.

    Exhaustive over edge subsets by increasing size; the empty set when ``G``
    is a tree.
    """
    need = _cycle_edges(G)
    if not need:
        return frozenset()
    optional = [e.id for e in G.edges if e.id not in need]
    by_id = {e.id: e for e in G.edges}
    for k in range(len(optional) + 1):
        for extra in itertools.combinations(optional, k):
            chosen = need | set(extra)
            H = nx.MultiGraph()
            for i in chosen:
                H.add_edge(by_id[i].u, by_id[i].v)
            if nx.is_connected(H):
                return frozenset(chosen)
    raise AssertionError("unreachable: the whole graph is connected")


def cycle_rank_by_spanning_tree(G) -> int:
    """Number of edges outside a spanning forest."""
    T = nx.minimum_spanning_tree(nx.Graph([(e.u, e.v) for e in G.edges if e.u != e.v]))
    return len(G.edges) - T.number_of_edges()


def multigraph_isomorphic(n1, e1, n2, e2) -> bool:
    """Brute force over all bijections of ``range(n)``; edges as (u, v) multisets."""
    if n1 != n2 or len(e1) != len(e2):
        return False
    target = sorted(tuple(sorted(e)) for e in e2)
    for perm in itertools.permutations(range(n1)):
        if sorted(tuple(sorted((perm[u], perm[v]))) for u, v in e1) == target:
            return True
    return False


def nx_planar(G) -> bool:
    H = nx.Graph()
    H.add_nodes_from(G.vertices)
    H.add_edges_from((e.u, e.v) for e in G.edges if e.u != e.v)
    return nx.check_planarity(H)[0]


def suppressed_kuratowski_kind(G, edge_ids):
    """Suppress degree-2 vertices of the edge subset and name what remains."""
    H = nx.MultiGraph()
    for e in G.edges:
        if e.id in set(edge_ids):
            H.add_edge(e.u, e.v)
    changed = True
    while changed:
        changed = False
        for v in list(H.nodes):
            if H.degree(v) == 2 and H.number_of_edges(v, v) == 0:
                a, b = [w for _, w in H.edges(v)]
                if a == b:
                    continue
                H.remove_node(v)
                H.add_edge(a, b)
                changed = True
                break
    S = nx.Graph(H)
    if S.number_of_edges() != H.number_of_edges():
        return None
    if nx.is_isomorphic(S, nx.complete_graph(5)):
        return "K5"
    if nx.is_isomorphic(S, nx.complete_bipartite_graph(3, 3)):
        return "K3,3"
    return None


# ---------------------------------------------------------------------------
# trees


def tree_to_nx(tree):
    H = nx.Graph()
    H.add_node(0)
    for p, v, ln in tree.edges():
        H.add_edge(p, v, length=ln)
    return H


def branch_covering_radius_nx(tree) -> Fraction:
    """Largest distance from a point of the tree to its nearest vertex of degree >= 3.

    Each edge is scanned in closed form: along an edge of length ``L`` whose
    ends are at distances ``a`` and ``b`` from the centres, the worst point is
    at ``(a + b + L) / 2``.
    """
    H = tree_to_nx(tree)
    centers = [v for v in H.nodes if H.degree(v) >= 3]
    dist = nx.multi_source_dijkstra_path_length(H, centers, weight="length")
    worst = Fraction(0)
    for u, v, data in H.edges(data=True):
        L = data["length"]
        # |a - b| <= L by the triangle inequality, so the peak is interior or at an end
        worst = max(worst, (dist[u] + dist[v] + L) / 2)
    return worst


def rooted_isometric(t1, t2) -> bool:
    """Rooted isometry via networkx isomorphism after suppressing non-root degree-2 vertices."""
    def reduced(tree):
        H = tree_to_nx(tree)
        for v in list(H.nodes):
            if v != 0 and H.degree(v) == 2:
                (a, da), (b, db) = [(w, H[v][w]["length"]) for w in H[v]]
                H.remove_node(v)
                H.add_edge(a, b, length=da + db)
        for v in H.nodes:
            H.nodes[v]["root"] = v == 0
        return H

    return nx.is_isomorphic(reduced(t1), reduced(t2),
                            node_match=lambda x, y: x["root"] == y["root"],
                            edge_match=lambda x, y: x["length"] == y["length"])


def tree_distance_nx(tree, u, v) -> Fraction:
    return nx.shortest_path_length(tree_to_nx(tree), u, v, weight="length")


def all_simple_path_lengths(G, base):
    """Every simple path length from ``base`` to every vertex, via networkx."""
    H = to_nx_multigraph(G)
    out = {}
    for t in H.nodes:
        if t == base:
            continue
        ls = set()
        for path in nx.all_simple_edge_paths(H, base, t):
            ls.add(sum(H.edges[e]["length"] for e in path))
        out[t] = ls
    return out


def graph_point_distance_nx(G, p, q) -> Fraction:
    """Shortest-path distance between two edge points, by splicing them in as
    nodes of a networkx multigraph and running Dijkstra."""
    H = nx.MultiGraph()
    H.add_nodes_from(("v", v) for v in G.vertices)
    cuts = {}
    for name, pt in (("p", p), ("q", q)):
        cuts.setdefault(pt.edge, []).append((pt.t, name))
    ends = {}
    for e in G.edges:
        marks = sorted(cuts.get(e.id, []))
        chain = [(Fraction(0), ("v", e.u))]
        for t, name in marks:
            if t == 0:
                ends[name] = ("v", e.u)
            elif t == e.length:
                ends[name] = ("v", e.v)
            else:
                chain.append((t, ("x", name)))
                ends[name] = ("x", name)
        chain.append((e.length, ("v", e.v)))
        for (t0, a), (t1, b) in zip(chain, chain[1:]):
            H.add_edge(a, b, length=t1 - t0)
    return nx.shortest_path_length(H, ends["p"], ends["q"], weight="length")
