"""Canonical forms of finite graphs up to homeomorphism.

Degree-2 vertices are suppressed (their two edges concatenated), then the
resulting multigraph is canonically labelled by brute force over vertex
orderings compatible with a colour refinement.  That is fine for the small
cores this package deals with (a dozen vertices or so).
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass

from .graph_topology import MetricGraph, core_skeleton


@dataclass(frozen=True)
class HomeoForm:
    """``kind`` is ``"empty"``, ``"circle"`` or ``"graph"``."""

    kind: str
    n: int = 0
    edges: tuple = ()

    def to_json(self):
        if self.kind != "graph":
            return {"kind": self.kind}
        return {"kind": "graph", "n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, doc):
        if doc["kind"] != "graph":
            return cls(doc["kind"])
        return cls("graph", int(doc["n"]), tuple(tuple(e) for e in doc["edges"]))

    def __str__(self):
        if self.kind != "graph":
            return self.kind
        return f"graph(n={self.n}, edges={list(self.edges)})"


EMPTY = HomeoForm("empty")
CIRCLE = HomeoForm("circle")


def suppress_degree_two(vertices, edges):
    """Concatenate edges through degree-2 vertices.

    ``edges`` is a list of ``(u, v)`` pairs.  Returns ``(vertices, edges)``,
    or ``None`` when the whole graph collapses to a circle.
    """
    verts = list(vertices)
    es = list(edges)
    changed = True
    while changed:
        changed = False
        for w in verts:
            inc = [k for k, (a, b) in enumerate(es) if a == w or b == w]
            deg = sum(2 if es[k][0] == es[k][1] else 1 for k in inc)
            if deg != 2:
                continue
            if len(inc) == 1:
                # a lone loop on a degree-2 vertex: this component is a circle
                if len(verts) == 1:
                    return None
                continue
            (a1, b1), (a2, b2) = es[inc[0]], es[inc[1]]
            x = b1 if a1 == w else a1
            y = b2 if a2 == w else a2
            es = [e for k, e in enumerate(es) if k not in inc] + [(x, y)]
            verts.remove(w)
            changed = True
            break
    return verts, es


def _refine(n, adj):
    colors = [(sum(adj[i]) + adj[i][i], adj[i][i]) for i in range(n)]
    while True:
        ranks = {c: k for k, c in enumerate(sorted(set(colors)))}
        cur = [ranks[c] for c in colors]
        sig = [(cur[i], tuple(sorted((cur[j], adj[i][j]) for j in range(n) if adj[i][j] and j != i)))
               for i in range(n)]
        ranks2 = {c: k for k, c in enumerate(sorted(set(sig)))}
        new = [ranks2[s] for s in sig]
        if len(set(new)) == len(set(cur)):
            return new
        colors = new


def canonical_multigraph(n, edge_pairs, limit=5_000_000):
    """Lexicographically least sorted edge list over colour-respecting relabellings."""
    adj = [[0] * n for _ in range(n)]
    for a, b in edge_pairs:
        adj[a][b] += 1
        if a != b:
            adj[b][a] += 1
    colors = _refine(n, adj)
    classes = [sorted(i for i in range(n) if colors[i] == c) for c in sorted(set(colors))]
    count = math.prod(math.factorial(len(c)) for c in classes)
    if count > limit:
        raise ValueError(f"graph too symmetric for brute-force canonical form ({count})")
    best = None
    for perms in itertools.product(*(itertools.permutations(c) for c in classes)):
        order = [v for p in perms for v in p]
        label = {v: k for k, v in enumerate(order)}
        form = tuple(sorted(tuple(sorted((label[a], label[b]))) for a, b in edge_pairs))
        if best is None or form < best:
            best = form
    return best


def canonical_homeomorphism_form(G: MetricGraph) -> HomeoForm:
    """Combinatorial form of ``G`` modulo subdivision of edges.

    Returns :data:`EMPTY` when ``G`` has empty core skeleton (a tree),
    :data:`CIRCLE` for a single cycle, otherwise a canonically labelled
    multigraph with no degree-2 vertices.
    """
    if G.is_empty or core_skeleton(G).is_empty:
        return EMPTY
    res = suppress_degree_two(G.vertices, [(e.u, e.v) for e in G.edges])
    if res is None:
        return CIRCLE
    verts, es = res
    index = {v: k for k, v in enumerate(verts)}
    pairs = [(index[a], index[b]) for a, b in es]
    return HomeoForm("graph", len(verts), canonical_multigraph(len(verts), pairs))


def degree_sequence(form: HomeoForm):
    c = Counter()
    for a, b in form.edges:
        c[a] += 1
        c[b] += 1
    return sorted(c.values())
