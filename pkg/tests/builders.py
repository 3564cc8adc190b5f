"""Shared constructions for the test suite."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from dendrokit.complex_core import PLMap, SimplicialComplex
from dendrokit.embed_engine import InverseSystem
from dendrokit.graph_topology import MetricGraph

F = Fraction


def tree_tower(levels=10):
    """``X_0`` a unit segment; ``X_{n+1}`` adds a branch of length ``2^-(n+1)``
    along a fresh axis at vertex ``n mod |X_n|``; the bond collapses it."""
    dim = levels + 1
    coords = [[F(0)] * dim, [F(1)] + [F(0)] * (dim - 1)]
    edges = [(0, 1)]
    Ks = [SimplicialComplex(list(coords), [(0,), (1,)] + edges)]
    bonds = []
    for n in range(levels - 1):
        a = n % len(coords)
        tip = list(coords[a])
        tip[n + 1] += F(1, 2 ** (n + 1))
        coords.append(tip)
        edges.append((a, len(coords) - 1))
        K = SimplicialComplex(list(coords), [(i,) for i in range(len(coords))] + edges)
        bonds.append(PLMap(K, coords[:-1] + [coords[a]], dim))
        Ks.append(K)
    return InverseSystem(Ks, bonds)


def identity_tower(levels=4):
    K = SimplicialComplex.from_maximal([(0,), (1,)], [(0, 1)])
    return InverseSystem([K] * levels, [PLMap(K, K.vertices, 1)] * (levels - 1))


def point_system():
    K = SimplicialComplex([(0,)], [(0,)])
    return InverseSystem([K], [])


def random_one_complex(rng, max_vertices=7):
    """Connected random 1-complex (a tree plus a few chords) with vertices on the moment curve."""
    n = int(rng.integers(3, max_vertices + 1))
    edges = {(int(rng.integers(0, k)), k) for k in range(1, n)}
    for _ in range(int(rng.integers(0, 3))):
        i, j = sorted(rng.choice(n, 2, replace=False).tolist())
        edges.add((i, j))
    verts = [(F(i), F(i * i), F(i ** 3)) for i in range(n)]
    return SimplicialComplex.from_maximal(verts, sorted(edges))


def folding_map(rng, K):
    """A PL map to R^3 that collapses the complex onto very few image points."""
    targets = [tuple(F(int(c), 4) for c in rng.integers(-4, 5, 3)) for _ in range(2)]
    images = [targets[int(rng.integers(0, 2))] for _ in K.vertices]
    return PLMap(K, images, 3)


def v_fold():
    """The "V" of two edges folded onto one segment."""
    K = SimplicialComplex.from_maximal([(0, 0, 0), (1, 0, 0), (0, 1, 0)], [(0, 1), (0, 2)])
    return PLMap(K, [(0, 0, 0), (1, 0, 0), (1, 0, 0)], 3)


def graph_corpus(count=200, max_edges=10, seed=7, max_vertices=8):
    """Connected multigraphs (loops and parallel edges allowed) with at most ``max_edges`` edges."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(1, max_vertices + 1))
        edges = [(int(rng.integers(0, k)), k) for k in range(1, n)]
        room = max_edges - len(edges)
        if room < 0:
            continue
        for _ in range(int(rng.integers(0, room + 1))):
            u, v = (int(x) for x in rng.integers(0, n, 2))
            edges.append((u, v))
        lens = [F(int(rng.integers(1, 5)), int(rng.integers(1, 4))) for _ in edges]
        out.append(MetricGraph(range(n), [(u, v, L) for (u, v), L in zip(edges, lens)]))
    return out


def planarity_corpus(seed=11):
    """Named graphs plus random connected graphs on at most 7 vertices."""
    named = [complete(5), bipartite(3, 3), complete(4), k33_with_ear(), complete(6),
             wheel(6), wheel(7), prism()]
    rng = np.random.default_rng(seed)
    out = list(named)
    while len(out) < 200:
        n = int(rng.integers(4, 8))
        pairs = list(itertools.combinations(range(n), 2))
        p = float(rng.uniform(0.3, 0.9))
        chosen = [e for e in pairs if rng.random() < p]
        tree = [(int(rng.integers(0, k)), k) for k in range(1, n)]
        es = sorted(set(chosen) | {tuple(sorted(e)) for e in tree})
        out.append(MetricGraph(range(n), es))
    return out


def complete(n):
    return MetricGraph(range(n), list(itertools.combinations(range(n), 2)))


def bipartite(a, b):
    return MetricGraph(range(a + b), [(i, a + j) for i in range(a) for j in range(b)])


def wheel(n):
    rim = [(i, (i + 1) % (n - 1)) for i in range(n - 1)]
    return MetricGraph(range(n), rim + [(i, n - 1) for i in range(n - 1)])


def prism():
    es = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]
    return MetricGraph(range(6), es)


def k33_with_ear():
    # K3,3 plus one extra vertex joined to two vertices on the same side
    G = bipartite(3, 3)
    return MetricGraph(range(7), [(e.u, e.v) for e in G.edges] + [(6, 0), (6, 1)])


def subdivided(G):
    vs = list(G.vertices)
    es = []
    nxt = max(vs) + 1
    for e in G.edges:
        vs.append(nxt)
        es += [(e.u, nxt), (nxt, e.v)]
        nxt += 1
    return MetricGraph(vs, es)


def circle(length=1):
    return MetricGraph([0], [(0, 0, length)])


def theta():
    return MetricGraph([0, 1], [(0, 1, 1), (0, 1, 1), (0, 1, 1)])


def figure_eight():
    return MetricGraph([0], [(0, 0, 1), (0, 0, 1)])
