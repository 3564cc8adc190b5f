"""Metric graphs whose arc lengths from a basepoint lie in a subgroup of (R, +).

Only rational generators are supported.  The subgroup they generate is cyclic,
``(g/D) Z`` with ``D`` the common denominator and ``g`` the gcd of the scaled
numerators, so membership is a divisibility test.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .complex_core import to_fraction
from .errors import DomainError, MalformedInput
from .gdendrite import GDendrite
from .graph_topology import MetricGraph
from .trees import PointedTree, TreePoint


class AGroup:
    """Subgroup of the rationals generated by positive ``generators``.

    With ``rational_span=True`` membership is tested in the Q-span instead,
    which is all of Q as soon as one generator is given.
    """

    def __init__(self, generators, rational_span=False):
        gens = [to_fraction(g) for g in generators]
        if not gens or any(g <= 0 for g in gens):
            raise MalformedInput("generators must be positive rationals")
        self.generators = tuple(gens)
        self.rational_span = rational_span
        D = math.lcm(*(g.denominator for g in gens))
        self.unit = Fraction(math.gcd(*(int(g * D) for g in gens)), D)

    def __contains__(self, x):
        x = to_fraction(x)
        if self.rational_span:
            return True
        return (x / self.unit).denominator == 1

    def __repr__(self):
        span = "Q" if self.rational_span else "Z"
        return f"AGroup({span}-span of {[str(g) for g in self.generators]}, unit={self.unit})"


def _as_graph(X):
    """``(MetricGraph, basepoint vertex)`` for trees, G-dendrites and graphs."""
    if isinstance(X, PointedTree):
        return MetricGraph(range(len(X)), X.edges()), 0
    if isinstance(X, GDendrite):
        return X.flat.graph, None
    return X, None


def _tree_lengths(G, base):
    dist = {base: Fraction(0)}
    stack = [base]
    while stack:
        x = stack.pop()
        for e in G.incidence.get(x, ()):
            y = e.other(x)
            if y not in dist:
                dist[y] = dist[x] + e.length
                stack.append(y)
    return dist


def arc_lengths_from(G: MetricGraph, base, targets, limit=200_000):
    """Lengths of all simple paths from ``base`` to each vertex in ``targets``."""
    out = {t: set() for t in targets}
    if len(G.edges) == len(G.vertices) - 1:
        dist = _tree_lengths(G, base)
        for t in targets:
            out[t].add(dist[t])
        return out
    count = 0
    stack = [(base, Fraction(0), frozenset([base]), iter(G.incidence.get(base, ())))]
    if base in out:
        out[base].add(Fraction(0))
    while stack:
        x, d, seen, it = stack[-1]
        for e in it:
            if e.is_loop:
                continue
            y = e.other(x)
            if y in seen:
                continue
            count += 1
            if count > limit:
                raise DomainError("too many simple paths to enumerate", "path-enumeration-limit")
            if y in out:
                out[y].add(d + e.length)
            stack.append((y, d + e.length, seen | {y}, iter(G.incidence.get(y, ()))))
            break
        else:
            stack.pop()
    return out


def cycle_lengths(G: MetricGraph, limit=200_000):
    """Lengths of all simple cycles (loops and 2-cycles of parallel edges included)."""
    order = {v: k for k, v in enumerate(G.vertices)}
    out = set()
    count = 0
    for s in G.vertices:
        # cycles whose smallest vertex is s; each found twice (two directions)
        stack = [(s, Fraction(0), frozenset([s]), None, iter(G.incidence.get(s, ())))]
        while stack:
            x, d, seen, via, it = stack[-1]
            for e in it:
                if e.is_loop:
                    if x == s and via is None:
                        out.add(e.length)
                    continue
                y = e.other(x)
                if y == s and via is not None and e.id != via:
                    out.add(d + e.length)
                    continue
                if y in seen or order[y] < order[s]:
                    continue
                count += 1
                if count > limit:
                    raise DomainError("too many simple cycles to enumerate", "path-enumeration-limit")
                stack.append((y, d + e.length, seen | {y}, e.id, iter(G.incidence.get(y, ()))))
                break
            else:
                stack.pop()
    return out


def verify_a_graph(X, A: AGroup, basepoint=None) -> bool:
    """True iff every arc from the basepoint to a vertex of degree other than 2,
    and every simple cycle, has length in ``A``.

    Endpoints count alongside branch points, so a lone edge of length ``1/3``
    fails for ``A = (1/2) Z``.
    """
    G, default_base = _as_graph(X)
    base = default_base if basepoint is None else basepoint
    if base is None:
        raise MalformedInput("a basepoint vertex is required")
    targets = [v for v in G.vertices if G.degree(v) != 2 and v != base]
    paths = arc_lengths_from(G, base, targets)
    if any(x not in A for ls in paths.values() for x in ls):
        return False
    return all(c in A for c in cycle_lengths(G))


# ---------------------------------------------------------------------------
# sprouting


def _split_at(parent, lengths, p: TreePoint):
    """Insert a vertex at ``p`` (in place); return its id."""
    if p.t == lengths[p.v]:
        return p.v
    if p.v == 0 or p.t == 0:
        return parent[p.v] if p.v != 0 else 0
    w = len(parent)
    parent.append(parent[p.v])
    lengths.append(p.t)
    parent[p.v] = w
    lengths[p.v] = lengths[p.v] - p.t
    return w


def sprout(X: PointedTree, sites, b: int, lengths, L, A: AGroup) -> PointedTree:
    """Attach ``b`` edges of length ``L`` and one edge of each length in
    ``lengths`` at every site.

    ``sites`` are vertex ids or :class:`TreePoint` s.  Each must be at
    distance in ``A`` from the root and must not be a leaf.
    """
    L = to_fraction(L)
    lengths = [to_fraction(a) for a in lengths]
    for a in [L] + lengths:
        if a <= 0 or a not in A:
            raise DomainError(f"edge length {a} is not a positive element of {A}", "length-not-in-A")
    points = [X.vertex_point(s) if isinstance(s, int) else s for s in sites]
    points = [X.vertex_point(X.parent[p.v]) if p.t == 0 and p.v != 0 else p for p in points]
    for p in points:
        X.check_point(p)
        if X.depth_of(p) not in A:
            raise DomainError(f"site at depth {X.depth_of(p)} is not at A-distance", "length-not-in-A")
        interior = 0 < p.t < X.lengths[p.v]
        if not interior and p.v != 0 and not X.children[p.v]:
            raise DomainError(f"site {p} is an endpoint", "site-degree-1")
        if p.v == 0 and len(X.children[0]) == 1 and len(X) > 1:
            raise DomainError("the root is an endpoint", "site-degree-1")
    parent = list(X.parent)
    lens = list(X.lengths)
    # split top-down along each edge; later offsets shift by what was cut off
    ids = {}
    cut = {}
    for p in sorted(set(points), key=lambda p: (p.v, p.t)):
        n0 = len(parent)
        ids[p] = _split_at(parent, lens, TreePoint(p.v, p.t - cut.get(p.v, 0)))
        if len(parent) > n0:
            cut[p.v] = p.t
    for p in points:
        s = ids[p]
        for _ in range(b):
            parent.append(s)
            lens.append(L)
        for a in lengths:
            parent.append(s)
            lens.append(a)
    return PointedTree(parent, lens)


def sprout_round(X: PointedTree, b: int, lengths, L, A: AGroup, grid) -> PointedTree:
    """One application of the sprouting operator.

    Sites are every non-leaf vertex plus every interior point lying at a
    multiple of ``grid`` below the top of its edge.
    """
    grid = to_fraction(grid)
    if grid not in A:
        raise DomainError(f"grid step {grid} is not in {A}", "length-not-in-A")
    sites = []
    for v in range(len(X)):
        if v == 0 or X.children[v]:
            if not (v == 0 and len(X.children[0]) == 1):
                sites.append(X.vertex_point(v))
    for v in range(1, len(X)):
        m = grid
        while m < X.lengths[v]:
            sites.append(TreePoint(v, m))
            m += grid
    return sprout(X, sites, b, lengths, L, A)


def iterate_sprouting(rounds: int, b: int, lengths, L, A: AGroup, grid, start=None) -> PointedTree:
    X = start if start is not None else PointedTree.trivial()
    for _ in range(rounds):
        X = sprout_round(X, b, lengths, L, A, grid)
    return X
