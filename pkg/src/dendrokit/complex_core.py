"""Finite simplicial complexes, exact barycentric points and piecewise-linear maps.

Coordinates and barycentric weights are :class:`fractions.Fraction` throughout,
so face agreement and metric identities can be asserted exactly.  Floats are
accepted on input and converted exactly (``Fraction(0.1)`` is the binary value).
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import DomainError, MalformedInput

Coord = tuple  # tuple[Fraction, ...]


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise MalformedInput(f"not a number: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise MalformedInput("non-finite coordinate")
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedInput(f"not a rational: {x!r}") from exc
    raise MalformedInput(f"not a number: {x!r}")


def fraction_to_json(q: Fraction):
    """Integers as ints, everything else as a ``"p/q"`` string."""
    q = Fraction(q)
    if q.denominator == 1:
        return q.numerator
    return f"{q.numerator}/{q.denominator}"


def exact_sqrt(q: Fraction):
    """Return ``sqrt(q)`` as a Fraction when it is rational, else None."""
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def sqrt_value(q: Fraction):
    r = exact_sqrt(q)
    return r if r is not None else math.sqrt(q)


def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def dist2(u, v):
    return sum(((a - b) ** 2 for a, b in zip(u, v)), Fraction(0))


def _solve(matrix, rhs):
    """Gaussian elimination over the rationals. Returns None if singular."""
    n = len(matrix)
    a = [list(row) + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def barycentric_in(vertices, coords):
    """Barycentric weights of ``coords`` w.r.t. the given simplex, or None.

    None means the point is not in the (closed) simplex.  Degenerate
    simplices are reported as not containing anything but their vertices.
    """
    v0 = vertices[0]
    k = len(vertices) - 1
    if k == 0:
        return (Fraction(1),) if tuple(coords) == tuple(v0) else None
    diffs = [sub(v, v0) for v in vertices[1:]]
    w = sub(coords, v0)
    gram = [[dot(a, b) for b in diffs] for a in diffs]
    lam = _solve(gram, [dot(a, w) for a in diffs])
    if lam is None:
        return None
    if any(x < 0 for x in lam) or sum(lam) > 1:
        return None
    recon = tuple(
        a + sum((l * d[i] for l, d in zip(lam, diffs)), Fraction(0))
        for i, a in enumerate(v0)
    )
    if recon != tuple(coords):
        return None
    return (1 - sum(lam),) + tuple(lam)


@dataclass(frozen=True, eq=False)
class ComplexPoint:
    """A point of a complex, given by barycentric weights on one simplex."""

    simplex: tuple
    barycentric: tuple

    def __post_init__(self):
        simplex = tuple(int(i) for i in self.simplex)
        weights = tuple(to_fraction(w) for w in self.barycentric)
        if len(simplex) != len(weights) or not simplex:
            raise MalformedInput("simplex and barycentric lengths differ")
        if any(w < 0 for w in weights) or sum(weights) != 1:
            raise MalformedInput("barycentric weights must be >= 0 and sum to 1")
        object.__setattr__(self, "simplex", simplex)
        object.__setattr__(self, "barycentric", weights)

    @classmethod
    def vertex(cls, i):
        return cls((i,), (Fraction(1),))

    @classmethod
    def on_edge(cls, i, j, s):
        """The point ``(1-s)*v_i + s*v_j``."""
        s = to_fraction(s)
        return cls((i, j), (1 - s, s))

    @cached_property
    def key(self):
        """Canonical (support, weights) form; zero weights dropped."""
        pairs = sorted((v, w) for v, w in zip(self.simplex, self.barycentric) if w)
        return tuple(v for v, _ in pairs), tuple(w for _, w in pairs)

    @property
    def support(self):
        return self.key[0]

    def __eq__(self, other):
        return isinstance(other, ComplexPoint) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        sup, w = self.key
        return f"ComplexPoint({sup}, {tuple(str(x) for x in w)})"


class SimplicialComplex:
    """Finite simplicial complex with vertex coordinates in R^N.

    ``simplices`` must be downward closed.  ``d`` is the configured maximal
    dimension (defaults to ``max(1, dim)``).  ``lengths`` optionally assigns an
    intrinsic length to each edge of a 1-dimensional complex; otherwise edges
    have their Euclidean length.
    """

    def __init__(self, vertices, simplices, d=None, lengths=None):
        verts = tuple(tuple(to_fraction(c) for c in v) for v in vertices)
        if verts and len({len(v) for v in verts}) != 1:
            raise MalformedInput("vertices have mixed ambient dimensions")
        simps = set()
        for s in simplices:
            t = tuple(sorted(int(i) for i in s))
            if not t or len(set(t)) != len(t):
                raise MalformedInput(f"bad simplex {s!r}")
            if t[0] < 0 or t[-1] >= len(verts):
                raise MalformedInput(f"simplex {s!r} references a missing vertex")
            simps.add(t)
        for s in simps:
            for k in range(1, len(s)):
                for face in itertools.combinations(s, k):
                    if face not in simps:
                        raise MalformedInput(
                            f"downward-closure: face {face} of {s} missing")
        for i in range(len(verts)):
            if (i,) not in simps:
                raise MalformedInput(f"downward-closure: vertex {i} not a simplex")
        self.vertices = verts
        self.simplices = frozenset(simps)
        dim = max((len(s) - 1 for s in simps), default=-1)
        self.d = max(1, dim) if d is None else int(d)
        if dim > self.d:
            raise MalformedInput(f"complex of dimension {dim} exceeds d={self.d}")
        edge_lengths = {}
        if lengths:
            items = lengths.items() if isinstance(lengths, dict) else lengths
            for (i, j), L in items:
                e = tuple(sorted((int(i), int(j))))
                if e not in simps:
                    raise MalformedInput(f"length given for non-edge {e}")
                L = to_fraction(L)
                if L <= 0:
                    raise MalformedInput("edge lengths must be positive")
                edge_lengths[e] = L
            missing = [e for e in simps if len(e) == 2 and e not in edge_lengths]
            if missing:
                raise MalformedInput(f"lengths missing for edges {sorted(missing)[:3]}")
        self.lengths = edge_lengths

    @classmethod
    def from_maximal(cls, vertices, maximal, d=None, lengths=None):
        """Build a complex from its maximal simplices, adding all faces."""
        simps = {(i,) for i in range(len(vertices))}
        for s in maximal:
            s = tuple(sorted(s))
            for k in range(1, len(s) + 1):
                simps.update(itertools.combinations(s, k))
        return cls(vertices, simps, d=d, lengths=lengths)

    def __repr__(self):
        return (f"SimplicialComplex({len(self.vertices)} vertices, "
                f"{len(self.simplices)} simplices, dim={self.dim})")

    def __eq__(self, other):
        return (isinstance(other, SimplicialComplex)
                and self.vertices == other.vertices
                and self.simplices == other.simplices
                and self.lengths == other.lengths)

    def __hash__(self):
        return hash((self.vertices, self.simplices))

    @cached_property
    def dim(self):
        return max((len(s) - 1 for s in self.simplices), default=-1)

    @property
    def ambient_dim(self):
        return len(self.vertices[0]) if self.vertices else 0

    @cached_property
    def sorted_simplices(self):
        return tuple(sorted(self.simplices))

    @cached_property
    def edges(self):
        return tuple(s for s in self.sorted_simplices if len(s) == 2)

    def simplices_of_dim(self, k):
        return tuple(s for s in self.sorted_simplices if len(s) == k + 1)

    @cached_property
    def maximal_simplices(self):
        out = []
        for s in self.sorted_simplices:
            ss = set(s)
            if not any(len(t) > len(s) and ss.issubset(t) for t in self.simplices):
                out.append(s)
        return tuple(out)

    def realize(self, x: ComplexPoint) -> Coord:
        """Coordinates of ``x`` in the ambient space (exact)."""
        n = self.ambient_dim
        out = [Fraction(0)] * n
        for v, w in zip(*x.key):
            if (v,) not in self.simplices:
                raise DomainError(f"vertex {v} not in complex", "point-not-in-complex")
            if w:
                for i, c in enumerate(self.vertices[v]):
                    out[i] += w * c
        if x.support not in self.simplices:
            raise DomainError(f"{x.support} is not a simplex", "point-not-in-complex")
        return tuple(out)

    @cached_property
    def _vertex_index(self):
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def _boxes(self):
        simps = self.sorted_simplices
        pts = np.array([[float(c) for c in v] for v in self.vertices]) \
            if self.vertices else np.zeros((0, 0))
        lo = np.array([pts[list(s)].min(axis=0) for s in simps])
        hi = np.array([pts[list(s)].max(axis=0) for s in simps])
        return simps, lo, hi

    def locate(self, coords) -> ComplexPoint:
        """Find ``coords`` in the realization.

        Ties resolve to the lexicographically smallest containing simplex.
        Raises ``point-not-in-complex`` when the point is outside.
        """
        coords = tuple(to_fraction(c) for c in coords)
        simps, lo, hi = self._boxes
        if not simps:
            raise DomainError("empty complex", "point-not-in-complex")
        fc = np.array([float(c) for c in coords])
        slack = 1e-9 * (1 + np.abs(fc))
        cand = np.nonzero(np.all((lo - slack <= fc) & (fc <= hi + slack), axis=1))[0]
        for idx in cand:
            s = simps[idx]
            w = barycentric_in([self.vertices[i] for i in s], coords)
            if w is not None:
                return ComplexPoint(s, w)
        raise DomainError(f"point {tuple(float(c) for c in coords)} not in complex",
                          "point-not-in-complex")

    def contains(self, coords) -> bool:
        try:
            self.locate(coords)
        except DomainError:
            return False
        return True

    def carrier(self, x: ComplexPoint) -> tuple:
        """The smallest simplex containing ``x`` (its support)."""
        s = x.support
        if s not in self.simplices:
            raise DomainError(f"{s} is not a simplex", "point-not-in-complex")
        return s

    def edge_length(self, i, j):
        """Intrinsic length of edge (i, j): explicit, exact, or float."""
        e = (min(i, j), max(i, j))
        if e in self.lengths:
            return self.lengths[e]
        return sqrt_value(dist2(self.vertices[i], self.vertices[j]))

    def diameter_of(self, s):
        """Largest edge length of a simplex (its diameter for flat simplices)."""
        if len(s) < 2:
            return Fraction(0)
        return max(self.edge_length(i, j) for i, j in itertools.combinations(s, 2))

    @cached_property
    def metric(self) -> "IntrinsicMetric":
        return IntrinsicMetric(self)


class IntrinsicMetric:
    """Path metric of a complex's realization.

    For complexes of dimension <= 1 this is the graph metric with
    :meth:`SimplicialComplex.edge_length`; it is exact when all edge lengths are
    rational.  For higher dimensions the Euclidean distance of the realization
    is used, which induces the same topology.
    """

    def __init__(self, K: SimplicialComplex):
        self.K = K
        self.graphlike = K.dim <= 1
        n = len(K.vertices)
        adj = [[] for _ in range(n)]
        for i, j in K.edges:
            L = K.edge_length(i, j)
            adj[i].append((j, L))
            adj[j].append((i, L))
        self._adj = adj
        self.exact = all(isinstance(K.edge_length(i, j), Fraction) for i, j in K.edges)

    @cached_property
    def vertex_distances(self):
        """All-pairs vertex distances (None for unreachable pairs)."""
        n = len(self.K.vertices)
        out = []
        for src in range(n):
            dist = [None] * n
            dist[src] = Fraction(0)
            heap = [(Fraction(0), src)]
            while heap:
                d, u = heapq.heappop(heap)
                if d > dist[u]:
                    continue
                for v, L in self._adj[u]:
                    nd = d + L
                    if dist[v] is None or nd < dist[v]:
                        dist[v] = nd
                        heapq.heappush(heap, (nd, v))
            out.append(dist)
        return out

    @cached_property
    def vertex_distance_array(self):
        vd = self.vertex_distances
        return np.array([[np.inf if x is None else float(x) for x in row] for row in vd])

    def _ends(self, x: ComplexPoint):
        sup, w = x.key
        if len(sup) == 1:
            return ((sup[0], Fraction(0)),)
        if len(sup) != 2:
            raise DomainError("intrinsic metric needs points on vertices or edges")
        a, b = sup
        L = self.K.edge_length(a, b)
        return ((a, w[1] * L), (b, w[0] * L))

    def distance(self, x: ComplexPoint, y: ComplexPoint):
        if not self.graphlike:
            return sqrt_value(dist2(self.K.realize(x), self.K.realize(y)))
        if x == y:
            return Fraction(0)
        best = None
        if len(x.support) == 2 and x.support == y.support:
            a, b = x.support
            best = abs(x.key[1][1] - y.key[1][1]) * self.K.edge_length(a, b)
        vd = self.vertex_distances
        for u, du in self._ends(x):
            for v, dv in self._ends(y):
                if vd[u][v] is None:
                    continue
                cand = du + vd[u][v] + dv
                if best is None or cand < best:
                    best = cand
        if best is None:
            return math.inf
        return best

    def distance_matrix(self, points):
        """Float distance matrix between points (vectorized)."""
        m = len(points)
        if not self.graphlike:
            P = np.array([[float(c) for c in self.K.realize(p)] for p in points])
            return np.sqrt(((P[:, None, :] - P[None, :, :]) ** 2).sum(-1))
        ea = np.zeros(m, dtype=int)
        eb = np.zeros(m, dtype=int)
        oa = np.zeros(m)
        ob = np.zeros(m)
        edge_id = np.full(m, -1)
        pos = np.zeros(m)
        elen = np.zeros(m)
        edge_index = {e: k for k, e in enumerate(self.K.edges)}
        for k, p in enumerate(points):
            ends = self._ends(p)
            (a, da), (b, db) = ends[0], ends[-1]
            ea[k], eb[k], oa[k], ob[k] = a, b, float(da), float(db)
            if len(p.support) == 2:
                edge_id[k] = edge_index[p.support]
                pos[k] = float(p.key[1][1])
                elen[k] = float(self.K.edge_length(*p.support))
        V = self.vertex_distance_array
        D = np.minimum.reduce([
            oa[:, None] + V[np.ix_(ea, ea)] + oa[None, :],
            oa[:, None] + V[np.ix_(ea, eb)] + ob[None, :],
            ob[:, None] + V[np.ix_(eb, ea)] + oa[None, :],
            ob[:, None] + V[np.ix_(eb, eb)] + ob[None, :],
        ])
        same = (edge_id[:, None] == edge_id[None, :]) & (edge_id[:, None] >= 0)
        direct = np.abs(pos[:, None] - pos[None, :]) * elen[:, None]
        D = np.where(same, np.minimum(D, direct), D)
        np.fill_diagonal(D, 0.0)
        return D


def barycentric_subdivide(K: SimplicialComplex, rounds: int = 1) -> SimplicialComplex:
    """Barycentric subdivision, repeated ``rounds`` times.

    Original vertices keep their indices; new barycenters follow in sorted
    simplex order.  Explicit edge lengths are halved along with the edges.
    """
    if rounds < 0:
        raise ValueError("rounds must be >= 0")
    for _ in range(rounds):
        K = _subdivide_once(K)
    return K


def _subdivide_once(K):
    order = [(i,) for i in range(len(K.vertices))]
    order += [s for s in sorted(K.simplices, key=lambda s: (len(s), s)) if len(s) > 1]
    index = {s: k for k, s in enumerate(order)}
    verts = []
    for s in order:
        pts = [K.vertices[i] for i in s]
        verts.append(tuple(sum(c, Fraction(0)) / len(s) for c in zip(*pts)))
    maximal = []
    for top in K.maximal_simplices:
        for perm in itertools.permutations(top):
            chain = [tuple(sorted(perm[:k])) for k in range(1, len(top) + 1)]
            maximal.append(tuple(index[c] for c in chain))
    lengths = None
    if K.lengths:
        lengths = {}
        for (i, j), L in K.lengths.items():
            mid = index[(i, j)]
            lengths[(i, mid)] = L / 2
            lengths[(j, mid)] = L / 2
    return SimplicialComplex.from_maximal(verts, maximal, d=K.d, lengths=lengths)


class PLMap:
    """A map affine on each simplex of ``source`` into R^target_dim.

    ``images[i]`` is the image of vertex ``i``.  Images are stored exactly
    (floats are converted with ``Fraction``), so evaluation on shared faces
    agrees bit for bit.
    """

    def __init__(self, source: SimplicialComplex, images, target_dim=None):
        imgs = tuple(tuple(to_fraction(c) for c in y) for y in images)
        if len(imgs) != len(source.vertices):
            raise MalformedInput("one image per source vertex required")
        if target_dim is None:
            target_dim = len(imgs[0]) if imgs else 0
        if any(len(y) != target_dim for y in imgs):
            raise MalformedInput("image dimension mismatch")
        self.source = source
        self.images = imgs
        self.target_dim = int(target_dim)

    def __repr__(self):
        return f"PLMap({self.source!r} -> R^{self.target_dim})"

    def __eq__(self, other):
        return (isinstance(other, PLMap) and self.source == other.source
                and self.images == other.images)

    def __hash__(self):
        return hash(self.images)

    @cached_property
    def float_images(self):
        return np.array([[float(c) for c in y] for y in self.images]).reshape(
            len(self.images), self.target_dim)

    def simplex_lipschitz(self, s) -> float:
        """Lipschitz constant of the affine piece on simplex ``s``."""
        if len(s) < 2:
            return 0.0
        if len(s) == 2:
            i, j = s
            L = float(self.source.edge_length(i, j))
            return float(np.linalg.norm(self.float_images[j] - self.float_images[i])) / L
        src = np.array([[float(c) for c in self.source.vertices[i]] for i in s])
        img = self.float_images[list(s)]
        A = (img[1:] - img[0]).T
        B = (src[1:] - src[0]).T
        M = A @ np.linalg.pinv(B)
        return float(np.linalg.norm(M, 2))

    @cached_property
    def lipschitz(self) -> float:
        return max((self.simplex_lipschitz(s) for s in self.source.maximal_simplices),
                   default=0.0)


def identity_map(K: SimplicialComplex) -> PLMap:
    return PLMap(K, K.vertices, K.ambient_dim)


def evaluate_pl(f: PLMap, x: ComplexPoint, domain: SimplicialComplex = None):
    """Evaluate ``f`` at ``x`` exactly.

    ``x`` is a point of ``f.source`` unless ``domain`` is given, in which case
    it is a point of ``domain`` whose realization must lie in ``f.source``
    (typically ``f.source`` subdivides ``domain``).
    """
    if domain is not None and domain is not f.source and domain != f.source:
        x = f.source.locate(domain.realize(x))
    if x.support not in f.source.simplices:
        raise DomainError(f"{x.support} is not a simplex of the source",
                          "point-not-in-complex")
    out = [Fraction(0)] * f.target_dim
    for v, w in zip(*x.key):
        for i, c in enumerate(f.images[v]):
            out[i] += w * c
    return tuple(out)


def evaluate_pl_float(f: PLMap, x: ComplexPoint) -> np.ndarray:
    sup, w = x.key
    return np.asarray([float(t) for t in w]) @ f.float_images[list(sup)]


def _pieces(length, h):
    """Smallest power of two ``p`` with ``length / p <= h``."""
    p = 1
    while length > h * p:
        p *= 2
    return p


def mesh_points(K: SimplicialComplex, h) -> list:
    """Deterministic finite point set with covering radius <= h.

    Vertices first, then interior points of edges (evenly spaced, a power of
    two of pieces per edge so meshes for h and h/2 are nested), then interior
    grid points of higher simplices.
    """
    h = to_fraction(h)
    if h <= 0:
        raise ValueError("h must be positive")
    pts = [ComplexPoint.vertex(i) for i in range(len(K.vertices))]
    for k in range(1, K.dim + 1):
        for s in K.simplices_of_dim(k):
            m = _pieces(K.diameter_of(s), h)
            for comp in _compositions(m, k + 1):
                if all(c > 0 for c in comp):
                    pts.append(ComplexPoint(s, tuple(Fraction(c, m) for c in comp)))
    return pts


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def complex_to_json(K: SimplicialComplex) -> dict:
    doc = {
        "vertices": [[fraction_to_json(c) for c in v] for v in K.vertices],
        "simplices": [list(s) for s in K.sorted_simplices],
    }
    if K.d != max(1, K.dim):
        doc["d"] = K.d
    if K.lengths:
        doc["lengths"] = [[i, j, fraction_to_json(L)] for (i, j), L in sorted(K.lengths.items())]
    return doc


def complex_from_json(doc) -> SimplicialComplex:
    try:
        verts = doc["vertices"]
        simps = doc["simplices"]
        lengths = None
        if doc.get("lengths"):
            lengths = {(i, j): L for i, j, L in doc["lengths"]}
        return SimplicialComplex(verts, simps, d=doc.get("d"), lengths=lengths)
    except (KeyError, TypeError) as exc:
        raise MalformedInput(f"bad complex JSON: {exc}") from exc
