"""Certified embeddings of inverse systems of finite complexes into R^(2d+1).

The pipeline is the classical one:

* :func:`perturb_to_general_position` moves vertex images by less than a given
  radius until no ``m+2`` of them lie in an ``m``-dimensional affine subspace;
* :func:`approximate_by_embedding` applies it to a PL map, which makes the map
  injective while moving it by at most ``eps/2``;
* :func:`embed_inverse_limit` builds maps ``f_0, f_1, ...`` level by level with
  separation constants ``alpha_n`` and step sizes ``epsilon_n`` such that the
  limit map is injective on threads, and records everything in an
  :class:`EmbeddingCertificate` that :func:`verify_certificate` re-checks by a
  separate route.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .complex_core import (
    ComplexPoint,
    PLMap,
    SimplicialComplex,
    barycentric_subdivide,
    complex_from_json,
    complex_to_json,
    dist2,
    evaluate_pl,
    evaluate_pl_float,
    fraction_to_json,
    mesh_points,
    to_fraction,
)
from .errors import CertificateViolation, DomainError, MalformedInput, RetriesExhausted
from .geometry import segment_dist2_batch, simplex_dist2

DEFAULT_TOL = 1e-9
MAX_ATTEMPTS = 64
HALVE_EVERY = 16
ALPHA_FACTOR = 0.9
EPS_FACTOR = 0.9
GP_SCALE = 1e-6


# ---------------------------------------------------------------------------
# inverse systems and threads


class InverseSystem:
    """Levels ``X_0 .. X_N`` with PL bonding maps ``bonds[n]: X_{n+1} -> X_n``.

    A bond's images are coordinates in the realization of the lower level.
    """

    def __init__(self, levels, bonds, check=True):
        levels = tuple(levels)
        bonds = tuple(bonds)
        if not levels:
            raise MalformedInput("an inverse system needs at least one level")
        if len(bonds) != len(levels) - 1:
            raise MalformedInput("need exactly one bond per consecutive pair of levels")
        for n, p in enumerate(bonds):
            if p.source != levels[n + 1]:
                raise MalformedInput(f"bond {n} is not defined on level {n + 1}")
            if p.target_dim != levels[n].ambient_dim:
                raise MalformedInput(f"bond {n} lands in the wrong ambient dimension")
        self.levels = levels
        self.bonds = bonds
        self.d = max(K.d for K in levels)
        if check:
            self.check_ranges()

    @property
    def depth(self):
        return len(self.levels) - 1

    def check_ranges(self, h=Fraction(1, 4)):
        """Every bond maps a mesh sample of ``X_{n+1}`` into ``X_n``."""
        for n, p in enumerate(self.bonds):
            for x in mesh_points(self.levels[n + 1], h):
                try:
                    self.project(n, x)
                except DomainError as exc:
                    raise DomainError(f"bond {n} leaves level {n}: {exc}",
                                      "bond-range") from exc

    def project(self, n, x: ComplexPoint) -> ComplexPoint:
        """Image under ``bonds[n]`` of a point of level ``n+1``, as a point of level ``n``."""
        return push_point(self.bonds[n], self.levels[n], x)

    def project_to(self, m, n, x):
        """Image of a level-``n`` point in level ``m <= n``."""
        for k in range(n - 1, m - 1, -1):
            x = self.project(k, x)
        return x


def push_point(p: PLMap, target: SimplicialComplex, x: ComplexPoint) -> ComplexPoint:
    """Locate ``p(x)`` in ``target``; fast when ``p`` is simplicial on x's carrier."""
    sup, w = x.key
    index = _vertex_index(target)
    imgs = [index.get(p.images[v]) for v in sup]
    if all(i is not None for i in imgs):
        acc = {}
        for i, wi in zip(imgs, w):
            acc[i] = acc.get(i, Fraction(0)) + wi
        s = tuple(sorted(acc))
        if s in target.simplices:
            return ComplexPoint(s, tuple(acc[i] for i in s))
    return target.locate(evaluate_pl(p, x))


def _vertex_index(K):
    return K._vertex_index


@dataclass(frozen=True)
class Thread:
    """A finite thread: one point per level, compatible with the bonds."""

    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))


def lift_thread(system: InverseSystem, top: ComplexPoint) -> Thread:
    """The thread determined by a point of the top level."""
    pts = [top]
    for n in range(system.depth - 1, -1, -1):
        pts.append(system.project(n, pts[-1]))
    return Thread(tuple(reversed(pts)))


def check_thread(system: InverseSystem, t: Thread, tol=0):
    if len(t.points) != len(system.levels):
        raise DomainError("thread length differs from the number of levels",
                          "inconsistent-thread")
    for n, K in enumerate(system.levels):
        try:
            K.realize(t.points[n])
        except DomainError as exc:
            raise DomainError(str(exc), "inconsistent-thread") from exc
    for n in range(system.depth):
        got = evaluate_pl(system.bonds[n], t.points[n + 1])
        want = system.levels[n].realize(t.points[n])
        if dist2(got, want) > Fraction(tol) ** 2:
            raise DomainError(f"thread breaks at level {n}", "inconsistent-thread")


def random_point(K: SimplicialComplex, rng, denominator=1024) -> ComplexPoint:
    tops = K.maximal_simplices
    s = tops[int(rng.integers(len(tops)))]
    raw = rng.integers(0, denominator, size=len(s)) + 1
    total = int(raw.sum())
    return ComplexPoint(s, tuple(Fraction(int(r), total) for r in raw))


def random_threads(system: InverseSystem, count, rng) -> list:
    top = system.levels[-1]
    return [lift_thread(system, random_point(top, rng)) for _ in range(count)]


# ---------------------------------------------------------------------------
# general position


def is_general_position(points, tol=DEFAULT_TOL) -> bool:
    """True iff for every ``m <= n-1`` no ``m+2`` points span less than an m-flat.

    The test is numerical: for each ``(m+2)``-subset the ``(m+1) x n``
    difference matrix must have its ``(m+1)``-th singular value above ``tol``.
    """
    P = np.asarray([[float(c) for c in p] for p in points], dtype=float)
    if len(P) < 2:
        return True
    n = P.shape[1]
    if n < 1:
        raise ValueError("ambient dimension must be >= 1")
    for m in range(0, n):
        size = m + 2
        if size > len(P):
            break
        combos = itertools.combinations(range(len(P)), size)
        while True:
            chunk = np.fromiter(itertools.chain.from_iterable(
                itertools.islice(combos, 200_000)), dtype=np.int64)
            if chunk.size == 0:
                break
            idx = chunk.reshape(-1, size)
            diffs = P[idx[:, 1:]] - P[idx[:, :1]]
            # sigma_min >= sqrt(det(M M^T)) / |M|_F^m; only doubtful cases get an SVD
            gram = diffs @ diffs.transpose(0, 2, 1)
            fro2 = np.einsum("kii->k", gram)
            det = np.linalg.det(gram) if m else fro2
            lower = np.sqrt(np.maximum(det, 0.0)) / np.maximum(fro2, 1e-300) ** (m / 2)
            doubtful = lower <= tol + 1e-7 * np.sqrt(fro2)
            if np.any(doubtful):
                sv = np.linalg.svd(diffs[doubtful], compute_uv=False)
                if np.any(sv[:, m] <= tol):
                    return False
    return True


def _ball_sample(rng, count, dim, radius):
    g = rng.standard_normal((count, dim))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    u = rng.random((count, 1)) ** (1.0 / dim)
    return g / norms * u * radius


def perturb_to_general_position(points, radius, seed=None, tol=DEFAULT_TOL,
                                max_attempts=MAX_ATTEMPTS, rng=None):
    """Move each point by less than ``radius`` so the set is in general position.

    Attempt 0 returns the input untouched if it already qualifies.  Every
    ``HALVE_EVERY`` failed attempts the sampling radius halves.  The
    singular-value tolerance used is ``min(tol, GP_SCALE * r**2)`` for
    sampling radius ``r``: points that start out coincident end up only about
    ``r`` apart, so flats through two such pairs are only ``r**2`` thick.  Returns an
    ``(k, n)`` float array.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    rng = np.random.default_rng(seed) if rng is None else rng
    P = np.asarray([[float(c) for c in p] for p in points], dtype=float)
    if P.ndim == 1:
        P = P.reshape(len(P), -1)
    if is_general_position(P, min(tol, GP_SCALE * radius ** 2)):
        return P
    for attempt in range(max_attempts):
        r = radius * 0.5 ** (attempt // HALVE_EVERY)
        cand = P + _ball_sample(rng, len(P), P.shape[1], 0.999 * r)
        if is_general_position(cand, min(tol, GP_SCALE * r ** 2)):
            return cand
    raise RetriesExhausted(
        f"no general-position perturbation after {max_attempts} attempts")


# ---------------------------------------------------------------------------
# PL composition and approximation by embeddings


def compose(f: PLMap, p: PLMap, target: SimplicialComplex = None, tol=None):
    """PL map approximating ``f o p`` and a bound on the approximation error.

    ``p`` maps into the realization of ``f.source`` (or of ``target``, which
    ``f.source`` subdivides).  For 1-dimensional sources the composite is
    computed exactly on the subdivision of ``p.source`` at the preimages of
    ``f.source``'s vertices, and the error is 0.  For higher dimensions the
    composite is interpolated on barycentric subdivisions until
    ``Lip(f) * Lip(p) * mesh <= tol``.
    """
    S = f.source
    X = p.source
    if X.dim <= 1:
        return _compose_1d(f, p), 0.0
    if tol is None:
        raise ValueError("tol required for dimension >= 2")
    lip = f.lipschitz * p.lipschitz
    rounds = 0
    Y = X
    while lip * max(float(Y.diameter_of(s)) for s in Y.maximal_simplices) > tol:
        rounds += 1
        Y = barycentric_subdivide(X, rounds)
        if rounds > 8:
            raise DomainError("subdivision needed for composition is too deep")
    err = lip * max(float(Y.diameter_of(s)) for s in Y.maximal_simplices)
    pY = _restrict(p, Y, X)
    imgs = [evaluate_pl(f, push_point(pY, S, ComplexPoint.vertex(v)))
            for v in range(len(Y.vertices))]
    return PLMap(Y, imgs, f.target_dim), err


def _restrict(p: PLMap, Y: SimplicialComplex, X: SimplicialComplex) -> PLMap:
    imgs = [evaluate_pl(p, X.locate(v)) for v in Y.vertices]
    return PLMap(Y, imgs, p.target_dim)


def _compose_1d(f: PLMap, p: PLMap) -> PLMap:
    S = f.source
    X = p.source
    Sv = np.array([[float(c) for c in v] for v in S.vertices])
    verts = list(X.vertices)
    maximal = [(i,) for i in range(len(X.vertices))]
    lengths = {} if X.lengths else None
    for a, b in X.edges:
        pa, pb = p.images[a], p.images[b]
        ts = []
        if pa != pb:
            fa = np.array([float(c) for c in pa])
            fb = np.array([float(c) for c in pb])
            d = fb - fa
            dd = float(d @ d)
            tf = (Sv - fa) @ d / dd
            resid = np.linalg.norm(Sv - fa - np.outer(tf, d), axis=1)
            for w in np.nonzero((tf > -1e-9) & (tf < 1 + 1e-9) & (resid < 1e-7))[0]:
                wv = S.vertices[w]
                dv = tuple(y - x for x, y in zip(pa, pb))
                t = sum((c - x) * e for c, x, e in zip(wv, pa, dv)) / sum(e * e for e in dv)
                if 0 < t < 1 and tuple(x + t * e for x, e in zip(pa, dv)) == wv:
                    ts.append(t)
        ts = sorted(set(ts))
        chain = [a]
        for t in ts:
            verts.append(tuple(x + t * (y - x) for x, y in zip(X.vertices[a], X.vertices[b])))
            chain.append(len(verts) - 1)
        chain.append(b)
        params = [Fraction(0)] + ts + [Fraction(1)]
        for k in range(len(chain) - 1):
            maximal.append((chain[k], chain[k + 1]))
            if lengths is not None:
                L = X.lengths[(a, b)]
                lengths[(min(chain[k], chain[k + 1]), max(chain[k], chain[k + 1]))] = \
                    L * (params[k + 1] - params[k])
    Y = SimplicialComplex.from_maximal(verts, maximal, d=X.d, lengths=lengths)
    # new vertices sit on edges of X; their p-images are affine combinations
    imgs = []
    for v in range(len(Y.vertices)):
        if v < len(X.vertices):
            pv = p.images[v]
        else:
            pv = evaluate_pl(p, X.locate(Y.vertices[v]))
        imgs.append(evaluate_pl(f, _locate_fast(S, pv)))
    return PLMap(Y, imgs, f.target_dim)


def _locate_fast(K, coords):
    i = K._vertex_index.get(tuple(coords))
    if i is not None:
        return ComplexPoint.vertex(i)
    return K.locate(coords)


def approximate_by_embedding(f: PLMap, eps, seed=None, rng=None, tol=DEFAULT_TOL,
                             max_attempts=MAX_ATTEMPTS) -> PLMap:
    """Injective PL map within ``eps`` of ``f``.

    Vertex images are moved by less than ``eps/2`` into general position, on
    the same subdivision as ``f``; the affine pieces then differ from ``f`` by
    at most ``eps/2`` everywhere.  Images are rounded to floats.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if f.target_dim < 2 * f.source.dim + 1:
        raise DomainError(
            f"target dimension {f.target_dim} < 2*{f.source.dim}+1", "dimension")
    rng = np.random.default_rng(seed) if rng is None else rng
    Y = perturb_to_general_position(f.images, eps / 2, rng=rng, tol=tol,
                                    max_attempts=max_attempts)
    return PLMap(f.source, [tuple(float(c) for c in y) for y in Y], f.target_dim)


def sup_distance(f: PLMap, g: PLMap, points, domain=None) -> float:
    """Max of ``|f(x) - g(x)|`` over the given points."""
    best = 0.0
    for x in points:
        a = evaluate_pl(f, x, domain)
        b = evaluate_pl(g, x, domain)
        best = max(best, math.sqrt(dist2(a, b)))
    return best


# ---------------------------------------------------------------------------
# exhaustion of the off-diagonal


def threshold(n) -> Fraction:
    return Fraction(1, n + 1)


def pitch(n) -> Fraction:
    return Fraction(1, 4 * (n + 1))


def pairs_at_least(K: SimplicialComplex, points, thr: Fraction):
    """Index pairs ``i < j`` whose intrinsic distance is ``>= thr``, decided exactly."""
    metric = K.metric
    D = metric.distance_matrix(points)
    iu, ju = np.triu_indices(len(points), k=1)
    dv = D[iu, ju]
    band = 1e-9 * max(1.0, float(thr))
    sure = dv >= float(thr) + band
    unsure = np.nonzero(np.abs(dv - float(thr)) < band)[0]
    keep = sure.copy()
    for k in unsure:
        d = metric.distance(points[iu[k]], points[ju[k]])
        keep[k] = d >= thr
    return np.stack([iu[keep], ju[keep]], axis=1)


@dataclass
class OffDiagonalExhaustion:
    """Finite surrogate of ``X_m x X_m - diagonal = union_n C_mn``.

    ``C_mn`` is the set of pairs of mesh points of ``X_m`` (pitch
    ``1/(4(n+1))``) at intrinsic distance ``>= 1/(n+1)``; ``checked(n)`` is the
    pulled-back union ``K_n`` restricted to mesh points of ``X_n``.
    """

    system: InverseSystem
    _c: dict = field(default_factory=dict, repr=False)
    _k: dict = field(default_factory=dict, repr=False)

    def mesh(self, m, n):
        return mesh_points(self.system.levels[m], pitch(n))

    def C(self, m, n):
        """``(points, index_pairs)`` for ``C_mn``."""
        if not 0 <= m <= n:
            raise ValueError("need 0 <= m <= n")
        key = (m, n)
        if key not in self._c:
            pts = self.mesh(m, n)
            self._c[key] = (pts, pairs_at_least(self.system.levels[m], pts, threshold(n)))
        return self._c[key]

    def checked(self, n):
        """``(points, index_pairs)`` for ``K_n``: mesh pairs of ``X_n`` whose
        projection to some ``X_m`` (``m <= n``) lies at distance ``>= 1/(n+1)``."""
        if n not in self._k:
            sys_ = self.system
            pts = self.mesh(n, n)
            proj = list(pts)
            found = np.zeros((len(pts), len(pts)), dtype=bool)
            for m in range(n, -1, -1):
                if m < n:
                    proj = [sys_.project(m, x) for x in proj]
                uniq = {}
                for x in proj:
                    uniq.setdefault(x, len(uniq))
                upts = list(uniq)
                if len(upts) < 2:
                    continue
                far = pairs_at_least(sys_.levels[m], upts, threshold(n))
                far_mat = np.zeros((len(upts), len(upts)), dtype=bool)
                far_mat[far[:, 0], far[:, 1]] = True
                far_mat |= far_mat.T
                ids = np.array([uniq[x] for x in proj])
                found |= far_mat[np.ix_(ids, ids)]
            iu, ju = np.nonzero(np.triu(found, k=1))
            self._k[n] = (pts, np.stack([iu, ju], axis=1).astype(np.int64))
        return self._k[n]


def build_exhaustion(system: InverseSystem) -> OffDiagonalExhaustion:
    return OffDiagonalExhaustion(system)


# ---------------------------------------------------------------------------
# separation bounds


@dataclass(frozen=True)
class SeparationBound:
    bound: float
    slack: float
    exact: bool
    witness: tuple = ()


def _lower_sqrt(q) -> float:
    v = math.sqrt(float(q))
    return v * (1 - 1e-12)


def min_separation(f: PLMap, pairs, domain: SimplicialComplex = None, mesh_pitch=None):
    """Certified lower bound on ``min |f(x) - f(x')|`` over the listed pairs.

    ``pairs`` is a list of ``(x, x')`` points (of ``domain``, default
    ``f.source``).  For 1-dimensional sources a pair whose carriers are disjoint
    is bounded by the exact distance between the carrier image simplices, which
    also covers every pair in those carriers; other pairs are measured
    directly and exactly.  A float screen discards candidates that are
    clearly above the minimum before the exact computation.  Slack is 0.  For higher dimensions the bound is the
    sampled minimum and ``slack = Lip(f) * mesh_pitch`` is reported, unverified.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("pairs must be nonempty")
    S = f.source
    if domain is not None and domain != S:
        pairs = [(S.locate(domain.realize(x)), S.locate(domain.realize(y))) for x, y in pairs]
    for x, y in pairs:
        if x == y:
            raise DomainError(f"pair at zero distance: {x}", "degenerate-pair")
    if S.dim <= 1:
        return _min_separation_1d(f, pairs)
    vals = [float(np.linalg.norm(evaluate_pl_float(f, x) - evaluate_pl_float(f, y)))
            for x, y in pairs]
    k = int(np.argmin(vals))
    slack = f.lipschitz * float(mesh_pitch) if mesh_pitch is not None else float("nan")
    return SeparationBound(vals[k], slack, False, pairs[k])


def _min_separation_1d(f: PLMap, pairs):
    imgs = f.images
    F = np.array(f.float_images)
    keys = []
    key_of = {}
    direct = []
    for x, y in pairs:
        cx, cy = x.support, y.support
        if set(cx).isdisjoint(cy):
            key = (cx, cy) if cx <= cy else (cy, cx)
            if key not in key_of:
                key_of[key] = len(keys)
                keys.append(key)
        else:
            direct.append((x, y))
    cand = []  # (float value, kind, payload)
    if keys:
        ends = np.array([[k[0][0], k[0][-1], k[1][0], k[1][-1]] for k in keys])
        vals = segment_dist2_batch(F[ends[:, 0]], F[ends[:, 1]], F[ends[:, 2]], F[ends[:, 3]])
        cand += [(v, 0, k) for v, k in zip(vals.tolist(), keys)]
    if direct:
        A = np.array([evaluate_pl_float(f, x) for x, _ in direct])
        B = np.array([evaluate_pl_float(f, y) for _, y in direct])
        vals = np.einsum("ij,ij->i", A - B, A - B)
        cand += [(v, 1, p) for v, p in zip(vals.tolist(), direct)]
    lo = min(c[0] for c in cand)
    scale = 1.0 + float(np.max(np.abs(F))) ** 2 if F.size else 1.0
    band = lo * 1e-6 + 1e-12 * scale
    best, witness = None, ()
    for v, kind, payload in cand:
        if v > lo + band:
            continue
        if kind == 0:
            val = simplex_dist2([imgs[i] for i in payload[0]], [imgs[i] for i in payload[1]])
            wit = payload
        else:
            val = dist2(evaluate_pl(f, payload[0]), evaluate_pl(f, payload[1]))
            wit = payload
        if best is None or val < best:
            best, witness = val, wit
    return SeparationBound(_lower_sqrt(best), 0.0, True, witness)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class LevelCertificate:
    alpha: float
    epsilon: float
    min_separation: float
    slack: float
    map: PLMap
    checked_points: tuple
    checked_pairs: np.ndarray

    @property
    def pair_count(self):
        return len(self.checked_pairs)

    def pairs(self):
        pts = self.checked_points
        return [(pts[i], pts[j]) for i, j in self.checked_pairs]


@dataclass(frozen=True, eq=False)
class EmbeddingCertificate:
    system: InverseSystem
    levels: tuple
    label: str  # "exact" (d <= 1) or "sampled"
    seed: object = None

    @property
    def alpha(self):
        return [lv.alpha for lv in self.levels]

    @property
    def epsilon(self):
        return [lv.epsilon for lv in self.levels]

    @property
    def maps(self):
        return [lv.map for lv in self.levels]

    @property
    def slack(self):
        return [lv.slack for lv in self.levels]

    @property
    def target_dim(self):
        return self.levels[0].map.target_dim


def _eval_on_level(f: PLMap, K: SimplicialComplex, x: ComplexPoint):
    if f.source == K:
        return evaluate_pl(f, x)
    return evaluate_pl(f, x, K)


def embed_inverse_limit(system: InverseSystem, exhaustion: OffDiagonalExhaustion = None,
                        seed=0, tol=DEFAULT_TOL, verify=True) -> EmbeddingCertificate:
    """Build ``f_0 .. f_N`` with constants satisfying the four certificate conditions.

    ``f_0`` perturbs the constant map at the origin with ``eps = 1``.  At each
    level ``alpha_n = 0.9 * min_separation(f_n, K_n)``, ``epsilon_n = 0.9 *
    min(alpha_n/4, epsilon_{n-1}/2)``, and ``f_{n+1}`` approximates
    ``f_n o p_n`` within ``epsilon_n``.
    """
    if exhaustion is None:
        exhaustion = build_exhaustion(system)
    if exhaustion.system is not system:
        raise DomainError("exhaustion built for a different system", "inconsistent-exhaustion")
    rng = np.random.default_rng(seed)
    target = 2 * system.d + 1
    exact = system.d <= 1
    X0 = system.levels[0]
    f = approximate_by_embedding(PLMap(X0, [(0,) * target] * len(X0.vertices), target),
                                 1, rng=rng, tol=tol)
    out = []
    prev_alpha = prev_eps = None
    for n, Xn in enumerate(system.levels):
        pts, idx = exhaustion.checked(n)
        if len(idx):
            sep = min_separation(f, [(pts[i], pts[j]) for i, j in idx], domain=Xn,
                                 mesh_pitch=pitch(n))
            if not sep.bound > 0:
                raise CertificateViolation(f"f_{n} is not injective on K_{n}")
            alpha = ALPHA_FACTOR * sep.bound
            found, slack = sep.bound, sep.slack
        else:
            alpha = prev_alpha if prev_alpha is not None else 1.0
            found, slack = math.inf, 0.0
        eps = EPS_FACTOR * (alpha / 4 if prev_eps is None else min(alpha / 4, prev_eps / 2))
        out.append(LevelCertificate(alpha, eps, found, slack, f, tuple(pts), idx))
        prev_alpha, prev_eps = alpha, eps
        if n < system.depth:
            g0, err = compose(f, system.bonds[n], tol=eps / 4)
            f = approximate_by_embedding(g0, eps - 2 * err, rng=rng, tol=tol)
    cert = EmbeddingCertificate(system, tuple(out), "exact" if exact else "sampled", seed)
    if verify:
        report = verify_certificate(cert)
        if not report["ok"]:
            raise CertificateViolation(f"certificate check failed: {report}")
    return cert


def verify_certificate(cert: EmbeddingCertificate) -> dict:
    """Re-check every certificate condition and the partial-sum bound independently.

    Report keys: ``i`` separation of checked pairs is at least ``alpha_n``;
    ``ii`` ``epsilon_n < alpha_n / 4``; ``iii`` ``epsilon_n < epsilon_{n-1} / 2``;
    ``iv`` ``f_{n+1}`` stays within ``epsilon_n`` of ``f_n o p_n``.  Separation
    is re-measured by direct float evaluation on every checked pair (rather
    than through carrier-simplex distances); the closeness condition is
    checked exactly on a mesh of each level plus the vertices of the map's
    subdivision.
    """
    sys_ = cert.system
    lv = cert.levels
    report = {"i": [], "ii": [], "iii": [], "iv": [], "partial_sums": []}
    for n, L in enumerate(lv):
        K = sys_.levels[n]
        if L.pair_count:
            A = np.array([_float_eval(L.map, K, x) for x in L.checked_points])
            i, j = L.checked_pairs[:, 0], L.checked_pairs[:, 1]
            dmin = float(np.min(np.linalg.norm(A[i] - A[j], axis=1)))
            report["i"].append(dmin >= L.alpha and L.min_separation >= L.alpha)
        else:
            report["i"].append(True)
        report["ii"].append(L.epsilon < L.alpha / 4)
        if n >= 1:
            report["iii"].append(L.epsilon < lv[n - 1].epsilon / 2)
        if n < len(lv) - 1:
            nxt = lv[n + 1].map
            Kn1 = sys_.levels[n + 1]
            pts = mesh_points(Kn1, pitch(n + 1))
            extra = [Kn1.locate(v) for v in nxt.source.vertices] if nxt.source != Kn1 else []
            bound = Fraction(L.epsilon) ** 2
            ok = True
            for x in pts + extra:
                a = _eval_on_level(nxt, Kn1, x)
                b = _eval_on_level(L.map, K, sys_.project(n, x))
                if dist2(a, b) > bound:
                    ok = False
                    break
            report["iv"].append(ok)
        tail = sum(Fraction(m.epsilon) for m in lv[n:])
        report["partial_sums"].append(
            tail < 2 * Fraction(L.epsilon) and 2 * Fraction(L.epsilon) < Fraction(L.alpha) / 2)
    report["ok"] = all(all(v) for k, v in report.items() if isinstance(v, list))
    return report


def _float_eval(f, K, x):
    if f.source != K:
        x = f.source.locate(K.realize(x))
    return evaluate_pl_float(f, x)


def evaluate_limit_point(cert: EmbeddingCertificate, t: Thread) -> tuple:
    """``f_N(x_N)``: within ``2 * epsilon_N`` of the limit map at this thread."""
    check_thread(cert.system, t)
    N = len(cert.levels) - 1
    y = _eval_on_level(cert.levels[N].map, cert.system.levels[N], t.points[N])
    return tuple(float(c) for c in y)


def limit_deviation(cert: EmbeddingCertificate, t: Thread) -> list:
    """``|f_N(x_N) - f_n(x_n)|`` for each level ``n``."""
    y = np.array(evaluate_limit_point(cert, t))
    out = []
    for n, L in enumerate(cert.levels):
        z = _float_eval(L.map, cert.system.levels[n], t.points[n])
        out.append(float(np.linalg.norm(y - z)))
    return out


# ---------------------------------------------------------------------------
# JSON


def system_to_json(system: InverseSystem) -> dict:
    return {
        "schema_version": 1,
        "levels": [complex_to_json(K) for K in system.levels],
        "bonds": [[[fraction_to_json(c) for c in y] for y in p.images] for p in system.bonds],
    }


def system_from_json(doc) -> InverseSystem:
    try:
        levels = [complex_from_json(c) for c in doc["levels"]]
        bonds = []
        for n, imgs in enumerate(doc["bonds"]):
            bonds.append(PLMap(levels[n + 1], [[to_fraction(c) for c in y] for y in imgs],
                               levels[n].ambient_dim))
    except (KeyError, TypeError, IndexError) as exc:
        raise MalformedInput(f"bad inverse-system JSON: {exc}") from exc
    return InverseSystem(levels, bonds)


def _num(x):
    return None if x is None or not math.isfinite(x) else float(x)


def certificate_to_json(cert: EmbeddingCertificate) -> dict:
    return {
        "schema_version": 1,
        "label": cert.label,
        "seed": cert.seed,
        "target_dim": cert.target_dim,
        "alpha": [_num(a) for a in cert.alpha],
        "epsilon": [_num(e) for e in cert.epsilon],
        "min_separation": [_num(lv.min_separation) for lv in cert.levels],
        "slack": [_num(s) for s in cert.slack],
        "checked_pairs": [lv.pair_count for lv in cert.levels],
        "maps": [
            {"source": complex_to_json(lv.map.source),
             "images": [[float(c) for c in y] for y in lv.map.images]}
            for lv in cert.levels
        ],
    }
