"""Exact closed-form distances between points and segments, any dimension."""

from fractions import Fraction

import numpy as np

from .complex_core import dot, sub


def _clamp01(x):
    return Fraction(0) if x < 0 else Fraction(1) if x > 1 else x


def _q(d1, d2, r, s, t):
    # |r + s*d1 - t*d2|^2
    v = tuple(ri + s * a - t * b for ri, a, b in zip(r, d1, d2))
    return dot(v, v)


def segment_segment_dist2(p0, p1, q0, q1) -> Fraction:
    """Squared distance between segments [p0,p1] and [q0,q1], exactly.

    The squared distance is a convex quadratic in the two segment parameters,
    so its minimum over the unit square is either the interior critical point
    or a minimum along one of the four sides.  All candidates are rational.
    """
    d1 = sub(p1, p0)
    d2 = sub(q1, q0)
    r = sub(p0, q0)
    a, b, c = dot(d1, d1), dot(d1, d2), dot(d2, d2)
    d, e = dot(d1, r), dot(d2, r)
    cands = []
    det = a * c - b * b
    if det > 0:
        s = (b * e - c * d) / det
        t = (a * e - b * d) / det
        if 0 <= s <= 1 and 0 <= t <= 1:
            cands.append((s, t))
    for s in (Fraction(0), Fraction(1)):
        t = _clamp01((b * s + e) / c) if c else Fraction(0)
        cands.append((s, t))
    for t in (Fraction(0), Fraction(1)):
        s = _clamp01((b * t - d) / a) if a else Fraction(0)
        cands.append((s, t))
    return min(_q(d1, d2, r, s, t) for s, t in cands)


def point_segment_dist2(p, q0, q1) -> Fraction:
    return segment_segment_dist2(p, p, q0, q1)


def simplex_dist2(a, b) -> Fraction:
    """Squared distance between two simplices of dimension <= 1 (lists of points)."""
    if len(a) > 2 or len(b) > 2:
        raise ValueError("only points and segments are supported")
    a0, a1 = a[0], a[-1]
    b0, b1 = b[0], b[-1]
    return segment_segment_dist2(a0, a1, b0, b1)


def orient2d(a, b, c):
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a, b, p):
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def segments_intersect_2d(a, b, c, d) -> bool:
    """Exact closed-segment intersection test in the plane."""
    o1, o2 = orient2d(a, b, c), orient2d(a, b, d)
    o3, o4 = orient2d(c, d, a), orient2d(c, d, b)
    if ((o1 > 0 and o2 < 0) or (o1 < 0 and o2 > 0)) and \
            ((o3 > 0 and o4 < 0) or (o3 < 0 and o4 > 0)):
        return True
    if o1 == 0 and _on_segment(a, b, c):
        return True
    if o2 == 0 and _on_segment(a, b, d):
        return True
    if o3 == 0 and _on_segment(c, d, a):
        return True
    if o4 == 0 and _on_segment(c, d, b):
        return True
    return False


def segment_dist2_batch(P0, P1, Q0, Q1):
    """Float version of :func:`segment_segment_dist2` over arrays of shape ``(k, n)``."""
    P0, P1, Q0, Q1 = (np.asarray(x, dtype=float) for x in (P0, P1, Q0, Q1))
    d1, d2, r = P1 - P0, Q1 - Q0, P0 - Q0
    a = np.einsum("ij,ij->i", d1, d1)
    b = np.einsum("ij,ij->i", d1, d2)
    c = np.einsum("ij,ij->i", d2, d2)
    d = np.einsum("ij,ij->i", d1, r)
    e = np.einsum("ij,ij->i", d2, r)

    def q(s, t):
        v = r + s[:, None] * d1 - t[:, None] * d2
        return np.einsum("ij,ij->i", v, v)

    safe_a = np.where(a > 0, a, 1.0)
    safe_c = np.where(c > 0, c, 1.0)
    best = np.full(len(a), np.inf)
    for s0 in (0.0, 1.0):
        s = np.full(len(a), s0)
        t = np.where(c > 0, np.clip((b * s0 + e) / safe_c, 0, 1), 0.0)
        best = np.minimum(best, q(s, t))
    for t0 in (0.0, 1.0):
        t = np.full(len(a), t0)
        s = np.where(a > 0, np.clip((b * t0 - d) / safe_a, 0, 1), 0.0)
        best = np.minimum(best, q(s, t))
    det = a * c - b * b
    ok = det > 1e-300
    safe = np.where(ok, det, 1.0)
    s = (b * e - c * d) / safe
    t = (a * e - b * d) / safe
    inside = ok & (s >= 0) & (s <= 1) & (t >= 0) & (t <= 1)
    best = np.where(inside, np.minimum(best, q(np.clip(s, 0, 1), np.clip(t, 0, 1))), best)
    return best
