"""Plane drawings of trees and planar G-dendrites, written as bare SVG.

Trees use a balloon layout: every vertex owns a disk containing its whole
subtree, and the children's disks sit in disjoint angular slots of the
parent's disk.  Each child disk is at most ``decay`` times the size of its
parent's, so the subtree hanging ``j`` steps below the root has diameter at
most ``decay**j`` times the root disk's diameter.

The only SVG elements written are ``line`` and ``circle``.  Coordinates are
printed with 12 significant digits; :func:`svg_segments` reads them back as
exact rationals so :func:`find_crossings` can check the drawing exactly.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError, MalformedInput
from .gdendrite import GDendrite
from .geometry import orient2d, segments_intersect_2d
from .planarity import is_planar
from .trees import PointedTree

SLOT_FILL = 0.9
MAX_CHILD_SPREAD = 270.0


@dataclass(frozen=True)
class RenderConfig:
    spread_deg: float = 360.0
    decay: float = 0.5
    stroke: float = 1.5
    canvas: int = 800

    def __post_init__(self):
        if not 0 < self.decay < 1:
            raise MalformedInput("decay factor must lie in (0, 1)")
        if not 0 < self.spread_deg <= 360:
            raise MalformedInput("angular spread must lie in (0, 360]")
        if self.stroke <= 0 or self.canvas <= 0:
            raise MalformedInput("stroke and canvas must be positive")


@dataclass
class Layout:
    """Drawn positions; ``segments`` are ``(p, q, level)`` with ``p, q`` keys of ``pos``."""

    pos: dict = field(default_factory=dict)
    segments: list = field(default_factory=list)
    level: dict = field(default_factory=dict)  # vertex key -> depth below its tree root
    radius: dict = field(default_factory=dict)  # vertex key -> radius of its disk
    subtree: dict = field(default_factory=dict)  # vertex key -> keys in its subtree
    marks: list = field(default_factory=list)
    root_scale: float = 0.0  # bound on the whole drawing's bounding-box diagonal


def _balloon(tree: PointedTree, key, lay: Layout, origin, rho, direction, spread, cfg, level0=0):
    """Lay out ``tree`` with its root at ``origin`` inside a disk of radius ``rho``.

    Children of the root share ``spread`` radians centred on ``direction``;
    deeper vertices use at most ``MAX_CHILD_SPREAD`` degrees pointing away
    from their parent.
    """
    stack = [(0, origin, rho, direction, spread, level0)]
    while stack:
        v, p, r, d, w, lev = stack.pop()
        kv = key(v)
        lay.pos[kv] = p
        lay.level[kv] = lev
        lay.radius[kv] = r
        kids = tree.children[v]
        if not kids:
            continue
        slot = w / len(kids)
        s = math.sin(min(slot, math.pi) / 2)
        rc = r * min(cfg.decay, SLOT_FILL * s / (1 + SLOT_FILL * s))
        dist = rc / (SLOT_FILL * s)
        child_spread = math.radians(min(cfg.spread_deg, MAX_CHILD_SPREAD))
        for i, c in enumerate(kids):
            theta = d - w / 2 + slot * (i + 0.5)
            q = (p[0] + dist * math.cos(theta), p[1] + dist * math.sin(theta))
            lay.segments.append((kv, key(c), lev + 1))
            stack.append((c, q, rc, theta, child_spread, lev + 1))
    for v in reversed(tree.order):
        lay.subtree[key(v)] = [key(v)] + [x for c in tree.children[v] for x in lay.subtree[key(c)]]


def layout_tree(tree: PointedTree, cfg: RenderConfig) -> Layout:
    lay = Layout()
    half = cfg.canvas / 2
    rho = 0.45 * cfg.canvas
    _balloon(tree, lambda v: v, lay, (half, half), rho, -math.pi / 2,
             math.radians(cfg.spread_deg), cfg)
    # diagonal of the square around the root disk: every level-j subtree box fits under decay^j times this
    lay.root_scale = 2 * math.sqrt(2) * rho
    return lay


# ---------------------------------------------------------------------------
# G-dendrites


def _seg_point_dist(p, a, b):
    ax, ay = b[0] - a[0], b[1] - a[1]
    L2 = ax * ax + ay * ay
    t = 0.0 if L2 == 0 else max(0.0, min(1.0, ((p[0] - a[0]) * ax + (p[1] - a[1]) * ay) / L2))
    return math.hypot(p[0] - a[0] - t * ax, p[1] - a[1] - t * ay)


def _largest_gap(angles):
    """``(centre, width)`` of the widest empty arc between the given directions."""
    if not angles:
        return -math.pi / 2, 2 * math.pi
    a = sorted(x % (2 * math.pi) for x in angles)
    best = None
    for i, x in enumerate(a):
        y = a[(i + 1) % len(a)] + (2 * math.pi if i == len(a) - 1 else 0)
        if best is None or y - x > best[1] + 1e-12:
            best = (x + (y - x) / 2, y - x)
    return best


def layout_gdendrite(X: GDendrite, cfg: RenderConfig) -> Layout:
    """Planar straight-line drawing of the base with each fiber ballooned at its site.

    Base edges are cut in three before the planar layout so loops and
    parallel edges become simple paths.
    """
    import networkx as nx

    G = X.base
    if not is_planar(G):
        raise DomainError("base graph is not planar", "nonplanar-base")
    H = nx.Graph()
    H.add_nodes_from(("g", v) for v in G.vertices)
    paths = {}
    for e in G.edges:
        a, b = ("a", e.id, 1), ("a", e.id, 2)
        H.add_edges_from([(("g", e.u), a), (a, b), (b, ("g", e.v))])
        paths[e.id] = [("g", e.u), a, b, ("g", e.v)]
    raw = nx.planar_layout(H) if len(H) > 1 else {n: (0.0, 0.0) for n in H}
    xs = [float(p[0]) for p in raw.values()]
    ys = [float(p[1]) for p in raw.values()]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    margin = 0.1 * cfg.canvas
    scale = (cfg.canvas - 2 * margin) / span
    pos = {n: (margin + (float(p[0]) - min(xs)) * scale, margin + (float(p[1]) - min(ys)) * scale)
           for n, p in raw.items()}
    lay = Layout()
    base_segs = []
    site_at = {}
    for e in G.edges:
        path = paths[e.id]
        cuts = sorted((G.point_key(g)[2], k) for k, (g, _) in enumerate(X.fibers)
                      if G.point_key(g)[0] == "e" and G.point_key(g)[1] == e.id)
        stops = [(Fraction(0), path[0]), (e.length / 3, path[1]), (2 * e.length / 3, path[2]),
                 (e.length, path[3])]
        chain = []
        for t, k in cuts:
            i = next(i for i in range(3) if stops[i][0] <= t <= stops[i + 1][0])
            (t0, n0), (t1, n1) = stops[i], stops[i + 1]
            s = float((t - t0) / (t1 - t0))
            p0, p1 = pos[n0], pos[n1]
            pos[("s", k)] = (p0[0] + s * (p1[0] - p0[0]), p0[1] + s * (p1[1] - p0[1]))
            site_at[k] = ("s", k)
            chain.append((t, ("s", k)))
        chain = sorted(chain + stops, key=lambda c: c[0])
        for (_, a), (_, b) in zip(chain, chain[1:]):
            base_segs.append((a, b))
    for k, (g, _) in enumerate(X.fibers):
        key = G.point_key(g)
        if key[0] == "v":
            site_at[k] = ("g", key[1])
    lay.pos.update(pos)
    for a, b in base_segs:
        lay.segments.append((a, b, 0))
    for k, (g, tree) in enumerate(X.fibers):
        if tree.is_trivial:
            continue
        sk = site_at[k]
        p = pos[sk]
        incident = [b if a == sk else a for a, b in base_segs if sk in (a, b)]
        dirs = [math.atan2(pos[n][1] - p[1], pos[n][0] - p[0]) for n in incident]
        centre, width = _largest_gap(dirs)
        width = min(width * 0.8, math.radians(cfg.spread_deg))
        room = [_seg_point_dist(p, pos[a], pos[b]) for a, b in base_segs if sk not in (a, b)]
        room += [math.dist(p, pos[site_at[j]]) / 2 for j, (_, t) in enumerate(X.fibers)
                 if j != k and not t.is_trivial]
        rho = 0.45 * min(room) if room else 0.2 * cfg.canvas
        _balloon(tree, lambda u, k=k, sk=sk: sk if u == 0 else ("f", k, u), lay, p, rho, centre,
                 width, cfg, level0=1)
    lay.root_scale = cfg.canvas
    return lay


# ---------------------------------------------------------------------------
# SVG


def _fmt(x):
    return format(float(x), ".12g")


def layout_model(model, cfg: RenderConfig) -> Layout:
    from .berkovich_model import PuncturedModel, StarModel

    if isinstance(model, PuncturedModel):
        # removed endpoints are named as in the flattened model, which the layouts share
        lay = layout_model(model.model, cfg)
        lay.marks.extend(model.removed)
        return lay
    if isinstance(model, StarModel):
        model = model.tree
    if isinstance(model, PointedTree):
        return layout_tree(model, cfg)
    if isinstance(model, GDendrite):
        return layout_gdendrite(model, cfg)
    raise MalformedInput(f"cannot render a {type(model).__name__}")


def render_svg(model, cfg: RenderConfig | None = None) -> str:
    """SVG document for a tree, star, punctured model or planar G-dendrite."""
    cfg = cfg or RenderConfig()
    lay = layout_model(model, cfg)
    return layout_to_svg(lay, cfg)


def layout_to_svg(lay: Layout, cfg: RenderConfig) -> str:
    c = cfg.canvas
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{c}" height="{c}" '
        f'viewBox="0 0 {c} {c}">',
    ]
    for a, b, lev in lay.segments:
        p, q = lay.pos[a], lay.pos[b]
        w = cfg.stroke * max(0.2, cfg.decay ** lev)
        lines.append(f'<line x1="{_fmt(p[0])}" y1="{_fmt(p[1])}" x2="{_fmt(q[0])}" '
                     f'y2="{_fmt(q[1])}" stroke="black" stroke-width="{_fmt(w)}" '
                     f'stroke-linecap="round"/>')
    for m in lay.marks:
        p = lay.pos[m]
        lines.append(f'<circle cx="{_fmt(p[0])}" cy="{_fmt(p[1])}" r="{_fmt(2 * cfg.stroke)}" '
                     f'fill="white" stroke="black" stroke-width="{_fmt(cfg.stroke / 2)}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


_LINE = re.compile(r'<line x1="([^"]+)" y1="([^"]+)" x2="([^"]+)" y2="([^"]+)"')
_TAG = re.compile(r"<([a-zA-Z]+)[\s/>]")


def svg_elements(svg: str):
    """Names of the drawing elements used (excluding the ``svg`` root)."""
    return sorted({t for t in _TAG.findall(svg) if t != "svg"})


def svg_segments(svg: str):
    """Line elements of ``svg`` as exact rational endpoint pairs."""
    out = []
    for m in _LINE.finditer(svg):
        x1, y1, x2, y2 = (Fraction(v) for v in m.groups())
        out.append(((x1, y1), (x2, y2)))
    return out


def _touch_ok(s, t):
    """Segments sharing an endpoint may only meet there."""
    shared = {s[0], s[1]} & {t[0], t[1]}
    if not shared:
        return False
    p = next(iter(shared))
    a = s[1] if s[0] == p else s[0]
    b = t[1] if t[0] == p else t[0]
    if orient2d(p, a, b) != 0:
        return True
    # collinear: fine only if they leave the shared point in opposite directions
    return (a[0] - p[0]) * (b[0] - p[0]) + (a[1] - p[1]) * (b[1] - p[1]) < 0


def find_crossings(segments, limit=1):
    """Pairs of segments meeting anywhere other than at a shared endpoint.

    Uses a sweep over x-extents, then the exact predicate.  Stops after
    ``limit`` hits (``None`` for all).
    """
    segs = [tuple(s) for s in segments]
    order = sorted(range(len(segs)), key=lambda i: min(segs[i][0][0], segs[i][1][0]))
    active = []
    hits = []
    for i in order:
        s = segs[i]
        lo = min(s[0][0], s[1][0])
        active = [j for j in active if max(segs[j][0][0], segs[j][1][0]) >= lo]
        ylo, yhi = min(s[0][1], s[1][1]), max(s[0][1], s[1][1])
        for j in active:
            t = segs[j]
            if max(t[0][1], t[1][1]) < ylo or min(t[0][1], t[1][1]) > yhi:
                continue
            if segments_intersect_2d(s[0], s[1], t[0], t[1]) and not _touch_ok(s, t):
                hits.append((j, i))
                if limit is not None and len(hits) >= limit:
                    return hits
        active.append(i)
    return hits


# ---------------------------------------------------------------------------
# 3D figure of an embedding


def save_embedding_figure(cert, path, threads=()):
    """PNG of the last map of ``cert`` (edges of the top level) plus thread images."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    f = cert.levels[-1].map
    Y = np.array(f.float_images)
    if Y.shape[1] < 3:
        Y = np.hstack([Y, np.zeros((len(Y), 3 - Y.shape[1]))])
    fig = plt.figure(figsize=(6, 6), dpi=100)
    ax = fig.add_subplot(projection="3d")
    for s in f.source.edges:
        ax.plot(*Y[list(s), :3].T, color="black", linewidth=0.8)
    if threads:
        P = np.array([list(t) + [0.0] * (3 - len(t)) for t in threads])
        ax.scatter(P[:, 0], P[:, 1], P[:, 2], s=6, color="tab:red")
    ax.set_title(f"level {len(cert.levels) - 1}: {len(f.source.edges)} edges in R^{f.target_dim}")
    fig.savefig(path, format="png", metadata={"Software": None})
    plt.close(fig)
