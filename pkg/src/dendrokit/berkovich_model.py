"""Homeomorphism types of analytic curves from coarse field/curve data, and
finite models of those types.

A :class:`CurveSpec` records the value group of the field (trivial, discrete
or dense), whether the field has a countable dense subset, smoothness,
connectedness and, optionally, the skeleton graph.  :func:`homeomorphism_type`
turns that into a verdict; :func:`build_model` produces a finite approximant
and :func:`inverse_system_of_skeleta` exposes its construction stages as an
inverse system of 1-complexes ready for :func:`embed_inverse_limit`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .complex_core import PLMap, SimplicialComplex
from .embed_engine import InverseSystem
from .errors import DomainError, MalformedInput
from .gdendrite import GDendrite, universal_g_dendrite_approximant
from .graph_topology import MetricGraph, core_skeleton, first_betti
from .homeomorphism import HomeoForm, canonical_homeomorphism_form
from .trees import ConstructionLog, PointedTree, wazewski_approximant

VALUE_GROUPS = ("trivial", "discrete", "dense")
TAGS = ("W", "W_G", "disjoint-union", "star-compactification", "undetermined")


def _bad(msg):
    return MalformedInput(msg, "malformed-spec")


@dataclass(frozen=True)
class CurveSpec:
    value_group: str
    smooth: bool = True
    connected: bool = True
    residue_countable: bool = True
    skeleton: MetricGraph | None = None
    closed_point_count_hint: int | None = None
    punctures: int = 0
    components: tuple = ()

    def __post_init__(self):
        if self.value_group not in VALUE_GROUPS:
            raise _bad(f"value_group must be one of {VALUE_GROUPS}")
        for name in ("smooth", "connected", "residue_countable"):
            if not isinstance(getattr(self, name), bool):
                raise _bad(f"{name} must be a boolean")
        if not isinstance(self.punctures, int) or self.punctures < 0:
            raise _bad("punctures must be a non-negative integer")
        hint = self.closed_point_count_hint
        if hint is not None and (not isinstance(hint, int) or hint < 0):
            raise _bad("closed_point_count_hint must be a non-negative integer")
        G = self.skeleton
        if G is not None and not G.is_empty and core_skeleton(G) != G:
            raise _bad("skeleton must equal its own core skeleton")

    @classmethod
    def from_json(cls, doc) -> "CurveSpec":
        if not isinstance(doc, dict):
            raise _bad("spec must be a JSON object")
        known = {"schema_version", "value_group", "smooth", "connected", "residue_countable",
                 "skeleton", "closed_point_count_hint", "punctures", "components"}
        extra = set(doc) - known
        if extra:
            raise _bad(f"unknown spec fields {sorted(extra)}")
        if "value_group" not in doc:
            raise _bad("value_group is required")
        skel = doc.get("skeleton")
        if skel is not None:
            try:
                skel = MetricGraph.from_json(skel)
            except DomainError as exc:
                raise _bad(f"skeleton: {exc}") from exc
        comps = tuple(cls.from_json(c) for c in doc.get("components", ()))
        return cls(
            value_group=doc["value_group"],
            smooth=doc.get("smooth", True),
            connected=doc.get("connected", True),
            residue_countable=doc.get("residue_countable", True),
            skeleton=skel,
            closed_point_count_hint=doc.get("closed_point_count_hint"),
            punctures=doc.get("punctures", 0),
            components=comps,
        )

    def to_json(self):
        doc = {
            "schema_version": 1,
            "value_group": self.value_group,
            "smooth": self.smooth,
            "connected": self.connected,
            "residue_countable": self.residue_countable,
            "punctures": self.punctures,
        }
        if self.skeleton is not None:
            doc["skeleton"] = self.skeleton.to_json()
        if self.closed_point_count_hint is not None:
            doc["closed_point_count_hint"] = self.closed_point_count_hint
        if self.components:
            doc["components"] = [c.to_json() for c in self.components]
        return doc


@dataclass(frozen=True)
class TypeVerdict:
    tag: str
    G: HomeoForm | None = None
    reason: str = ""
    components: tuple = ()

    def to_json(self):
        doc = {"schema_version": 1, "tag": self.tag}
        if self.G is not None:
            doc["G"] = self.G.to_json()
        if self.reason:
            doc["reason"] = self.reason
        if self.components:
            doc["components"] = [c.to_json() for c in self.components]
        return doc


def homeomorphism_type(spec: CurveSpec) -> TypeVerdict:
    """Classify the analytification described by ``spec``.

    Disconnected specs are classified componentwise.  Smooth connected
    curves over a field with a countable dense subset are the universal
    dendrite when the skeleton has no cycles, and the universal
    G-dendrite over the suppressed skeleton otherwise; with the trivial
    value group they are the star compactification.  Anything else is
    reported as undetermined with a reason.
    """
    if not isinstance(spec, CurveSpec):
        raise _bad("expected a CurveSpec")
    if not spec.connected:
        return TypeVerdict("disjoint-union", components=tuple(homeomorphism_type(c) for c in spec.components))
    if not spec.smooth:
        return TypeVerdict("undetermined", reason=(
            "curve is not smooth; singular points can create branch points of finite "
            "degree, so no classification is attempted"))
    if spec.value_group == "trivial":
        return TypeVerdict("star-compactification")
    if not spec.residue_countable:
        return TypeVerdict("undetermined", reason="field has no countable dense subset")
    G = spec.skeleton
    if G is None or G.is_empty or first_betti(G) == 0:
        return TypeVerdict("W")
    return TypeVerdict("W_G", G=canonical_homeomorphism_form(G))


# ---------------------------------------------------------------------------
# models


@dataclass
class StarModel:
    """``arms`` unit segments sharing the basepoint (root of ``tree``)."""

    tree: PointedTree
    arms: int

    def to_json(self):
        return {"schema_version": 1, "kind": "star", "arms": self.arms, "tree": self.tree.to_json()}


def star_model(arms: int) -> StarModel:
    log = ConstructionLog(level=[0] * (arms + 1), kind=["root"] + ["tip"] * arms,
                          edge_level=[0] * (arms + 1))
    tree = PointedTree([-1] + [0] * arms, [0] + [1] * arms, log)
    return StarModel(tree, arms)


def build_model(spec: CurveSpec, k: int = 2, b: int = 3, lam=Fraction(1, 2)):
    """Finite approximant of the space classified by ``spec``.

    Returns a :class:`PointedTree`, :class:`GDendrite` or :class:`StarModel`.
    """
    verdict = homeomorphism_type(spec)
    if verdict.tag == "W":
        return wazewski_approximant(k, b, lam)
    if verdict.tag == "W_G":
        return universal_g_dendrite_approximant(spec.skeleton, k, b, lam)
    if verdict.tag == "star-compactification":
        hint = spec.closed_point_count_hint
        return star_model(b if hint is None else min(b, hint))
    raise DomainError(f"no model for verdict {verdict.tag!r}", "undetermined-type")


def model_graph(model) -> MetricGraph:
    """The model as one metric graph (vertex ids are model-specific)."""
    if isinstance(model, PuncturedModel):
        return model_graph(model.model)
    if isinstance(model, StarModel):
        model = model.tree
    if isinstance(model, PointedTree):
        return MetricGraph(range(len(model)), model.edges())
    if isinstance(model, GDendrite):
        return model.flat.graph
    raise MalformedInput(f"not a model: {type(model).__name__}")


def model_to_json(model):
    if isinstance(model, PuncturedModel):
        return model.to_json()
    if isinstance(model, StarModel):
        return model.to_json()
    if isinstance(model, PointedTree):
        return {"schema_version": 1, "kind": "tree", "tree": model.to_json()}
    if isinstance(model, GDendrite):
        return {"schema_version": 1, "kind": "g-dendrite", "model": model.to_json()}
    raise MalformedInput(f"not a model: {type(model).__name__}")


def model_from_json(doc):
    try:
        kind = doc["kind"]
        if kind == "tree":
            return PointedTree.from_json(doc["tree"])
        if kind == "g-dendrite":
            return GDendrite.from_json(doc["model"])
        if kind == "star":
            return StarModel(PointedTree.from_json(doc["tree"]), int(doc["arms"]))
        if kind == "punctured":
            inner = model_from_json(doc["model"])
            return PuncturedModel(inner, tuple(_vertex_from_json(v) for v in doc["removed"]))
    except (KeyError, TypeError) as exc:
        raise MalformedInput(f"bad model JSON: {exc}") from exc
    raise MalformedInput(f"unknown model kind {doc.get('kind')!r}")


def _vertex_from_json(v):
    return tuple(_vertex_from_json(x) for x in v) if isinstance(v, list) else v


@dataclass
class PuncturedModel:
    """A model with some endpoints marked as removed; nothing else changes."""

    model: object
    removed: tuple = field(default_factory=tuple)

    def to_json(self):
        return {"schema_version": 1, "kind": "punctured", "model": model_to_json(self.model),
                "removed": [list(v) if isinstance(v, tuple) else v for v in self.removed]}


def leaves(model):
    G = model_graph(model)
    return [v for v in G.vertices if G.degree(v) == 1]


def puncture(model, k: int):
    """Mark the first ``k`` endpoints (in vertex order) as removed."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return model
    ends = leaves(model)
    if k > len(ends):
        raise DomainError(f"model has only {len(ends)} endpoints", "insufficient-leaves")
    return PuncturedModel(model, tuple(ends[:k]))


# ---------------------------------------------------------------------------
# staged skeleta


@dataclass
class _Leveled:
    """Full model as nodes with levels and global coordinates, plus fine edges.

    ``drop[v]`` is the node a level-``j`` node is sent to by the bond onto
    stage ``j - 1``: itself for subdivision points, the attachment site for
    branch tips.
    """

    level: list = field(default_factory=list)
    coord: list = field(default_factory=list)
    drop: list = field(default_factory=list)
    edges: list = field(default_factory=list)  # (a, b, length, level)

    def add(self, level, coord, drop=None):
        self.level.append(level)
        self.coord.append(coord)
        self.drop.append(len(self.level) - 1 if drop is None else drop)
        return len(self.level) - 1


class _Axes:
    """Hands out fresh standard basis vectors of a space sized afterwards."""

    def __init__(self):
        self.count = 0

    def new(self):
        self.count += 1
        return {self.count - 1: Fraction(1)}


def _affine(a, b, s):
    out = {i: (1 - s) * c for i, c in a.items()}
    for i, c in b.items():
        out[i] = out.get(i, Fraction(0)) + s * c
    return {i: c for i, c in out.items() if c}


def _add_tree(L: _Leveled, axes: _Axes, tree: PointedTree, root_node, base_level):
    log = tree.require_log()
    node = {0: root_node}
    for u in range(1, len(tree)):
        lev = base_level + log.level[u]
        if log.kind[u] == "split":
            upper, lower, s = log.split[u]
            node[u] = L.add(lev, _affine(L.coord[node[upper]], L.coord[node[lower]], s))
        else:
            node[u] = L.add(lev, axes.new())
            if lev > 0:
                # the attachment site is the first ancestor not newer than u
                a = tree.parent[u]
                while log.level[a] > log.level[u]:
                    a = tree.parent[a]
                L.drop[node[u]] = node[a]
    for u in range(1, len(tree)):
        L.edges.append((node[tree.parent[u]], node[u], tree.lengths[u], base_level + log.edge_level[u]))


def _leveled_tree(tree: PointedTree) -> _Leveled:
    L = _Leveled()
    axes = _Axes()
    root = L.add(0, {})
    _add_tree(L, axes, tree, root, 0)
    return L, axes


def _leveled_gdendrite(X: GDendrite) -> _Leveled:
    if X.site_levels is None:
        raise DomainError("G-dendrite has no site levels", "missing-construction-log")
    G = X.base
    L = _Leveled()
    axes = _Axes()
    vnode = {v: L.add(0, axes.new()) for v in G.vertices}
    site_node = {}
    on_edge = {e.id: [] for e in G.edges}
    for k, (g, _) in enumerate(X.fibers):
        key = G.point_key(g)
        if key[0] == "v":
            site_node[k] = vnode[key[1]]
        else:
            on_edge[key[1]].append((key[2], k))
    for e in G.edges:
        a1, a2 = L.add(0, axes.new()), L.add(0, axes.new())
        # the edge runs through two anchors so loops and parallel edges stay embedded
        stops = [(Fraction(0), vnode[e.u]), (e.length / 3, a1), (2 * e.length / 3, a2),
                 (e.length, vnode[e.v])]
        points = []
        for t, k in on_edge[e.id]:
            seg = next(i for i in range(3) if stops[i][0] <= t <= stops[i + 1][0])
            (t0, n0), (t1, n1) = stops[seg], stops[seg + 1]
            if t in (t0, t1):
                raise AssertionError("sites never coincide with edge anchors")
            site_node[k] = L.add(X.site_levels[k], _affine(L.coord[n0], L.coord[n1], (t - t0) / (t1 - t0)))
            points.append((t, site_node[k]))
        chain = sorted(points + [(t, n) for t, n in stops], key=lambda p: p[0])
        for (t0, n0), (t1, n1) in zip(chain, chain[1:]):
            L.edges.append((n0, n1, t1 - t0, 0))
    for k, (_, tree) in enumerate(X.fibers):
        if not tree.is_trivial:
            _add_tree(L, axes, tree, site_node[k], X.site_levels[k])
    return L, axes


def _stage_complex(L: _Leveled, dim, n):
    keep = [v for v in range(len(L.level)) if L.level[v] <= n]
    index = {v: i for i, v in enumerate(keep)}
    adj = {}
    for a, b, ln, lev in L.edges:
        if lev <= n:
            adj.setdefault(a, []).append((b, ln))
            adj.setdefault(b, []).append((a, ln))
    edges = {}
    for v in keep:
        for w, ln in adj.get(v, ()):
            prev, total = v, ln
            while L.level[w] > n:
                # suppressed subdivision point: exactly two stage edges meet here
                nxt = [(x, l2) for x, l2 in adj[w] if x != prev]
                prev, (w, l2) = w, nxt[0]
                total += l2
            key = tuple(sorted((index[v], index[w])))
            edges[key] = total
    coords = [_dense(L.coord[v], dim) for v in keep]
    simplices = [(i,) for i in range(len(keep))] + list(edges)
    return SimplicialComplex(coords, simplices, d=1, lengths=edges), keep


def _dense(c, dim):
    out = [Fraction(0)] * dim
    for i, x in c.items():
        out[i] = x
    return out


def inverse_system_of_skeleta(model, levels: int | None = None) -> InverseSystem:
    """Construction stages ``X_0 .. X_N`` of ``model`` as 1-complexes.

    ``X_n`` keeps everything created at level ``<= n``; the bond
    ``X_{n+1} -> X_n`` fixes ``X_n`` and collapses each level-``(n+1)``
    branch onto its attachment point.  All stages share one ambient space
    in which branch tips sit at distinct standard basis vectors, so each
    stage is embedded and edge lengths are carried explicitly.
    """
    if isinstance(model, PuncturedModel):
        model = model.model
    if isinstance(model, StarModel):
        model = model.tree
    if isinstance(model, PointedTree):
        L, axes = _leveled_tree(model)
    elif isinstance(model, GDendrite):
        L, axes = _leveled_gdendrite(model)
    else:
        raise DomainError(f"cannot stage a {type(model).__name__}", "missing-construction-log")
    depth = max(L.level)
    N = depth if levels is None else min(int(levels), depth)
    dim = max(axes.count, 1)
    stages = [_stage_complex(L, dim, n) for n in range(N + 1)]
    bonds = []
    for n in range(N):
        K, keep = stages[n + 1]
        images = [_dense(L.coord[L.drop[v]] if L.level[v] == n + 1 else L.coord[v], dim) for v in keep]
        bonds.append(PLMap(K, images, dim))
    return InverseSystem([K for K, _ in stages], bonds, check=False)


def spec_from_json_text(text):
    import json

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _bad(f"spec is not valid JSON: {exc}") from exc
    return CurveSpec.from_json(doc)

