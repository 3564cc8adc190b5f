"""Planarity by incremental path addition, with Kuratowski witnesses.

The production test is the Demoucron-Malgrange-Pertuiset path-addition
algorithm run on each biconnected block of the underlying simple graph.  A
witness is extracted by deleting edges while the graph stays nonplanar; what
survives is a subdivision of K5 or K3,3.  :func:`has_kuratowski_subdivision`
is an exhaustive search used as an independent oracle on small graphs.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .graph_topology import MetricGraph


def simple_graph(G: MetricGraph):
    """``(vertices, {frozenset(u, v): edge_id})`` dropping loops and parallel copies."""
    pairs = {}
    for e in G.edges:
        if e.is_loop:
            continue
        key = frozenset((e.u, e.v))
        pairs.setdefault(key, e.id)
    return list(G.vertices), pairs


def _adjacency(vertices, pairs):
    adj = {v: [] for v in vertices}
    for key in pairs:
        a, b = tuple(key)
        adj[a].append(b)
        adj[b].append(a)
    order = {v: k for k, v in enumerate(vertices)}
    for v in adj:
        adj[v].sort(key=order.__getitem__)
    return adj


def biconnected_blocks(vertices, pairs):
    """Edge sets (as lists of frozensets) of the biconnected blocks."""
    adj = _adjacency(vertices, pairs)
    index, low = {}, {}
    blocks = []
    estack = []
    counter = 0
    for root in vertices:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack = [(root, None, iter(adj[root]))]
        while stack:
            v, parent, it = stack[-1]
            pushed = False
            for w in it:
                if w == parent:
                    continue
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    estack.append(frozenset((v, w)))
                    stack.append((w, v, iter(adj[w])))
                    pushed = True
                    break
                if index[w] < index[v]:
                    estack.append(frozenset((v, w)))
                    low[v] = min(low[v], index[w])
            if pushed:
                continue
            stack.pop()
            if parent is not None:
                low[parent] = min(low[parent], low[v])
                if low[v] >= index[parent]:
                    block = []
                    target = frozenset((parent, v))
                    while True:
                        e = estack.pop()
                        block.append(e)
                        if e == target:
                            break
                    blocks.append(block)
    return blocks


def _find_cycle(vertices, adj):
    start = vertices[0]
    parent = {start: None}
    stack = [(start, iter(adj[start]))]
    while stack:
        v, it = stack[-1]
        for w in it:
            if w == parent[v]:
                continue
            if w in parent:
                cyc = [v]
                x = v
                while x != w:
                    x = parent[x]
                    cyc.append(x)
                return cyc
            parent[w] = v
            stack.append((w, iter(adj[w])))
            break
        else:
            stack.pop()
    return None


def _dmp_block(edges) -> bool:
    verts = sorted({v for e in edges for v in e}, key=repr)
    V, E = len(verts), len(edges)
    if V <= 4 or E <= 8:
        return True
    if E > 3 * V - 6:
        return False
    eset = set(edges)
    adj = _adjacency(verts, eset)
    cyc = _find_cycle(verts, adj)
    Hv = set(cyc)
    He = {frozenset((cyc[k], cyc[(k + 1) % len(cyc)])) for k in range(len(cyc))}
    faces = [list(cyc), list(reversed(cyc))]
    order = {v: k for k, v in enumerate(verts)}
    while len(He) < E:
        fragments = []
        for e in sorted(eset - He, key=lambda e: sorted(order[x] for x in e)):
            a, b = tuple(e)
            if a in Hv and b in Hv:
                fragments.append(({a, b}, [a, b] if order[a] < order[b] else [b, a], None))
        seen = set()
        for v in verts:
            if v in Hv or v in seen:
                continue
            comp = {v}
            queue = deque([v])
            attach = set()
            while queue:
                x = queue.popleft()
                for y in adj[x]:
                    if y in Hv:
                        attach.add(y)
                    elif y not in comp:
                        comp.add(y)
                        queue.append(y)
            seen |= comp
            fragments.append((attach, None, comp))
        choice = None
        for attach, path, comp in fragments:
            ok = [k for k, f in enumerate(faces) if attach <= set(f)]
            if not ok:
                return False
            if choice is None or (len(ok) == 1 and len(choice[3]) > 1):
                choice = (attach, path, comp, ok)
        attach, path, comp, ok = choice
        if path is None:
            a, b = sorted(attach, key=order.__getitem__)[:2]
            path = _path_through(a, b, comp, adj)
        face = faces.pop(ok[0])
        i, j = face.index(path[0]), face.index(path[-1])
        n = len(face)
        arc1 = [face[(i + k) % n] for k in range((j - i) % n + 1)]
        arc2 = [face[(j + k) % n] for k in range((i - j) % n + 1)]
        inner = path[1:-1]
        faces.append(arc1 + list(reversed(inner)))
        faces.append(arc2 + inner)
        Hv.update(path)
        He.update(frozenset((path[k], path[k + 1])) for k in range(len(path) - 1))
    return True


def _path_through(a, b, comp, adj):
    prev = {a: None}
    queue = deque(y for y in adj[a] if y in comp)
    for y in queue:
        prev[y] = a
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y == b:
                path = [b, x]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return list(reversed(path))
            if y in comp and y not in prev:
                prev[y] = x
                queue.append(y)
    raise AssertionError("fragment does not connect its attachments")


def _planar_pairs(vertices, pairs) -> bool:
    return all(_dmp_block(block) for block in biconnected_blocks(vertices, pairs))


def is_planar(G: MetricGraph) -> bool:
    """True iff ``G`` has no subdivision of K5 or K3,3."""
    vertices, pairs = simple_graph(G)
    return _planar_pairs(vertices, pairs)


@dataclass(frozen=True)
class KuratowskiWitness:
    kind: str  # "K5" or "K3,3"
    edge_ids: tuple
    branch_vertices: tuple

    def to_json(self):
        return {"kind": self.kind, "edges": list(self.edge_ids),
                "branch_vertices": list(self.branch_vertices)}


def find_kuratowski_subdivision(G: MetricGraph):
    """A K5 or K3,3 subdivision inside ``G`` (edge ids), or None if planar."""
    vertices, pairs = simple_graph(G)
    if _planar_pairs(vertices, pairs):
        return None
    keep = dict(pairs)
    for key in sorted(pairs, key=lambda k: pairs[k]):
        trial = {k: v for k, v in keep.items() if k != key}
        if not _planar_pairs(vertices, trial):
            keep = trial
    deg = {}
    for key in keep:
        for v in key:
            deg[v] = deg.get(v, 0) + 1
    order = {v: k for k, v in enumerate(vertices)}
    branch = sorted((v for v, d in deg.items() if d >= 3), key=order.__getitem__)
    kind = "K5" if len(branch) == 5 else "K3,3"
    if not ((kind == "K5" and all(deg[v] == 4 for v in branch))
            or (len(branch) == 6 and all(deg[v] == 3 for v in branch))):
        raise AssertionError("minimal nonplanar subgraph is not a Kuratowski subdivision")
    return KuratowskiWitness(kind, tuple(sorted(keep.values())), tuple(branch))


def witness_subgraph(G: MetricGraph, w: KuratowskiWitness) -> MetricGraph:
    return G.subgraph(w.edge_ids)


# ---------------------------------------------------------------------------
# exhaustive oracle


def _disjoint_paths(pairs_needed, adj, free, used):
    if not pairs_needed:
        return True
    (a, b), rest = pairs_needed[0], pairs_needed[1:]

    def extend(path):
        x = path[-1]
        for y in adj[x]:
            if y == b:
                interior = path[1:]
                if _disjoint_paths(rest, adj, free, used | set(interior)):
                    return True
            elif y in free and y not in used and y not in path:
                if extend(path + [y]):
                    return True
        return False

    return extend([a])


def has_kuratowski_subdivision(G: MetricGraph):
    """Exhaustive search for a K5 or K3,3 subdivision.  Returns its kind or None.

    Exponential; intended for graphs with at most ~8 vertices.
    """
    vertices, pairs = simple_graph(G)
    adj = _adjacency(vertices, pairs)
    for branch in itertools.combinations(vertices, 5):
        if any(len(adj[v]) < 4 for v in branch):
            continue
        free = set(vertices) - set(branch)
        if _disjoint_paths(list(itertools.combinations(branch, 2)), adj, free, set()):
            return "K5"
    for six in itertools.combinations(vertices, 6):
        if any(len(adj[v]) < 3 for v in six):
            continue
        free = set(vertices) - set(six)
        for left in itertools.combinations(six[1:], 2):
            left = (six[0],) + left
            right = tuple(v for v in six if v not in left)
            need = [(a, b) for a in left for b in right]
            if _disjoint_paths(need, adj, free, set()):
                return "K3,3"
    return None
