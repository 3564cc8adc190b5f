from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import circle, theta
from dendrokit.agraph import AGroup, iterate_sprouting, sprout, sprout_round, verify_a_graph
from dendrokit.errors import DomainError
from dendrokit.gdendrite import (FiberPoint, GDendrite, HarmonicDecay, attach, branch_covering_radius,
                                 distance, fiber, fiber_geodesic, retraction, sample_point,
                                 universal_g_dendrite_approximant)
from dendrokit.graph_topology import GraphPoint, MetricGraph, core_skeleton, shortest_path_metric
from dendrokit.homeomorphism import CIRCLE, canonical_homeomorphism_form
from dendrokit.trees import ROOT, PointedTree, TreePoint, covering_radius, wazewski_approximant
from oracles import (all_simple_path_lengths, branch_covering_radius_nx, rooted_isometric,
                     tree_distance_nx)

F = Fraction


def segment(L=1):
    return MetricGraph([0, 1], [(0, 1, L)])


def random_tree(rng, n=None):
    n = int(rng.integers(1, 9)) if n is None else n
    parent = [-1] + [int(rng.integers(0, v)) for v in range(1, n)]
    lengths = [F(0)] + [F(int(rng.integers(1, 6)), int(rng.integers(1, 4))) for _ in range(1, n)]
    return PointedTree(parent, lengths)


# -- pointed trees ----------------------------------------------------------------


def test_trivial_tree():
    T = PointedTree.trivial()
    assert T.is_trivial and T.diameter == 0 and T.canonical_code == ()


def test_tree_rejects_cycle_and_bad_lengths():
    with pytest.raises(Exception):
        PointedTree([-1, 2, 1], [0, 1, 1])
    with pytest.raises(Exception):
        PointedTree([-1, 0], [0, 0])


@pytest.mark.parametrize("seed", range(20))
def test_tree_distance_matches_networkx(seed):
    rng = np.random.default_rng(seed)
    T = random_tree(rng, 8)
    for _ in range(20):
        u, v = (int(x) for x in rng.integers(0, len(T), 2))
        assert T.distance(T.vertex_point(u), T.vertex_point(v)) == tree_distance_nx(T, u, v)


@pytest.mark.parametrize("seed", range(20))
def test_canonical_code_matches_isometry(seed):
    rng = np.random.default_rng(seed)
    A = random_tree(rng, 6)
    perm = [0] + (1 + rng.permutation(len(A) - 1)).tolist()
    inv = {old: new for new, old in enumerate(perm)}
    B = PointedTree([-1] + [inv[A.parent[perm[k]]] for k in range(1, len(A))],
                    [0] + [A.lengths[perm[k]] for k in range(1, len(A))])
    assert A.canonical_code == B.canonical_code
    assert rooted_isometric(A, B)
    C = random_tree(rng, 6)
    assert (A.canonical_code == C.canonical_code) == rooted_isometric(A, C)


def test_toward_root_moves_along_edge():
    T = PointedTree.path([1, 1])
    p = TreePoint(2, F(1, 2))
    q = T.toward_root(p, F(3, 4))
    assert T.depth_of(q) == F(3, 4)
    assert T.toward_root(p, 10) == ROOT or T.depth_of(T.toward_root(p, 10)) == 0


def test_tree_json_round_trip():
    T = wazewski_approximant(2)
    back = PointedTree.from_json(T.to_json())
    assert back.parent == T.parent and back.lengths == T.lengths
    assert back.log.level == T.log.level


# -- Wazewski approximants ----------------------------------------------------


def test_depth_zero_is_unit_segment():
    T = wazewski_approximant(0)
    assert len(T) == 2 and T.lengths[1] == 1 and T.branch_points() == []


def test_depth_one_branch_points():
    T = wazewski_approximant(1, b=3)
    depths = sorted(T.depths[v] for v in T.branch_points())
    assert depths == [0, F(1, 2), 1]
    # root: the segment plus 3 tips; the far end: segment plus 3; the midpoint: 2 halves plus 3
    assert sorted(T.degree(v) for v in T.branch_points()) == [4, 4, 5]
    assert len(T) == 12


@pytest.mark.parametrize("k", range(5))
def test_covering_radius_bound(k):
    lam = F(1, 2)
    T = wazewski_approximant(k)
    if k == 0:
        assert T.branch_points() == []
        return
    r = covering_radius(T, T.branch_points())
    assert r == branch_covering_radius_nx(T)
    assert r <= lam ** k + F(1, 2 ** k)


@pytest.mark.parametrize("k", range(1, 4))
def test_refinement_is_isometric_and_raises_degrees(k):
    A, B = wazewski_approximant(k), wazewski_approximant(k + 1)
    for u in range(len(A)):
        for v in range(0, len(A), 7):
            assert A.distance(A.vertex_point(u), A.vertex_point(v)) == \
                B.distance(B.vertex_point(u), B.vertex_point(v))
    for v in A.branch_points():
        assert B.degree(v) > A.degree(v)


def test_stage_recovers_previous_depth():
    for k in range(1, 4):
        T = wazewski_approximant(k)
        assert T.stage(k - 1).canonical_code == wazewski_approximant(k - 1).canonical_code


def test_approximant_parameter_checks():
    with pytest.raises(ValueError):
        wazewski_approximant(1, b=2)
    with pytest.raises(ValueError):
        wazewski_approximant(1, lam=1)


# -- G-dendrites ---------------------------------------------------------------


def test_circle_without_fibers():
    X = attach(circle(), [])
    assert X.fibers == () and X.flat.graph == MetricGraph([("g", 0)], [(("g", 0), ("g", 0), 1)])


def test_t_shape():
    X = attach(segment(), [(GraphPoint(0, F(1, 2)), PointedTree.path([1]))])
    G = X.flat.graph
    assert sorted(G.degree(v) for v in G.vertices) == [1, 1, 1, 3]
    tip = FiberPoint(GraphPoint(0, F(1, 2)), TreePoint(1, 1))
    assert distance(X, tip, GraphPoint(0, 0)) == F(3, 2)


def test_fifty_harmonic_fibers():
    G = circle()
    fibers = [(GraphPoint(0, F(k, 64)), PointedTree.path([F(1, k)])) for k in range(1, 51)]
    X = attach(G, fibers, decay=HarmonicDecay())
    ranked = sorted((t.diameter for _, t in X.fibers), reverse=True)
    assert len(ranked) == 50
    assert all(d <= F(1, r - 8) for r, d in enumerate(ranked, 1) if r > 8)


def test_decay_violation_and_rescale():
    fibers = [(GraphPoint(0, F(k, 32)), PointedTree.path([1])) for k in range(1, 12)]
    with pytest.raises(DomainError) as e:
        attach(circle(), fibers)
    assert e.value.code == "decay-violation"
    X = attach(circle(), fibers, rescale=True)
    ranked = sorted((t.diameter for _, t in X.fibers), reverse=True)
    assert all(d <= F(1, 2) ** (r - 8) for r, d in enumerate(ranked, 1) if r > 8)


def test_duplicate_site():
    G = segment()
    with pytest.raises(DomainError) as e:
        attach(G, [(GraphPoint(0, 0), PointedTree.path([1])), (GraphPoint(0, 0), PointedTree.path([2]))])
    assert e.value.code == "duplicate-site"


def test_distance_cases():
    G = segment(2)
    g, h = GraphPoint(0, 0), GraphPoint(0, 1)
    X = attach(G, [(g, PointedTree.path([F(1, 2)])), (h, PointedTree.path([F(1, 2)]))])
    x = FiberPoint(g, TreePoint(1, F(3, 10)))
    y = FiberPoint(h, TreePoint(1, F(1, 5)))
    assert distance(X, x, y) == F(3, 2)
    assert distance(X, g, h) == 1
    assert distance(X, x, FiberPoint(g, TreePoint(1, F(1, 10)))) == F(1, 5)
    with pytest.raises(DomainError) as e:
        distance(X, FiberPoint(GraphPoint(0, F(1, 2)), ROOT), g)
    assert e.value.code == "invalid-point"


def test_retraction_and_fiber():
    g = GraphPoint(0, F(1, 2))
    T = PointedTree.star([1, 1])
    X = attach(segment(), [(g, T)])
    assert retraction(X, GraphPoint(0, F(1, 4))) == GraphPoint(0, F(1, 4))
    x = FiberPoint(g, TreePoint(2, F(1, 2)))
    assert retraction(X, x) == g
    assert retraction(X, fiber_geodesic(X, x, F(1, 3))) == g
    assert fiber(X, GraphPoint(0, F(1, 3))).is_trivial
    assert fiber(X, g) is T


def test_sprouting_points():
    sites = [GraphPoint(0, F(k, 4)) for k in (1, 2, 3)]
    X = attach(circle(), [(s, PointedTree.path([F(1, 8)])) for s in sites]
               + [(GraphPoint(0, F(1, 8)), PointedTree.trivial())])
    assert sorted(p.t for p in X.sprouting_points()) == [F(1, 4), F(1, 2), F(3, 4)]


def test_g_dendrite_json_round_trip():
    X = universal_g_dendrite_approximant(theta(), 1)
    Y = GDendrite.from_json(X.to_json())
    assert Y.flat.graph == X.flat.graph and Y.site_levels == X.site_levels


# -- universal approximant ---------------------------------------------------


def test_circle_depth_zero():
    X = universal_g_dendrite_approximant(circle(), 0)
    assert X.sprouting_points() == [] and X.base == circle()


def test_circle_depth_two_site_spacing():
    X = universal_g_dendrite_approximant(circle(), 2)
    ts = sorted(g.t for g in X.sites())
    assert ts == [F(k, 4) for k in range(4)]
    assert all(not t.is_trivial for _, t in X.fibers)
    # every fiber is a scaled approximant: compare shapes with the depth-(2-j) tree
    for (g, t), j in zip(X.fibers, X.site_levels):
        ref = wazewski_approximant(2 - j).scaled(F(1, 2) ** j)
        scaled_ref = ref.scaled(t.diameter / ref.diameter) if t.diameter != ref.diameter else ref
        assert t.canonical_code == scaled_ref.canonical_code


def test_leafy_base_rejected():
    with pytest.raises(DomainError) as e:
        universal_g_dendrite_approximant(segment(), 1)
    assert e.value.code == "leafy-base"


@pytest.mark.parametrize("k", [1, 2, 3])
def test_offset_independence(k):
    A = universal_g_dendrite_approximant(circle(), k)
    B = universal_g_dendrite_approximant(circle(), k, offset=F(1, 5))
    assert canonical_homeomorphism_form(A.base) == canonical_homeomorphism_form(B.base) == CIRCLE
    assert sorted(t.canonical_code for _, t in A.fibers) == sorted(t.canonical_code for _, t in B.fibers)
    assert [g.t for g in A.sites()] != [g.t for g in B.sites()]


@pytest.mark.parametrize("k", [1, 2])
def test_universal_density(k):
    X = universal_g_dendrite_approximant(theta(), k)
    assert branch_covering_radius(X) <= F(1, 2) ** k + F(1, 2 ** k)
    assert canonical_homeomorphism_form(core_skeleton(X.flat.graph)) == canonical_homeomorphism_form(theta())


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_gdendrite_metric_axioms(seed):
    rng = np.random.default_rng(seed)
    X = universal_g_dendrite_approximant(theta(), 1)
    for _ in range(20):
        x, y, z = (sample_point(X, rng) for _ in range(3))
        assert distance(X, x, y) == distance(X, y, x)
        assert distance(X, x, x) == 0
        assert distance(X, x, z) <= distance(X, x, y) + distance(X, y, z)


def test_base_inclusion_isometric():
    X = universal_g_dendrite_approximant(theta(), 2)
    rng = np.random.default_rng(1)
    for _ in range(200):
        g = sample_point(attach(X.base, []), rng)
        h = sample_point(attach(X.base, []), rng)
        assert distance(X, g, h) == shortest_path_metric(X.base, g, h)


# -- A-graphs ------------------------------------------------------------------


def test_agroup_membership():
    A = AGroup([F(1, 2)])
    assert F(3, 2) in A and F(1, 3) not in A
    assert AGroup([F(2, 3), F(1, 2)]).unit == F(1, 6)
    assert F(1, 7) in AGroup([1], rational_span=True)


def test_unit_star():
    T = sprout(PointedTree.trivial(), [0], b=2, lengths=[1], L=1, A=AGroup([1]))
    assert len(T) == 4 and T.degree(0) == 3 and set(T.lengths[1:]) == {1}
    assert verify_a_graph(T, AGroup([1]))


def test_third_edge_fails_half_lattice():
    T = PointedTree.path([F(1, 3)])
    assert not verify_a_graph(T, AGroup([F(1, 2)]))
    assert verify_a_graph(PointedTree.path([F(1, 2)]), AGroup([F(1, 2)]))


def _branch_count_by_recurrence(rounds, b):
    """Branch points of iterated sprouting with grid 1, cap 2 and unit arms, counted by hand.

    Each round sprouts at every branch point and at the midpoint of every
    length-2 edge; only the freshly sprouted arms have length 2 afterwards.
    """
    if rounds == 0:
        return 0
    branch, long_edges = 1, b
    for _ in range(rounds - 1):
        branch, long_edges = branch + long_edges, (branch + long_edges) * b
    return branch


def test_sprouting_recurrence():
    A = AGroup([1])
    for r in range(1, 4):
        X = iterate_sprouting(r, b=2, lengths=[1], L=2, A=A, grid=1)
        assert len(X.branch_points()) == 3 ** (r - 1)
        assert len(X.branch_points()) == _branch_count_by_recurrence(r, 2)


@pytest.mark.parametrize("rounds", [1, 2, 3])
def test_iterated_sprouting_is_a_graph(rounds):
    A = AGroup([1])
    X = iterate_sprouting(rounds, b=2, lengths=[1, 2], L=2, A=A, grid=1)
    assert verify_a_graph(X, A)
    # exhaustive path enumeration through networkx agrees on the lengths
    G = MetricGraph(range(len(X)), X.edges())
    for t, ls in all_simple_path_lengths(G, 0).items():
        if G.degree(t) != 2:
            assert all(x in A for x in ls)


def test_sprout_guards():
    A = AGroup([1])
    T = PointedTree.path([1])
    with pytest.raises(DomainError) as e:
        sprout(T, [1], b=2, lengths=[1], L=1, A=A)
    assert e.value.code == "site-degree-1"
    with pytest.raises(DomainError) as e:
        sprout(PointedTree.star([1, 1]), [0], b=2, lengths=[F(1, 3)], L=1, A=A)
    assert e.value.code == "length-not-in-A"
    with pytest.raises(DomainError) as e:
        sprout(PointedTree.path([2]), [TreePoint(1, F(1, 2))], b=2, lengths=[1], L=1, A=A)
    assert e.value.code == "length-not-in-A"


def test_sprout_preserves_a_graph():
    A = AGroup([F(1, 2)])
    X = iterate_sprouting(2, b=3, lengths=[F(1, 2)], L=1, A=A, grid=F(1, 2))
    Y = sprout_round(X, 3, [F(3, 2)], 1, A, F(1, 2))
    assert verify_a_graph(X, A) and verify_a_graph(Y, A)


def test_cycles_count_in_a_graph():
    A = AGroup([1])
    assert verify_a_graph(MetricGraph([0, 1], [(0, 1, 1), (0, 1, 2)]), A, basepoint=0)
    assert not verify_a_graph(MetricGraph([0, 1], [(0, 1, 1), (0, 1, F(1, 2))]), A, basepoint=0)
