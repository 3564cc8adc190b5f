from fractions import Fraction

import pytest

from builders import circle, theta
from dendrokit.berkovich_model import (CurveSpec, PuncturedModel, StarModel, build_model,
                                       homeomorphism_type, inverse_system_of_skeleta, leaves,
                                       model_from_json, model_graph, model_to_json, puncture,
                                       spec_from_json_text)
from dendrokit.embed_engine import embed_inverse_limit, verify_certificate
from dendrokit.errors import DomainError, MalformedInput
from dendrokit.gdendrite import GDendrite, attach
from dendrokit.graph_topology import GraphPoint, MetricGraph, core_skeleton, shortest_path_metric
from dendrokit.homeomorphism import CIRCLE, canonical_homeomorphism_form
from dendrokit.trees import PointedTree, covering_radius
from oracles import branch_covering_radius_nx

F = Fraction

P1 = CurveSpec("dense")
TATE = CurveSpec("dense", skeleton=circle())


# -- verdicts -----------------------------------------------------------------


def test_projective_line_is_w():
    assert homeomorphism_type(P1).tag == "W"


def test_tate_curve_is_w_g_over_circle():
    v = homeomorphism_type(TATE)
    assert v.tag == "W_G" and v.G == CIRCLE


def test_trivial_value_group_is_star():
    assert homeomorphism_type(CurveSpec("trivial")).tag == "star-compactification"


def test_non_smooth_is_undetermined_with_reason():
    v = homeomorphism_type(CurveSpec("dense", smooth=False))
    assert v.tag == "undetermined" and v.reason


def test_no_countable_dense_subset_is_undetermined():
    assert homeomorphism_type(CurveSpec("dense", residue_countable=False)).tag == "undetermined"


def test_tree_skeleton_still_w():
    G = MetricGraph([0, 1], [(0, 1)])
    assert homeomorphism_type(CurveSpec("dense", skeleton=core_skeleton(G))).tag == "W"


def test_disjoint_union_recurses():
    v = homeomorphism_type(CurveSpec("dense", connected=False, components=(P1, TATE)))
    assert v.tag == "disjoint-union"
    assert [c.tag for c in v.components] == ["W", "W_G"]


def test_verdict_ignores_subdivision():
    G = theta()
    for e in list(G.edges):
        G = G.subdivide(e.id, F(1, 3))
    a = homeomorphism_type(CurveSpec("dense", skeleton=theta()))
    b = homeomorphism_type(CurveSpec("dense", skeleton=G))
    assert a == b and a.tag == "W_G"


def test_skeleton_must_be_its_own_core():
    with pytest.raises(MalformedInput) as e:
        CurveSpec("dense", skeleton=MetricGraph(range(4), [(0, 1), (1, 2), (2, 0), (2, 3)]))
    assert e.value.code == "malformed-spec"


@pytest.mark.parametrize("text", ['{"smooth": true}', '[1]', '{"value_group": "huge"}',
                                  '{"value_group": "dense", "punctures": -1}',
                                  '{"value_group": "dense", "colour": 3}', 'not json'])
def test_malformed_specs(text):
    with pytest.raises(MalformedInput) as e:
        spec_from_json_text(text)
    assert e.value.code == "malformed-spec"


def test_spec_json_round_trip():
    spec = CurveSpec("dense", skeleton=theta(), punctures=2)
    assert CurveSpec.from_json(spec.to_json()) == spec


# -- models -------------------------------------------------------------------


def test_p1_model_is_wazewski_with_quarter_density():
    T = build_model(P1, k=2, b=3)
    assert isinstance(T, PointedTree)
    assert branch_covering_radius_nx(T) == covering_radius(T, T.branch_points()) <= F(1, 4) + F(1, 4)


def test_tate_model_core_recomputes_to_circle():
    X = build_model(TATE, k=2)
    assert isinstance(X, GDendrite)
    assert canonical_homeomorphism_form(core_skeleton(X.base)) == CIRCLE
    assert canonical_homeomorphism_form(core_skeleton(X.flat.graph)) == canonical_homeomorphism_form(TATE.skeleton)


def test_star_uses_min_rule():
    M = build_model(CurveSpec("trivial", closed_point_count_hint=5), b=8)
    assert isinstance(M, StarModel) and M.arms == 5
    assert sorted(M.tree.lengths[1:]) == [1] * 5
    assert build_model(CurveSpec("trivial"), b=4).arms == 4


def test_undetermined_has_no_model():
    with pytest.raises(DomainError) as e:
        build_model(CurveSpec("dense", smooth=False))
    assert e.value.code == "undetermined-type"


@pytest.mark.parametrize("spec", [P1, TATE, CurveSpec("trivial", closed_point_count_hint=3)])
def test_model_json_round_trip(spec):
    M = build_model(spec, k=1)
    back = model_from_json(model_to_json(M))
    assert model_graph(back) == model_graph(M)


# -- punctures ------------------------------------------------------------------


def test_puncture_zero_is_identity():
    T = build_model(P1, k=1)
    assert puncture(T, 0) is T


def test_puncture_one_marks_an_endpoint():
    T = build_model(P1, k=1)
    U = puncture(T, 1)
    assert isinstance(U, PuncturedModel) and len(U.removed) == 1
    assert U.removed[0] in leaves(T)
    assert model_graph(U) == model_graph(T)


def test_too_many_punctures():
    T = build_model(CurveSpec("trivial", closed_point_count_hint=3))
    with pytest.raises(DomainError) as e:
        puncture(T, 4)
    assert e.value.code == "insufficient-leaves"


def test_puncture_keeps_distances():
    X = build_model(TATE, k=1)
    U = puncture(X, 2)
    back = model_from_json(model_to_json(U))
    G, H = model_graph(X), model_graph(back)
    kept = [v for v in G.vertices if v not in U.removed]
    for a in kept[:12]:
        for b in kept[:12]:
            pa, pb = G.vertex_point(a), G.vertex_point(b)
            assert shortest_path_metric(G, pa, pb) == shortest_path_metric(H, H.vertex_point(a), H.vertex_point(b))


# -- staged skeleta -------------------------------------------------------------


def test_depth_zero_gives_single_level():
    sys_ = inverse_system_of_skeleta(build_model(P1, k=0))
    assert len(sys_.levels) == 1 and len(sys_.bonds) == 0


def test_depth_two_bonds_collapse_new_edges():
    T = build_model(P1, k=2)
    sys_ = inverse_system_of_skeleta(T)
    assert [len(K.edges) for K in sys_.levels] == [1, 11, 91]
    for n, p in enumerate(sys_.bonds):
        small, big = sys_.levels[n], sys_.levels[n + 1]
        old = set(small.vertices)
        for i, x in enumerate(big.vertices):
            if x in old:
                assert p.images[i] == x
        fixed = collapsed = 0
        for i, j in big.edges:
            a, b = big.vertices[i], big.vertices[j]
            if p.images[i] == a and p.images[j] == b:
                # an old edge, possibly cut at a new subdivision point: kept pointwise
                small.locate(a), small.locate(b)
                fixed += 1
            else:
                # a new branch: both ends land on the fixed end
                assert p.images[i] == p.images[j] and p.images[i] in (a, b)
                collapsed += 1
        assert collapsed == len(big.edges) - fixed > 0


def test_staged_system_embeds():
    sys_ = inverse_system_of_skeleta(build_model(P1, k=2))
    cert = embed_inverse_limit(sys_, seed=0)
    assert verify_certificate(cert)["ok"]


def test_gdendrite_stages():
    sys_ = inverse_system_of_skeleta(build_model(TATE, k=2))
    assert len(sys_.levels) == 3
    assert len(sys_.levels[0].edges) >= 1


def test_missing_log():
    bare = attach(circle(), [(GraphPoint(0, F(1, 2)), PointedTree.path([F(1, 4)]))])
    with pytest.raises(DomainError) as e:
        inverse_system_of_skeleta(bare)
    assert e.value.code == "missing-construction-log"
    with pytest.raises(DomainError):
        inverse_system_of_skeleta(circle())
