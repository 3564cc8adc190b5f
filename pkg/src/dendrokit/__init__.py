"""Finite models of dendrites and local dendrites, their invariants, and
certified embeddings of inverse systems of simplicial complexes."""

from .agraph import AGroup, iterate_sprouting, sprout, sprout_round, verify_a_graph
from .berkovich_model import (CurveSpec, PuncturedModel, StarModel, TypeVerdict, build_model,
                              homeomorphism_type, inverse_system_of_skeleta, puncture)
from .complex_core import (ComplexPoint, IntrinsicMetric, PLMap, SimplicialComplex,
                           barycentric_subdivide)
from .embed_engine import (EmbeddingCertificate, InverseSystem, Thread, approximate_by_embedding,
                           embed_inverse_limit, is_general_position, perturb_to_general_position,
                           verify_certificate)
from .errors import DomainError, MalformedInput
from .export import export_embedding
from .gdendrite import (FiberPoint, GDendrite, attach, distance, fiber, retraction,
                        universal_g_dendrite_approximant)
from .graph_topology import GraphPoint, MetricGraph, core_skeleton
from .homeomorphism import canonical_homeomorphism_form
from .planarity import find_kuratowski_subdivision, is_planar
from .render import RenderConfig, render_svg
from .trees import PointedTree, TreePoint, wazewski_approximant

__all__ = [
    "AGroup", "ComplexPoint", "CurveSpec", "DomainError", "EmbeddingCertificate", "FiberPoint",
    "GDendrite", "GraphPoint", "IntrinsicMetric", "InverseSystem", "MalformedInput",
    "MetricGraph", "PLMap", "PointedTree", "PuncturedModel", "RenderConfig", "SimplicialComplex",
    "StarModel", "Thread", "TreePoint", "TypeVerdict", "approximate_by_embedding", "attach",
    "barycentric_subdivide", "build_model", "canonical_homeomorphism_form", "core_skeleton",
    "distance", "embed_inverse_limit", "export_embedding", "fiber", "find_kuratowski_subdivision",
    "homeomorphism_type", "inverse_system_of_skeleta", "is_general_position", "is_planar",
    "iterate_sprouting", "perturb_to_general_position", "puncture", "render_svg", "retraction",
    "sprout", "sprout_round", "universal_g_dendrite_approximant", "verify_a_graph",
    "verify_certificate", "wazewski_approximant",
]
