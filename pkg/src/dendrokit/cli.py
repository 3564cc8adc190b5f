"""Command line interface.

Every command writes one document (JSON, or SVG for ``render``) to ``--out``
or stdout.  Exit status: 0 on success, 1 when the input is well formed but
the requested operation is impossible, 2 when the input itself is malformed.
Errors go to stderr as ``{"error": code, "message": text}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from .berkovich_model import (PuncturedModel, StarModel, build_model, homeomorphism_type,
                              inverse_system_of_skeleta, model_from_json, model_graph,
                              model_to_json, puncture, spec_from_json_text)
from .embed_engine import (certificate_to_json, embed_inverse_limit, random_threads,
                           system_from_json)
from .errors import DomainError, MalformedInput
from .export import dumps, export_embedding
from .gdendrite import GDendrite, distance, retraction, sample_point
from .graph_topology import MetricGraph, core_skeleton, first_betti
from .homeomorphism import canonical_homeomorphism_form
from .planarity import find_kuratowski_subdivision, is_planar
from .render import RenderConfig, find_crossings, render_svg, save_embedding_figure, svg_segments
from .trees import PointedTree

INVARIANT_SAMPLES = 200


def _read_text(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from exc


def _read_json(path):
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path} is not valid JSON: {exc}") from exc


def _load_model(doc):
    """Accept a bare model document or the wrapper written by ``generate``."""
    if not isinstance(doc, dict):
        raise MalformedInput("model JSON must be an object")
    if "components" in doc and "model" not in doc:
        raise DomainError("a disconnected curve has one model per component; "
                          "pass a single component", "disjoint-model")
    if "verdict" in doc:
        doc = doc.get("model")
        if not isinstance(doc, dict):
            raise MalformedInput("generate output lacks a model")
    return model_from_json(doc)


def _looks_like_graph(doc):
    return isinstance(doc, dict) and "edges" in doc and "vertices" in doc and "kind" not in doc


def _load_graph_or_model(doc):
    if _looks_like_graph(doc):
        return MetricGraph.from_json(doc, allow_disconnected=True), None
    model = _load_model(doc)
    return model_graph(model), model


def _emit(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def _model_for_spec(spec, args):
    if spec.punctures and not spec.connected:
        raise DomainError("punctures apply to a single connected curve", "undetermined-type")
    model = build_model(spec, k=args.depth, b=args.branching, lam=args.decay)
    return puncture(model, spec.punctures)


def cmd_generate(args):
    spec = spec_from_json_text(_read_text(args.spec))
    verdict = homeomorphism_type(spec)
    doc = {"schema_version": 1, "verdict": verdict.to_json()}
    if verdict.tag == "disjoint-union":
        doc["components"] = [model_to_json(_model_for_spec(c, args)) for c in spec.components]
    else:
        doc["model"] = model_to_json(_model_for_spec(spec, args))
    return dumps(doc)


def cmd_skeleton(args):
    G, _ = _load_graph_or_model(_read_json(args.input))
    core = core_skeleton(G)
    form = canonical_homeomorphism_form(core)
    return dumps({
        "schema_version": 1,
        "empty": core.is_empty,
        "first_betti": first_betti(G),
        "form": form.to_json(),
        "skeleton": core.to_json(),
    })


def _planarity_report(G):
    planar = is_planar(G)
    out = {"planar": planar, "verdict": "planar" if planar else "nonplanar"}
    if not planar:
        out["witness"] = find_kuratowski_subdivision(G).to_json()
    return out


def _model_invariants(model, rng):
    out = {}
    inner = model.model if isinstance(model, PuncturedModel) else model
    if isinstance(inner, StarModel):
        inner = inner.tree
    G = model_graph(model)
    out["connected"] = G.is_connected
    out["positive_lengths"] = all(e.length > 0 for e in G.edges)
    if isinstance(inner, PointedTree):
        out["acyclic"] = len(G.edges) == len(G.vertices) - 1
        pts = [inner.vertex_point(int(rng.integers(len(inner)))) for _ in range(3 * INVARIANT_SAMPLES)]
        d = inner.distance
    else:
        out["core_is_base"] = (canonical_homeomorphism_form(core_skeleton(G))
                              == canonical_homeomorphism_form(inner.base))
        ranked = sorted((t.diameter for _, t in inner.fibers if not t.is_trivial), reverse=True)
        out["decay_rule"] = all(dm <= inner.decay(r - inner.exempt)
                                for r, dm in enumerate(ranked, start=1) if r > inner.exempt)
        pts = [sample_point(inner, rng) for _ in range(3 * INVARIANT_SAMPLES)]
        d = lambda x, y: distance(inner, x, y)  # noqa: E731
        out["retraction_fixes_base"] = all(
            retraction(inner, retraction(inner, p)) == retraction(inner, p) for p in pts)
    sym = ident = tri = True
    for i in range(INVARIANT_SAMPLES):
        x, y, z = pts[3 * i: 3 * i + 3]
        dxy, dyz, dxz = d(x, y), d(y, z), d(x, z)
        sym &= dxy == d(y, x)
        ident &= d(x, x) == 0
        tri &= dxz <= dxy + dyz
    out.update({"symmetry": sym, "identity": ident, "triangle": tri})
    return out


def cmd_check(args):
    doc = _read_json(args.input)
    G, model = _load_graph_or_model(doc)
    if not (args.planarity or args.invariants):
        args.planarity = args.invariants = True
    report = {"schema_version": 1}
    if args.planarity:
        base = model.base if isinstance(model, GDendrite) else G
        report["planarity"] = _planarity_report(base)
    if args.invariants:
        if model is None:
            core = core_skeleton(G) if G.is_connected else None
            report["invariants"] = {
                "connected": G.is_connected,
                "positive_lengths": all(e.length > 0 for e in G.edges),
                "core_min_degree_ok": core is not None and (
                    core.is_empty or min(core.degree(v) for v in core.vertices) >= 2),
            }
        else:
            report["invariants"] = _model_invariants(model, np.random.default_rng(args.seed))
        report["ok"] = all(report["invariants"].values())
    return dumps(report)


def _system_from_args(args):
    if bool(args.system) == bool(args.model):
        raise MalformedInput("give exactly one of --system or --model")
    if args.system:
        return system_from_json(_read_json(args.system))
    return inverse_system_of_skeleta(_load_model(_read_json(args.model)), args.levels)


def cmd_embed(args):
    system = _system_from_args(args)
    cert = embed_inverse_limit(system, seed=args.seed)
    if args.figure:
        save_embedding_figure(cert, args.figure)
    return dumps(certificate_to_json(cert))


def cmd_export(args):
    system = _system_from_args(args)
    cert = embed_inverse_limit(system, seed=args.seed)
    threads = random_threads(system, args.threads, np.random.default_rng(args.seed))
    doc = export_embedding(cert, threads)
    if args.figure:
        save_embedding_figure(cert, args.figure, [r["coordinates"] for r in doc["threads"]])
    return dumps(doc)


def cmd_render(args):
    model = _load_model(_read_json(args.input))
    cfg = RenderConfig(spread_deg=args.spread, decay=float(args.decay), stroke=args.stroke,
                       canvas=args.canvas)
    svg = render_svg(model, cfg)
    if args.verify:
        hits = find_crossings(svg_segments(svg))
        if hits:
            raise DomainError(f"drawing has crossing segments {hits[0]}", "crossing-segments")
    return svg


# ---------------------------------------------------------------------------
# parser


def _fraction(text):
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text}") from exc
    if not 0 < q < 1:
        raise argparse.ArgumentTypeError("decay must lie in (0, 1)")
    return q


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--depth", type=int, default=2, help="construction depth k (default 2)")
    common.add_argument("--branching", type=int, default=3, help="branches per site (default 3)")
    common.add_argument("--decay", type=_fraction, default=Fraction(1, 2),
                        help="per-level length factor in (0, 1), e.g. 1/2")
    common.add_argument("--out", help="output file (default stdout)")

    p = argparse.ArgumentParser(prog="dendrokit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="build a model from a curve description")
    g.add_argument("--spec", required=True, help="curve description JSON")
    g.set_defaults(run=cmd_generate)

    s = sub.add_parser("skeleton", parents=[common], help="core skeleton of a graph or model")
    s.add_argument("input")
    s.set_defaults(run=cmd_skeleton)

    c = sub.add_parser("check", parents=[common], help="planarity and invariant checks")
    c.add_argument("input")
    c.add_argument("--planarity", action="store_true")
    c.add_argument("--invariants", action="store_true")
    c.set_defaults(run=cmd_check)

    for name, fn, helptext in (("embed", cmd_embed, "certified embedding of an inverse system"),
                               ("export", cmd_export, "coordinates of random threads")):
        e = sub.add_parser(name, parents=[common], help=helptext)
        e.add_argument("--system", help="inverse-system JSON")
        e.add_argument("--model", help="model JSON (its construction stages are used)")
        e.add_argument("--levels", type=int, help="keep only the first stages of a model")
        e.add_argument("--figure", help="also save a PNG plot of the top-level map")
        if name == "export":
            e.add_argument("--threads", type=int, default=10, help="number of threads (default 10)")
        e.set_defaults(run=fn)

    r = sub.add_parser("render", parents=[common], help="SVG drawing of a tree or planar model")
    r.add_argument("input")
    r.add_argument("--spread", type=float, default=360.0, help="root angular spread in degrees")
    r.add_argument("--stroke", type=float, default=1.5)
    r.add_argument("--canvas", type=int, default=800)
    r.add_argument("--verify", action="store_true", help="fail if any two segments cross")
    r.set_defaults(run=cmd_render)
    return p


def _fail(exc, status):
    code = exc.code if isinstance(exc, DomainError) and exc.code else "malformed-input"
    sys.stderr.write(json.dumps({"error": code, "message": str(exc)}, sort_keys=True) + "\n")
    return status


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        text = args.run(args)
        _emit(args, text)
    except MalformedInput as exc:
        return _fail(exc, 2)
    except DomainError as exc:
        return _fail(exc, 1)
    except ValueError as exc:
        return _fail(exc, 2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
