"""JSON export of certified embeddings and the shared JSON writer."""

from __future__ import annotations

import json

from .complex_core import fraction_to_json
from .embed_engine import (EmbeddingCertificate, Thread, check_thread, evaluate_limit_point,
                           _num)

SCHEMA_VERSION = 1


def dumps(doc) -> str:
    """Canonical text form: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _thread_key(t: Thread):
    return tuple(p.key for p in t.points)


def export_embedding(cert: EmbeddingCertificate, threads) -> dict:
    """Coordinates in R^(2d+1) of each distinct thread, with the certificate constants.

    Every thread is checked against the bonds first (``inconsistent-thread``
    otherwise).  Repeated threads produce one record.
    """
    seen = set()
    records = []
    for t in threads:
        check_thread(cert.system, t)
        k = _thread_key(t)
        if k in seen:
            continue
        seen.add(k)
        top = t.points[-1]
        records.append({
            "index": len(records),
            "coordinates": list(evaluate_limit_point(cert, t)),
            "top_simplex": list(top.support),
            "top_weights": [fraction_to_json(w) for w in top.key[1]],
        })
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "embedding",
        "dimension": cert.target_dim,
        "label": cert.label,
        "seed": cert.seed,
        "alpha": [_num(a) for a in cert.alpha],
        "epsilon": [_num(e) for e in cert.epsilon],
        "slack": [_num(s) for s in cert.slack],
        "min_separation": [_num(lv.min_separation) for lv in cert.levels],
        "threads": records,
    }
