#!/usr/bin/env python3
"""Regenerate the frontend golden-session fixtures.

Produces the exact JSON bodies the service would serve for one fixed
synthetic session, so the frontend tests run against real payloads
without a running backend.
"""

from __future__ import annotations

import json
from pathlib import Path

from layerlens.session import (
    SessionConfig,
    canonical_json_bytes,
    closereading_doc,
    compute_session,
    context_doc,
    matrix_view_doc,
    neighbors_doc,
)
from layerlens.synthetic import make_dataset

OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures" / "golden"


def main() -> None:
    dataset, _ = make_dataset(n_points=45, n_layers=3, dim=10, seed=23, with_external=True)
    config = SessionConfig.from_json(
        {
            "dataset": "synthetic",
            "projections": ["pca", "external:umap"],
            "k": 4,
            "color_by": "pos",
        }
    )
    artifacts = compute_session(dataset, config)
    OUT.mkdir(parents=True, exist_ok=True)
    for name, body in artifacts.documents.items():
        (OUT / f"{name}.json").write_bytes(body)
    (OUT / "neighbors_k1.json").write_bytes(canonical_json_bytes(neighbors_doc(artifacts, 1)))
    (OUT / "matrix_l0_hd_linkage.json").write_bytes(
        canonical_json_bytes(matrix_view_doc(artifacts, 0, "hd", "linkage", 0))
    )
    (OUT / "closereading_l0.json").write_bytes(
        canonical_json_bytes(closereading_doc(artifacts, 0, 0))
    )
    contexts = {str(pid): context_doc(artifacts, pid) for pid in artifacts.ids}
    (OUT / "contexts.json").write_bytes(canonical_json_bytes(contexts))
    manifest = {
        "session": artifacts.session_id,
        "files": sorted(p.name for p in OUT.iterdir()),
    }
    (OUT / "MANIFEST.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    print(f"wrote golden session {artifacts.session_id} to {OUT}")


if __name__ == "__main__":
    main()
