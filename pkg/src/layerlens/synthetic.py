"""Synthetic layer-wise datasets with planted cluster structure.

The generator plants Gaussian blobs on a ring inside a 2D subspace of the
embedding space, so both PCA and angular (cosine) structure recover them.
Blobs carry planted POS labels; across layers two of the blobs move onto
the same ring position, merging 3 clusters into 2. Blob sizes are
deliberately unequal (dominant vs minority share of the merged pair) so
the merged cluster still summarizes to its dominant label with high
certainty.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import (
    Dataset,
    EmbeddingTensor,
    ExternalProjection,
    FeatureKind,
    TokenOccurrence,
)

_FILLER = ["the", "report", "shows", "a", "new", "case", "in", "this", "area", "now"]


@dataclass
class PlantedStructure:
    """Ground truth the generator hands to callers for verification."""

    labels_per_layer: list[np.ndarray]  # planted cluster ids, per layer
    pos_per_point: list[str]
    cluster_pos: dict[int, str]  # planted cluster id -> dominant POS

    def transition_count(self) -> int:
        total = 0
        for a, b in zip(self.labels_per_layer[:-1], self.labels_per_layer[1:]):
            keys = {
                (int(ca), int(cb), self.pos_per_point[i])
                for i, (ca, cb) in enumerate(zip(a, b))
            }
            total += len(keys)
        return total


def make_dataset(
    n_points: int = 150,
    n_layers: int = 4,
    dim: int = 16,
    merge_from_layer: int = 2,
    seed: int = 7,
    name: str = "synthetic",
    noise: float = 0.05,
    with_external: bool = False,
) -> tuple[Dataset, PlantedStructure]:
    """Three planted blobs that merge 3->2 at ``merge_from_layer``.

    Sizes split one third / 90% of the rest / the remainder, so the
    merged pair is dominated 9:1 by its larger blob; POS labels are
    NOUN / VERB / ADJ per blob.
    """
    rng = np.random.default_rng(seed)
    size_a = n_points // 3
    size_b = int(round((n_points - size_a) * 0.9))
    size_c = n_points - size_a - size_b
    blob_of_point = np.repeat([0, 1, 2], [size_a, size_b, size_c])
    pos_of_blob = {0: "NOUN", 1: "VERB", 2: "ADJ"}

    # orthonormal 2D subspace of the embedding space
    basis = np.linalg.qr(rng.normal(size=(dim, 2)))[0].T  # (2, dim)
    angles = {0: np.pi / 2, 1: 7 * np.pi / 6, 2: 11 * np.pi / 6}
    radius = 10.0

    values = np.empty((n_layers, n_points, dim), dtype=np.float32)
    labels_per_layer = []
    for layer in range(n_layers):
        merged = layer >= merge_from_layer
        planted = blob_of_point.copy()
        if merged:
            planted[planted == 2] = 1
        labels_per_layer.append(planted)
        for i in range(n_points):
            blob = blob_of_point[i]
            angle = angles[1] if (merged and blob == 2) else angles[blob]
            center = radius * (np.cos(angle) * basis[0] + np.sin(angle) * basis[1])
            values[layer, i] = center + rng.normal(scale=noise, size=dim)

    occurrences = []
    tokens = {0: "cell", 1: "strike", 2: "post"}
    for i in range(n_points):
        blob = blob_of_point[i]
        token = tokens[blob]
        before = [_FILLER[(i + j) % len(_FILLER)] for j in range(2)]
        after = [_FILLER[(i + j + 3) % len(_FILLER)] for j in range(2)]
        sentence_words = before + [token] + after
        occurrences.append(
            TokenOccurrence(
                id=i,
                token=token,
                sentence_id=i,
                token_index=2,
                context_before=before,
                context_after=after,
                sentence=" ".join(sentence_words),
                annotations={
                    FeatureKind.POS: pos_of_blob[blob],
                    FeatureKind.SENSE: f"{token}.n.{blob:02d}",
                },
            )
        )

    external = {}
    if with_external:
        # a faithful imported projection: subspace coordinates plus jitter
        coords = np.einsum("lnd,cd->lnc", values.astype(np.float64), basis)
        coords += rng.normal(scale=noise, size=coords.shape)
        external["umap"] = ExternalProjection(
            "umap", {"n_neighbors": 15, "min_dist": 0.1}, coords
        )

    dataset = Dataset(
        name,
        occurrences,
        EmbeddingTensor(n_layers, n_points, dim, values),
        external,
    )
    structure = PlantedStructure(
        labels_per_layer,
        [pos_of_blob[b] for b in blob_of_point],
        {0: "NOUN", 1: "VERB", 2: "ADJ"},
    )
    return dataset, structure
