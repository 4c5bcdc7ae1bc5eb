"""Per-layer 2D coordinates: native PCA plus external pass-through."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import Dataset
from .errors import (
    DegenerateInputError,
    EmptySelectionError,
    NonFiniteValueError,
    UnknownProjectionError,
)

PCA_METHOD = "pca"


@dataclass
class ProjectionConfig:
    method: str  # "pca" or "external:<name>"
    params: dict = field(default_factory=dict)

    @property
    def is_pca(self) -> bool:
        return self.method == PCA_METHOD

    @property
    def external_name(self) -> str:
        return self.method.split(":", 1)[1]

    @classmethod
    def parse(cls, spec: str, params: dict | None = None) -> "ProjectionConfig":
        spec = spec.strip()
        if spec.lower() == PCA_METHOD:
            return cls(PCA_METHOD, params or {})
        if spec.lower().startswith("external:") and len(spec) > len("external:"):
            return cls("external:" + spec.split(":", 1)[1], params or {})
        raise UnknownProjectionError(f"projection spec {spec!r} not understood")


@dataclass
class LayerProjection:
    layer: int
    coords: np.ndarray  # (n, 2) float64
    method: ProjectionConfig
    explained_variance: tuple[float, float] | None = None


def pca_project(vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Top-2 principal component projection.

    Returns (coords (n,2), components (2,d), explained_variance (2,)).
    Components follow a deterministic sign convention: the entry of largest
    magnitude in each axis is made positive, so repeated runs produce the
    same layout.
    """
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2 or x.shape[1] < 2:
        raise DegenerateInputError(
            f"PCA needs at least 2 points and 2 dimensions, got {x.shape}"
        )
    if not np.isfinite(x).all():
        raise NonFiniteValueError("PCA input contains NaN/Inf")
    n = x.shape[0]
    centered = x - x.mean(axis=0)
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:2].copy()
    if components.shape[0] < 2:  # d == 1 is excluded by the shape check above
        raise DegenerateInputError("fewer than 2 principal axes available")
    for axis in range(2):
        pivot = int(np.argmax(np.abs(components[axis])))
        if components[axis, pivot] < 0:
            components[axis] = -components[axis]
    coords = centered @ components.T
    explained = (svals[:2] ** 2) / (n - 1)
    return coords, components, explained


def project_layers(
    dataset: Dataset,
    config: ProjectionConfig,
    selection: list[int],
    layers: list[int] | None = None,
) -> list[LayerProjection]:
    """One LayerProjection per requested layer, restricted to ``selection``.

    PCA is fit per layer, independently, on the selected subset only;
    external coordinates are passed through untouched.
    """
    if not selection:
        raise EmptySelectionError("projection needs a non-empty selection")
    sel = np.asarray(selection, dtype=np.int64)
    layer_ids = list(range(dataset.n_layers)) if layers is None else list(layers)
    out = []
    if config.is_pca:
        for l in layer_ids:
            vectors = dataset.embeddings.layer(l)[sel]
            coords, _, explained = pca_project(vectors)
            out.append(
                LayerProjection(l, coords, config, (float(explained[0]), float(explained[1])))
            )
        return out
    name = config.external_name
    if name not in dataset.external_projections:
        raise UnknownProjectionError(f"external projection {name!r} not in dataset")
    stored = dataset.external_projections[name].layers
    for l in layer_ids:
        out.append(LayerProjection(l, stored[l][sel].copy(), config, None))
    return out
