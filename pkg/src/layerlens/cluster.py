"""Hierarchical agglomerative clustering with silhouette-selected cuts.

Both the 2D layout space and the HD embedding space are clustered the same
way: build a dendrogram under each of the four supported linkages, evaluate
the root-proximal cuts by mean silhouette, and keep the linkage whose best
cut scores highest. Cosine distance is the default in both spaces; the 2D
metric is configurable because cosine on centered screen coordinates
measures angle about the projection origin, which is unusual enough to be
worth flagging (see README).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .errors import NonFiniteValueError, TooFewPointsError

_LINKAGE_CODES = {"single": 0, "complete": 1, "average": 2, "weighted": 3}


class Linkage(Enum):
    SINGLE = "single"
    COMPLETE = "complete"
    AVERAGE = "average"
    WEIGHTED = "weighted"

    @property
    def code(self) -> int:
        return _LINKAGE_CODES[self.value]


class Metric(Enum):
    COSINE = "cosine"
    EUCLIDEAN = "euclidean"


@dataclass
class Dendrogram:
    """Merge sequence in scipy node convention.

    Leaves are 0..n-1; the t-th merge creates node ``n + t``. Heights are
    non-decreasing for all four supported linkages (they are monotone).
    """

    n_leaves: int
    merges: list[tuple[int, int, float]]


@dataclass
class ClusterAssignment:
    space: str  # "2d" | "hd"
    layer: int
    labels: np.ndarray  # (n,) int64, dense from 0
    linkage: Linkage
    silhouette: float
    k_clusters: int


def pairwise_distances(vectors: np.ndarray, metric: Metric) -> np.ndarray:
    """Dense symmetric distance matrix with zero diagonal.

    Cosine distance of a zero vector against anything is 1 by convention,
    keeping the matrix finite.
    """
    x = np.ascontiguousarray(vectors, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError(f"expected (n, d) vectors, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise NonFiniteValueError("distance input contains NaN/Inf")
    if metric == Metric.COSINE:
        return kernels.pairwise_cosine(x)
    return kernels.pairwise_euclidean(x)


def check_distance_matrix(dist: np.ndarray) -> np.ndarray:
    d = np.ascontiguousarray(dist, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"distance matrix must be square, got {d.shape}")
    if not np.isfinite(d).all():
        raise NonFiniteValueError("distance matrix contains NaN/Inf")
    if not np.array_equal(d, d.T) or np.any(np.diag(d) != 0.0):
        raise ValueError("distance matrix must be symmetric with zero diagonal")
    return d


def build_dendrogram(dist: np.ndarray, linkage: Linkage) -> Dendrogram:
    d = check_distance_matrix(dist)
    n = d.shape[0]
    if n < 2:
        raise ValueError("dendrogram needs at least 2 points")
    left, right, heights = kernels.lance_williams(d, linkage.code)
    merges = [
        (int(left[t]), int(right[t]), float(heights[t])) for t in range(n - 1)
    ]
    return Dendrogram(n, merges)


def cut_labels(dendrogram: Dendrogram, k: int) -> np.ndarray:
    """Flat labels for the cut yielding ``k`` clusters.

    Applies the first ``n - k`` merges of the sequence; clusters are
    relabeled densely in order of their smallest member id.
    """
    n = dendrogram.n_leaves
    if not (1 <= k <= n):
        raise ValueError(f"k={k} out of range for n={n}")
    groups: dict[int, list[int]] = {i: [i] for i in range(n)}
    for t in range(n - k):
        left, right, _ = dendrogram.merges[t]
        groups[n + t] = groups.pop(left) + groups.pop(right)
    clusters = sorted(groups.values(), key=min)
    labels = np.empty(n, dtype=np.int64)
    for c, members in enumerate(clusters):
        labels[members] = c
    return labels


def candidate_ks(n: int) -> list[int]:
    """Cluster counts reachable by the root-proximal 10% of cuts.

    Of the n-1 cut levels ordered from the root downward, the first
    ceil(0.1 * (n-1)) are candidates; unapplying the top j merges yields
    j+1 clusters, clamped to 2 <= k <= n-1.
    """
    window = math.ceil(0.1 * (n - 1))
    return [j + 1 for j in range(1, min(window, n - 2) + 1)]


def silhouette_score(dist: np.ndarray, labels: np.ndarray, k: int) -> float:
    """Mean silhouette over a precomputed matrix; singletons score 0."""
    return float(kernels.silhouette_mean(dist, np.asarray(labels, dtype=np.int64), k))


def select_cut(dendrogram: Dendrogram, dist: np.ndarray) -> tuple[np.ndarray, int, float]:
    """Best cut among the candidate window by mean silhouette.

    Ties go to the cut with fewer clusters (candidates are scanned from
    k=2 upward and only strict improvements replace the incumbent).
    """
    n = dendrogram.n_leaves
    if n < 3:
        raise TooFewPointsError(f"silhouette cut needs n >= 3, got {n}")
    d = check_distance_matrix(dist)
    best: tuple[np.ndarray, int, float] | None = None
    for k in candidate_ks(n):
        labels = cut_labels(dendrogram, k)
        score = silhouette_score(d, labels, k)
        if best is None or score > best[2]:
            best = (labels, k, score)
    assert best is not None
    return best


def cluster_layer(
    vectors: np.ndarray,
    metric: Metric = Metric.COSINE,
    space: str = "hd",
    layer: int = 0,
) -> ClusterAssignment:
    """Cluster one layer: best silhouette across all four linkages.

    Ties between linkages resolve in enum order (single, complete,
    average, weighted).
    """
    x = np.asarray(vectors, dtype=np.float64)
    if x.shape[0] < 3:
        raise TooFewPointsError(f"clustering needs n >= 3, got {x.shape[0]}")
    dist = pairwise_distances(x, metric)
    best: ClusterAssignment | None = None
    for linkage in Linkage:
        dendrogram = build_dendrogram(dist, linkage)
        labels, k, score = select_cut(dendrogram, dist)
        if best is None or score > best.silhouette:
            best = ClusterAssignment(space, layer, labels, linkage, score, k)
    assert best is not None
    return best


def cluster_sizes(labels: np.ndarray, k: int) -> np.ndarray:
    sizes = np.zeros(k, dtype=np.int64)
    for lab in labels:
        sizes[lab] += 1
    return sizes
