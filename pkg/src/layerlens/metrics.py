"""Projection-quality diagnostics: MST, k-NN and per-point metric suite.

The MST-based false positive/negative rates work on the 2D layout space:
the minimum spanning tree of the full euclidean distance graph stands in
for "visual closeness", and each point's tree-grown neighborhood is scored
against its HD cluster as a confusion matrix. All other metrics follow the
usual distance / neighborhood constructions; each metric documents its
range and orientation so consumers can color and rank without guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .cluster import ClusterAssignment, check_distance_matrix, cluster_sizes
from .errors import KOutOfRangeError


class MetricId(Enum):
    PPS = "pps"
    COMPRESSION = "compression"
    STRETCHING = "stretching"
    AGG_ERROR = "agg_error"
    TRUE_NEIGHBORS = "true_neighbors"
    FALSE_NEIGHBORS = "false_neighbors"
    MISSING_NEIGHBORS = "missing_neighbors"
    LCMC = "lcmc"
    FPR = "fpr"
    FNR = "fnr"


#: metrics where larger values flag worse projection quality
HIGHER_IS_WORSE = {
    MetricId.COMPRESSION,
    MetricId.STRETCHING,
    MetricId.AGG_ERROR,
    MetricId.FALSE_NEIGHBORS,
    MetricId.MISSING_NEIGHBORS,
    MetricId.FPR,
    MetricId.FNR,
}


def orientation(metric: MetricId) -> str:
    return "higher_is_worse" if metric in HIGHER_IS_WORSE else "higher_is_better"


@dataclass
class KMode:
    kind: str  # "fixed" | "cluster_size"
    k: int | None = None

    @classmethod
    def fixed(cls, k: int) -> "KMode":
        return cls("fixed", int(k))

    @classmethod
    def cluster_size(cls) -> "KMode":
        return cls("cluster_size", None)

    def describe(self) -> str:
        return f"fixed:{self.k}" if self.kind == "fixed" else "cluster_size"


@dataclass
class QualityReport:
    layer: int
    metric: MetricId
    k_mode: KMode | None
    values: np.ndarray  # (n,) float64
    lo: np.ndarray  # per-point lower bound of the documented range
    hi: np.ndarray  # per-point upper bound


def _report(metric, values, lo, hi, k_mode=None, layer=0) -> QualityReport:
    n = values.shape[0]
    return QualityReport(
        layer,
        metric,
        k_mode,
        values.astype(np.float64),
        np.broadcast_to(np.asarray(lo, dtype=np.float64), (n,)).copy(),
        np.broadcast_to(np.asarray(hi, dtype=np.float64), (n,)).copy(),
    )


@dataclass
class Mst:
    """Minimum spanning tree over the complete 2D distance graph."""

    n: int
    edges: list[tuple[int, int, float]]  # accepted in ascending weight order
    indptr: np.ndarray
    nbrs: np.ndarray
    wts: np.ndarray

    def neighbors(self, u: int) -> list[tuple[int, float]]:
        sl = slice(self.indptr[u], self.indptr[u + 1])
        return list(zip(self.nbrs[sl].tolist(), self.wts[sl].tolist()))

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))


def kruskal_mst(dist2d: np.ndarray) -> Mst:
    """Kruskal with union-find; ties scan ascending (weight, min id, max id)."""
    d = check_distance_matrix(dist2d)
    n = d.shape[0]
    if n < 2:
        raise ValueError("MST needs at least 2 points")
    iu, ju = np.triu_indices(n, 1)
    w = d[iu, ju]
    order = np.lexsort((ju, iu, w))
    us = iu[order].astype(np.int64)
    vs = ju[order].astype(np.int64)
    ws = w[order]
    chosen = kernels.kruskal_scan(n, us, vs)
    edges = [(int(us[e]), int(vs[e]), float(ws[e])) for e in chosen]
    counts = np.zeros(n + 1, dtype=np.int64)
    for u, v, _ in edges:
        counts[u + 1] += 1
        counts[v + 1] += 1
    indptr = np.cumsum(counts)
    nbrs = np.empty(2 * (n - 1), dtype=np.int64)
    wts = np.empty(2 * (n - 1), dtype=np.float64)
    cursor = indptr[:-1].copy()
    for u, v, weight in edges:
        nbrs[cursor[u]] = v
        wts[cursor[u]] = weight
        cursor[u] += 1
        nbrs[cursor[v]] = u
        wts[cursor[v]] = weight
        cursor[v] += 1
    return Mst(n, edges, indptr, nbrs, wts)


def hd_knn(vectors: np.ndarray, k: int) -> list[list[int]]:
    """Per-point k nearest neighbors by cosine similarity, self excluded.

    Lists are ordered by descending similarity; equal similarities order by
    ascending id.
    """
    x = np.asarray(vectors, dtype=np.float64)
    n = x.shape[0]
    if not (1 <= k <= n - 1):
        raise KOutOfRangeError(f"k={k} must be in [1, {n - 1}]")
    norms = np.linalg.norm(x, axis=1)
    safe = np.where(norms == 0.0, 1.0, norms)
    y = x / safe[:, None]
    sims = np.clip(y @ y.T, -1.0, 1.0)
    sims[norms == 0.0, :] = 0.0
    sims[:, norms == 0.0] = 0.0
    np.fill_diagonal(sims, -np.inf)
    order = np.argsort(-sims, axis=1, kind="stable")
    return [order[i, :k].tolist() for i in range(n)]


def fpr_fnr(hd_clusters: ClusterAssignment, mst: Mst) -> tuple[np.ndarray, np.ndarray]:
    """Per-point FPR/FNR of MST-grown neighborhoods vs HD clusters.

    For point p with HD cluster of size n_c, the neighborhood NN(p) is
    grown from p along MST edges for n_c - 1 steps, each step taking the
    cheapest edge leaving the grown set (ties by (weight, min id, max id)).
    The confusion counts compare NN(p) with the cluster minus p itself;
    0/0 rates are defined as 0.
    """
    labels = np.asarray(hd_clusters.labels, dtype=np.int64)
    if labels.shape[0] != mst.n:
        raise ValueError(f"cluster labels ({labels.shape[0]}) vs MST nodes ({mst.n})")
    sizes = cluster_sizes(labels, hd_clusters.k_clusters)
    fpr, fnr = kernels.grow_rates(mst.indptr, mst.nbrs, mst.wts, labels, sizes)
    return fpr, fnr


def _euclidean_neighbor_order(x: np.ndarray) -> np.ndarray:
    """Rows of point indices sorted by distance (self excluded, ties by id)."""
    d = kernels.pairwise_euclidean(np.ascontiguousarray(x, dtype=np.float64))
    np.fill_diagonal(d, np.inf)
    return np.argsort(d, axis=1, kind="stable")[:, :-1]


def resolve_point_ks(n: int, k_mode: KMode, hd_clusters: ClusterAssignment | None) -> np.ndarray:
    if k_mode.kind == "fixed":
        if not (1 <= k_mode.k <= n - 1):
            raise KOutOfRangeError(f"k={k_mode.k} must be in [1, {n - 1}]")
        return np.full(n, k_mode.k, dtype=np.int64)
    if hd_clusters is None:
        raise ValueError("cluster_size mode requires HD cluster assignment")
    sizes = cluster_sizes(hd_clusters.labels, hd_clusters.k_clusters)
    ks = np.maximum(sizes[hd_clusters.labels] - 1, 1)
    return np.minimum(ks, n - 1).astype(np.int64)


def neighbor_metrics(
    coords2d: np.ndarray,
    vectors_hd: np.ndarray,
    k_mode: KMode,
    hd_clusters: ClusterAssignment | None = None,
    layer: int = 0,
) -> dict[MetricId, QualityReport]:
    """True/false/missing neighbor rates and LCMC, euclidean in both spaces."""
    coords2d = np.asarray(coords2d, dtype=np.float64)
    vectors_hd = np.asarray(vectors_hd, dtype=np.float64)
    n = coords2d.shape[0]
    ks = resolve_point_ks(n, k_mode, hd_clusters)
    order2d = _euclidean_neighbor_order(coords2d)
    orderhd = _euclidean_neighbor_order(vectors_hd)
    true_r = np.empty(n)
    false_r = np.empty(n)
    missing_r = np.empty(n)
    for i in range(n):
        k = int(ks[i])
        nn2d = order2d[i, :k]
        nnhd = orderhd[i, :k]
        shared = np.intersect1d(nn2d, nnhd, assume_unique=True).shape[0]
        true_r[i] = shared / k
        false_r[i] = (k - shared) / k
        missing_r[i] = (k - shared) / k
    lcmc = true_r - ks / (n - 1)
    return {
        MetricId.TRUE_NEIGHBORS: _report(MetricId.TRUE_NEIGHBORS, true_r, 0.0, 1.0, k_mode, layer),
        MetricId.FALSE_NEIGHBORS: _report(MetricId.FALSE_NEIGHBORS, false_r, 0.0, 1.0, k_mode, layer),
        MetricId.MISSING_NEIGHBORS: _report(
            MetricId.MISSING_NEIGHBORS, missing_r, 0.0, 1.0, k_mode, layer
        ),
        MetricId.LCMC: _report(
            MetricId.LCMC, lcmc, -ks / (n - 1), 1.0 - ks / (n - 1), k_mode, layer
        ),
    }


def distance_metrics(
    coords2d: np.ndarray,
    vectors_hd: np.ndarray,
    k: int,
    layer: int = 0,
) -> dict[MetricId, QualityReport]:
    """Pairwise-distance metrics on max-normalized euclidean matrices.

    A space in which every point coincides normalizes to the zero matrix,
    so total degeneracy reads as maximal error against the other space
    rather than dividing by zero.
    """
    coords2d = np.ascontiguousarray(coords2d, dtype=np.float64)
    vectors_hd = np.ascontiguousarray(vectors_hd, dtype=np.float64)
    n = coords2d.shape[0]
    if n < 2:
        raise ValueError("distance metrics need n >= 2")
    if not (1 <= k <= n - 1):
        raise KOutOfRangeError(f"k={k} must be in [1, {n - 1}]")
    d2 = kernels.pairwise_euclidean(coords2d)
    dh = kernels.pairwise_euclidean(vectors_hd)
    m2 = d2.max()
    mh = dh.max()
    d2n = d2 / m2 if m2 > 0 else np.zeros_like(d2)
    dhn = dh / mh if mh > 0 else np.zeros_like(dh)
    err = d2n - dhn
    compression = np.maximum(-err, 0.0).sum(axis=1) / (n - 1)
    stretching = np.maximum(err, 0.0).sum(axis=1) / (n - 1)
    agg = np.abs(err).sum(axis=1) / (n - 1)
    np.fill_diagonal(d2, np.inf)
    order2d = np.argsort(d2, axis=1, kind="stable")[:, :k]
    np.fill_diagonal(d2, 0.0)
    pps = np.empty(n)
    for i in range(n):
        nbrs = order2d[i]
        v_low = d2[i, nbrs]
        v_high = dh[i, nbrs]
        nl = np.linalg.norm(v_low)
        nh = np.linalg.norm(v_high)
        u_low = v_low / nl if nl > 0 else np.zeros_like(v_low)
        u_high = v_high / nh if nh > 0 else np.zeros_like(v_high)
        pps[i] = 1.0 - np.linalg.norm(u_high - u_low) / 2.0
    fixed = KMode.fixed(k)
    return {
        MetricId.PPS: _report(MetricId.PPS, pps, 0.0, 1.0, fixed, layer),
        MetricId.COMPRESSION: _report(MetricId.COMPRESSION, compression, 0.0, 1.0, fixed, layer),
        MetricId.STRETCHING: _report(MetricId.STRETCHING, stretching, 0.0, 1.0, fixed, layer),
        MetricId.AGG_ERROR: _report(MetricId.AGG_ERROR, agg, 0.0, 1.0, fixed, layer),
    }
