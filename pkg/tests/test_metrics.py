import numpy as np
import pytest

from layerlens.cluster import ClusterAssignment, Linkage, Metric, pairwise_distances
from layerlens.errors import KOutOfRangeError
from layerlens.metrics import (
    KMode,
    MetricId,
    distance_metrics,
    fpr_fnr,
    hd_knn,
    kruskal_mst,
    neighbor_metrics,
)

import oracles


def assignment_from(labels):
    labels = np.asarray(labels, dtype=np.int64)
    k = int(labels.max()) + 1
    return ClusterAssignment("hd", 0, labels, Linkage.SINGLE, 0.0, k)


# --- MST ---------------------------------------------------------------------


def test_mst_two_points():
    d = pairwise_distances(np.array([[0.0, 0.0], [3.0, 4.0]]), Metric.EUCLIDEAN)
    mst = kruskal_mst(d)
    assert mst.edges == [(0, 1, 5.0)]


def test_mst_collinear_chain():
    pts = np.column_stack([np.arange(4.0), np.zeros(4)])
    mst = kruskal_mst(pairwise_distances(pts, Metric.EUCLIDEAN))
    assert sorted((u, v) for u, v, _ in mst.edges) == [(0, 1), (1, 2), (2, 3)]
    assert mst.total_weight == pytest.approx(3.0)


def test_mst_matches_exhaustive():
    rng = np.random.default_rng(0)
    for trial in range(100):
        n = int(rng.integers(2, 8))
        pts = rng.uniform(size=(n, 2))
        d = pairwise_distances(pts, Metric.EUCLIDEAN)
        mst = kruskal_mst(d)
        assert len(mst.edges) == n - 1
        assert mst.total_weight == pytest.approx(
            oracles.min_spanning_weight_exhaustive(d), abs=1e-9
        )


def test_mst_deterministic_under_ties():
    # unit square: four tied side edges, deterministic edge choice
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    mst = kruskal_mst(pairwise_distances(pts, Metric.EUCLIDEAN))
    assert [(u, v) for u, v, _ in mst.edges] == [(0, 1), (0, 2), (1, 3)]


# --- HD k-NN -----------------------------------------------------------------


def test_knn_orders_by_similarity():
    v = np.array([[1.0, 0.0], [0.9, 0.1], [0.0, 1.0]])
    assert hd_knn(v, 1)[0] == [1]
    assert hd_knn(v, 2)[0] == [1, 2]


def test_knn_duplicates_mutual():
    v = np.array([[1.0, 2.0], [1.0, 2.0], [5.0, -1.0]])
    nn = hd_knn(v, 1)
    assert nn[0] == [1] and nn[1] == [0]


def test_knn_full_lists():
    rng = np.random.default_rng(1)
    v = rng.normal(size=(6, 4))
    nn = hd_knn(v, 5)
    for i, row in enumerate(nn):
        assert sorted(row + [i]) == list(range(6))


def test_knn_k_out_of_range():
    v = np.eye(3)
    for k in (0, 3):
        with pytest.raises(KOutOfRangeError):
            hd_knn(v, k)


# --- FPR / FNR ---------------------------------------------------------------


def test_fprfnr_cluster_faithful_zero():
    rng = np.random.default_rng(2)
    blobs = [rng.normal(size=(3, 2)) * 0.01 + center for center in ([0, 0], [100, 100])]
    coords = np.vstack(blobs)
    labels = [0, 0, 0, 1, 1, 1]
    mst = kruskal_mst(pairwise_distances(coords, Metric.EUCLIDEAN))
    fpr, fnr = fpr_fnr(assignment_from(labels), mst)
    assert np.all(fpr == 0.0)
    assert np.all(fnr == 0.0)


def test_fprfnr_worked_four_point_instance():
    # HD clusters {p1,p2},{p3,p4}; layout p1=(0,0), p3=(1,0), p2=(5,0), p4=(6,0)
    coords = np.array([[0.0, 0.0], [5.0, 0.0], [1.0, 0.0], [6.0, 0.0]])
    labels = [0, 0, 1, 1]
    mst = kruskal_mst(pairwise_distances(coords, Metric.EUCLIDEAN))
    edge_set = {(u, v): w for u, v, w in mst.edges}
    assert edge_set == {(0, 2): 1.0, (1, 3): 1.0, (1, 2): 4.0}
    fpr, fnr = fpr_fnr(assignment_from(labels), mst)
    assert fpr[0] == pytest.approx(0.5)
    assert fnr[0] == pytest.approx(1.0)


def test_fprfnr_singleton_cluster():
    coords = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    labels = [0, 1, 1]
    mst = kruskal_mst(pairwise_distances(coords, Metric.EUCLIDEAN))
    fpr, fnr = fpr_fnr(assignment_from(labels), mst)
    assert fpr[0] == 0.0 and fnr[0] == 0.0


def test_fprfnr_matches_reference_trace():
    rng = np.random.default_rng(3)
    for trial in range(60):
        n = int(rng.integers(3, 13))
        coords = rng.uniform(size=(n, 2))
        k = int(rng.integers(1, max(2, n // 2) + 1))
        labels = rng.integers(0, k, n)
        labels[: k] = np.arange(k)  # every cluster non-empty
        d = pairwise_distances(coords, Metric.EUCLIDEAN)
        mst = kruskal_mst(d)
        fpr, fnr = fpr_fnr(assignment_from(labels), mst)
        ref_fpr, ref_fnr = oracles.grow_rates_reference(n, mst.edges, labels)
        assert np.array_equal(fpr, ref_fpr)
        assert np.array_equal(fnr, ref_fnr)
        assert np.all((fpr >= 0) & (fpr <= 1))
        assert np.all((fnr >= 0) & (fnr <= 1))


def test_fprfnr_zero_when_clusters_are_tight_subtrees():
    rng = np.random.default_rng(4)
    centers = np.array([[0.0, 0.0], [50.0, 0.0], [0.0, 50.0]])
    coords = np.vstack([rng.normal(size=(4, 2)) * 0.1 + c for c in centers])
    labels = np.repeat([0, 1, 2], 4)
    mst = kruskal_mst(pairwise_distances(coords, Metric.EUCLIDEAN))
    fpr, fnr = fpr_fnr(assignment_from(labels), mst)
    assert np.all(fpr == 0.0) and np.all(fnr == 0.0)


# --- neighbor metrics ----------------------------------------------------------


def test_neighbor_metrics_identity_projection():
    rng = np.random.default_rng(5)
    coords = rng.normal(size=(10, 2))
    k = 3
    reports = neighbor_metrics(coords, coords.copy(), KMode.fixed(k))
    assert np.all(reports[MetricId.TRUE_NEIGHBORS].values == 1.0)
    assert np.all(reports[MetricId.FALSE_NEIGHBORS].values == 0.0)
    assert np.all(reports[MetricId.MISSING_NEIGHBORS].values == 0.0)
    assert np.allclose(reports[MetricId.LCMC].values, 1.0 - k / 9.0)


def test_neighbor_metrics_swapped_pair():
    # HD: 0-1 close, 2-3 close; 2D swaps 1 and 3, reversing both neighborhoods
    hd = np.array([[0.0, 0.0], [1.0, 0.0], [10.0, 0.0], [11.0, 0.0]])
    coords = np.array([[0.0, 0.0], [11.0, 0.0], [10.0, 0.0], [1.0, 0.0]])
    reports = neighbor_metrics(coords, hd, KMode.fixed(1))
    assert np.all(reports[MetricId.TRUE_NEIGHBORS].values == 0.0)
    assert np.all(reports[MetricId.FALSE_NEIGHBORS].values == 1.0)
    assert np.all(reports[MetricId.MISSING_NEIGHBORS].values == 1.0)


def test_neighbor_metrics_partition_property():
    rng = np.random.default_rng(6)
    for _ in range(20):
        n = int(rng.integers(4, 20))
        coords = rng.normal(size=(n, 2))
        hd = rng.normal(size=(n, 5))
        k = int(rng.integers(1, n))
        reports = neighbor_metrics(coords, hd, KMode.fixed(k))
        true_r = reports[MetricId.TRUE_NEIGHBORS].values
        false_r = reports[MetricId.FALSE_NEIGHBORS].values
        missing_r = reports[MetricId.MISSING_NEIGHBORS].values
        assert np.allclose(true_r + false_r, 1.0)
        assert np.array_equal(false_r, missing_r)
        lcmc = reports[MetricId.LCMC].values
        assert np.all(lcmc >= reports[MetricId.LCMC].lo - 1e-12)
        assert np.all(lcmc <= reports[MetricId.LCMC].hi + 1e-12)


def test_neighbor_metrics_cluster_size_mode():
    coords = np.array([[0.0, 0.0], [1.0, 0.0], [50.0, 0.0], [51.0, 0.0], [52.0, 0.0]])
    hd = coords.copy()
    clusters = assignment_from([0, 0, 1, 1, 1])
    reports = neighbor_metrics(coords, hd, KMode.cluster_size(), clusters)
    # per-point k: cluster sizes 2 and 3 -> k_i 1,1,2,2,2
    assert np.all(reports[MetricId.TRUE_NEIGHBORS].values == 1.0)
    expected_lo = -np.array([1, 1, 2, 2, 2]) / 4.0
    assert np.allclose(reports[MetricId.LCMC].lo, expected_lo)


# --- distance metrics ----------------------------------------------------------


def test_distance_metrics_similarity_transform():
    rng = np.random.default_rng(7)
    hd = rng.normal(size=(12, 2))
    theta = 0.7
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    coords = 3.5 * hd @ rot.T + np.array([10.0, -4.0])
    reports = distance_metrics(coords, hd, k=4)
    assert np.allclose(reports[MetricId.COMPRESSION].values, 0.0, atol=1e-9)
    assert np.allclose(reports[MetricId.STRETCHING].values, 0.0, atol=1e-9)
    assert np.allclose(reports[MetricId.AGG_ERROR].values, 0.0, atol=1e-9)
    assert np.allclose(reports[MetricId.PPS].values, 1.0, atol=1e-9)


def test_distance_metrics_hand_computed():
    # HD collinear at 0,1,2 ; 2D at 0,1,4
    hd = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    coords = np.array([[0.0, 0.0], [1.0, 0.0], [4.0, 0.0]])
    reports = distance_metrics(coords, hd, k=1)
    # normalized HD distances: 0,.5,1 ; normalized 2D: 0,.25,1
    e01 = 0.25 - 0.5
    e02 = 1.0 - 1.0
    e12 = 0.75 - 0.5
    agg0 = (abs(e01) + abs(e02)) / 2
    agg1 = (abs(e01) + abs(e12)) / 2
    agg2 = (abs(e02) + abs(e12)) / 2
    assert np.allclose(reports[MetricId.AGG_ERROR].values, [agg0, agg1, agg2])
    assert np.allclose(reports[MetricId.COMPRESSION].values, [0.125, 0.125, 0.0])
    assert np.allclose(reports[MetricId.STRETCHING].values, [0.0, 0.125, 0.125])


def test_distance_metrics_split_identity():
    rng = np.random.default_rng(8)
    for _ in range(20):
        n = int(rng.integers(2, 15))
        coords = rng.normal(size=(n, 2))
        hd = rng.normal(size=(n, 4))
        k = int(rng.integers(1, n))
        reports = distance_metrics(coords, hd, k)
        total = reports[MetricId.COMPRESSION].values + reports[MetricId.STRETCHING].values
        assert np.allclose(total, reports[MetricId.AGG_ERROR].values, atol=1e-12)
        for metric in (MetricId.PPS, MetricId.COMPRESSION, MetricId.STRETCHING, MetricId.AGG_ERROR):
            values = reports[metric].values
            assert np.all(values >= -1e-12) and np.all(values <= 1 + 1e-12)


def test_distance_metrics_rigid_motion_invariance():
    rng = np.random.default_rng(9)
    coords = rng.normal(size=(10, 2))
    hd = rng.normal(size=(10, 6))
    base = distance_metrics(coords, hd, k=3)
    theta = -1.2
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    moved = 0.25 * coords @ rot.T + np.array([3.0, 8.0])
    again = distance_metrics(moved, hd, k=3)
    for metric, report in base.items():
        assert np.allclose(report.values, again[metric].values, atol=1e-9)
    # uniform scaling of the HD space is just as inert
    scaled_hd = distance_metrics(coords, 12.5 * hd, k=3)
    for metric, report in base.items():
        assert np.allclose(report.values, scaled_hd[metric].values, atol=1e-9)


def test_distance_metrics_degenerate_space():
    coords = np.zeros((4, 2))  # all coincident in 2D
    rng = np.random.default_rng(10)
    hd = rng.normal(size=(4, 3))
    reports = distance_metrics(coords, hd, k=1)
    assert np.all(reports[MetricId.STRETCHING].values == 0.0)
    assert np.all(reports[MetricId.COMPRESSION].values > 0.0)
    assert np.isfinite(reports[MetricId.PPS].values).all()
