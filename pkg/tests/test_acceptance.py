"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s``. Tolerances are pinned
in the assertions; the timed criteria measure steady-state behavior (the
JIT warmup in conftest runs before any timer starts).
"""

import math
import time

import numpy as np
from fastapi.testclient import TestClient

from layerlens.cli import main as cli_main
from layerlens.cluster import (
    ClusterAssignment,
    Linkage,
    Metric,
    build_dendrogram,
    candidate_ks,
    cluster_layer,
    cut_labels,
    pairwise_distances,
    select_cut,
)
from layerlens.corpus import FeatureKind, write_dataset
from layerlens.layout import Frame, build_flow_paths, bundle_flows, snap, stretch_clusters
from layerlens.metrics import KMode, MetricId, distance_metrics, fpr_fnr, kruskal_mst, neighbor_metrics
from layerlens.service import create_app
from layerlens.session import SessionConfig, compute_session
from layerlens.summaries import summarize_cluster
from layerlens.synthetic import make_dataset

import oracles

from conftest import make_dataset as make_tiny_dataset


def _assignment(labels):
    labels = np.asarray(labels, dtype=np.int64)
    return ClusterAssignment("hd", 0, labels, Linkage.SINGLE, 0.0, int(labels.max()) + 1)


def test_algorithm_oracle_equivalence():
    """FPR/FNR equal an independent brute-force trace on >=200 instances."""
    rng = np.random.default_rng(1001)
    instances = []
    for _ in range(220):
        n = int(rng.integers(3, 13))
        coords = rng.uniform(size=(n, 2))
        k = int(rng.integers(1, max(2, n // 2) + 1))
        labels = rng.integers(0, k, n)
        labels[:k] = np.arange(k)
        instances.append((n, coords, labels))
    start = time.perf_counter()
    for n, coords, labels in instances:
        mst = kruskal_mst(pairwise_distances(coords, Metric.EUCLIDEAN))
        fpr, fnr = fpr_fnr(_assignment(labels), mst)
        ref_fpr, ref_fnr = oracles.grow_rates_reference(n, mst.edges, labels)
        assert np.array_equal(fpr, ref_fpr)
        assert np.array_equal(fnr, ref_fnr)
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"took {elapsed:.2f}s"
    print(f"\nACCEPTANCE PASS: Algorithm-1 oracle equivalence (220 instances, {elapsed:.2f}s)")


def test_cluster_faithful_zero_and_worked_instance():
    """Faithful projections score zero; the worked 4-point case is exact."""
    rng = np.random.default_rng(1002)
    for _ in range(25):
        k = int(rng.integers(2, 5))
        sizes = rng.integers(2, 6, k)
        centers = rng.uniform(0, 1, size=(k, 2)) * 1000.0
        coords = np.vstack(
            [rng.normal(size=(s, 2)) * 0.01 + c for s, c in zip(sizes, centers)]
        )
        labels = np.repeat(np.arange(k), sizes)
        mst = kruskal_mst(pairwise_distances(coords, Metric.EUCLIDEAN))
        fpr, fnr = fpr_fnr(_assignment(labels), mst)
        assert np.all(fpr == 0.0)
        assert np.all(fnr == 0.0)
    coords = np.array([[0.0, 0.0], [5.0, 0.0], [1.0, 0.0], [6.0, 0.0]])
    mst = kruskal_mst(pairwise_distances(coords, Metric.EUCLIDEAN))
    fpr, fnr = fpr_fnr(_assignment([0, 0, 1, 1]), mst)
    assert fpr[0] == 0.5
    assert fnr[0] == 1.0
    print("ACCEPTANCE PASS: cluster-faithful zero property + worked instance")


def test_mst_optimality():
    """Kruskal weight equals the exhaustive spanning-tree minimum."""
    rng = np.random.default_rng(1003)
    for _ in range(100):
        n = int(rng.integers(2, 8))
        coords = rng.uniform(size=(n, 2))
        d = pairwise_distances(coords, Metric.EUCLIDEAN)
        mst = kruskal_mst(d)
        engine = math.fsum(w for _, _, w in mst.edges)
        assert engine == oracles.min_spanning_weight_exhaustive(d)
    print("ACCEPTANCE PASS: MST optimality (100 trials, exact)")


def test_silhouette_cut_exhaustive():
    """select_cut returns the window maximum; two blobs always cut at k=2."""
    rng = np.random.default_rng(1004)
    for trial in range(100):
        n = int(rng.integers(4, 41))
        x = rng.normal(size=(n, 3))
        metric = Metric.COSINE if trial % 2 else Metric.EUCLIDEAN
        d = pairwise_distances(x, metric)
        linkage = list(Linkage)[trial % 4]
        dendro = build_dendrogram(d, linkage)
        labels, k, sil = select_cut(dendro, d)
        best = max(
            oracles.silhouette_reference(d, cut_labels(dendro, kk))
            for kk in candidate_ks(n)
        )
        assert abs(sil - best) <= 1e-9
        assert abs(sil - oracles.silhouette_reference(d, labels)) <= 1e-9
    for trial in range(20):
        rng2 = np.random.default_rng(2000 + trial)
        n1, n2 = int(rng2.integers(3, 12)), int(rng2.integers(3, 12))
        blob1 = rng2.normal(size=(n1, 2)) * 0.05
        blob2 = rng2.normal(size=(n2, 2)) * 0.05 + 100.0
        assignment = cluster_layer(np.vstack([blob1, blob2]), Metric.EUCLIDEAN)
        assert assignment.k_clusters == 2
    print("ACCEPTANCE PASS: silhouette cut (100 exhaustive + 20 two-blob)")


def test_metric_suite_invariants():
    """Pointwise identities, identity-projection values, documented ranges."""
    rng = np.random.default_rng(1005)
    coords = rng.normal(size=(12, 2))
    reports = neighbor_metrics(coords, coords.copy(), KMode.fixed(3))
    dreports = distance_metrics(coords, np.hstack([coords, np.zeros((12, 1))]), 3)
    assert np.all(reports[MetricId.TRUE_NEIGHBORS].values == 1.0)
    assert np.allclose(dreports[MetricId.PPS].values, 1.0, atol=1e-12)
    assert np.allclose(dreports[MetricId.AGG_ERROR].values, 0.0, atol=1e-12)
    checked = 0
    for _ in range(1000):
        n = int(rng.integers(3, 14))
        coords = rng.normal(size=(n, 2))
        hd = rng.normal(size=(n, int(rng.integers(2, 7))))
        k = int(rng.integers(1, n))
        nreports = neighbor_metrics(coords, hd, KMode.fixed(k))
        true_r = nreports[MetricId.TRUE_NEIGHBORS].values
        false_r = nreports[MetricId.FALSE_NEIGHBORS].values
        missing_r = nreports[MetricId.MISSING_NEIGHBORS].values
        assert np.allclose(true_r + false_r, 1.0, rtol=0, atol=1e-12)
        assert np.array_equal(false_r, missing_r)
        dreports = distance_metrics(coords, hd, k)
        total = dreports[MetricId.COMPRESSION].values + dreports[MetricId.STRETCHING].values
        assert np.allclose(total, dreports[MetricId.AGG_ERROR].values, atol=1e-12)
        klabels = rng.integers(0, 2, n)
        klabels[:2] = [0, 1]
        mst = kruskal_mst(pairwise_distances(coords, Metric.EUCLIDEAN))
        fpr, fnr = fpr_fnr(_assignment(klabels), mst)
        for report in (*nreports.values(), *dreports.values()):
            assert np.all(report.values >= report.lo - 1e-12)
            assert np.all(report.values <= report.hi + 1e-12)
        assert np.all((fpr >= 0) & (fpr <= 1))
        assert np.all((fnr >= 0) & (fnr <= 1))
        checked += 1
    assert checked == 1000
    print("ACCEPTANCE PASS: metric suite invariants (1000 instances)")


def test_certainty_formula():
    """The three specified cases exactly; range on randomized clusters."""
    pure = make_tiny_dataset([("cell", "NOUN")] * 5)
    s = summarize_cluster([0, 1, 2, 3, 4], FeatureKind.POS, pure, list(range(5)))
    assert s.certainty == 1.0
    spread = make_tiny_dataset([("cell", "NOUN")] * 8)
    s = summarize_cluster([0, 1, 2, 3], FeatureKind.POS, spread, list(range(8)))
    assert s.certainty == 0.25
    tied = make_tiny_dataset([("cell", "VERB")] * 5 + [("cell", "NOUN")] * 5)
    s = summarize_cluster(list(range(10)), FeatureKind.POS, tied, list(range(10)))
    assert s.label == "NOUN"
    assert s.certainty == (5 / 5) ** 2 * (5 / 10) ** 2
    rng = np.random.default_rng(1006)
    for _ in range(200):
        n = int(rng.integers(1, 15))
        pos = [str(rng.choice(["NOUN", "VERB", "ADJ"])) for _ in range(n)]
        dataset = make_tiny_dataset([("w", p) for p in pos])
        m = int(rng.integers(1, n + 1))
        members = sorted(rng.choice(n, size=m, replace=False).tolist())
        s = summarize_cluster(members, FeatureKind.POS, dataset, list(range(n)))
        assert 0.0 <= s.certainty <= 1.0
    print("ACCEPTANCE PASS: certainty formula (3 exact cases + 200 random)")


def test_flow_geometry():
    """Worked path coordinates, continuity/partition, stretch guarantees."""
    frame_a = Frame(0, 0.0, 200.0, 50.0)
    frame_b = Frame(1, 250.0, 200.0, 50.0)
    (path,) = build_flow_paths({0: (120.0, 80.0)}, {0: (300.0, 160.0)}, frame_a, frame_b, [(0, 0)])
    expected = [
        ("h", (120.0, 80.0), (200.0, 80.0), None),
        ("c", (200.0, 80.0), (225.0, 120.0), (212.5, 80.0)),
        ("c", (225.0, 120.0), (250.0, 160.0), (237.5, 160.0)),
        ("h", (250.0, 160.0), (300.0, 160.0), None),
    ]
    got = [(s.kind, s.start, s.end, s.control) for s in path.segments]
    assert got == expected

    rng = np.random.default_rng(1007)
    for _ in range(1000):
        n = int(rng.integers(1, 25))
        pos_a = {i: (float(rng.uniform(0, 200)), float(rng.uniform(0, 200))) for i in range(n)}
        pos_b = {i: (float(rng.uniform(250, 450)), float(rng.uniform(0, 200))) for i in range(n)}
        paths = build_flow_paths(pos_a, pos_b, frame_a, frame_b, [(i, i) for i in range(n)])
        clusters_a = {i: int(rng.integers(0, 3)) for i in range(n)}
        clusters_b = {i: int(rng.integers(0, 3)) for i in range(n)}
        props = {i: str(rng.integers(0, 2)) for i in range(n)}
        bundles = bundle_flows(paths, clusters_a, clusters_b, props)
        assert sum(b.size for b in bundles) == n
        assert sorted(a for b in bundles for a, _ in b.links) == list(range(n))
        for b in bundles:
            for m in range(b.size):
                run = b.segments[4 * m : 4 * m + 4]
                for prev, nxt in zip(run[:-1], run[1:]):
                    assert prev.end == nxt.start

    for _ in range(200):
        k = int(rng.integers(2, 6))
        n = int(rng.integers(k, 40))
        positions = snap(rng.uniform(0, 200, size=(n, 2)))
        labels = np.asarray(rng.integers(0, k, n), dtype=np.int64)
        labels[:k] = np.arange(k)
        stretched = stretch_clusters(positions, labels, 4.0)
        extents = {
            c: (
                stretched.positions[labels == c, 1].min(),
                stretched.positions[labels == c, 1].max(),
            )
            for c in range(k)
        }
        items = sorted(extents.values())
        for (lo1, hi1), (lo2, hi2) in zip(items[:-1], items[1:]):
            assert lo2 > hi1  # strictly disjoint: padding is positive
        for c in range(k):
            before = positions[labels == c, 1]
            after = stretched.positions[labels == c, 1]
            assert np.array_equal(
                before[:, None] - before[None, :], after[:, None] - after[None, :]
            )
    print("ACCEPTANCE PASS: flow geometry (worked path, 1000 bundlings, 200 stretches)")


def test_determinism_and_parity(tmp_path):
    """cmd_compute bytes stable across runs and equal to service bodies."""
    dataset, _ = make_dataset(n_points=45, n_layers=3, dim=8, seed=11)
    manifest = write_dataset(dataset, tmp_path / "data" / "synthetic")
    base = [
        "compute", "--manifest", str(manifest), "--projection", "pca",
        "--k", "4", "--color-by", "pos",
    ]
    assert cli_main(base + ["--out", str(tmp_path / "run1")]) == 0
    assert cli_main(base + ["--out", str(tmp_path / "run2")]) == 0
    names = ("layout.json", "metrics.json", "matrices.json", "summaries.json")
    for name in names:
        a = (tmp_path / "run1" / name).read_bytes()
        b = (tmp_path / "run2" / name).read_bytes()
        assert a == b, name
    client = TestClient(create_app(tmp_path / "data"))
    response = client.post(
        "/sessions", json={"dataset": "synthetic", "projections": ["pca"], "k": 4, "color_by": "pos"}
    )
    assert response.status_code == 201
    sid = response.json()["id"]
    for name in names:
        served = client.get(f"/sessions/{sid}/{name.removesuffix('.json')}").content
        assert served == (tmp_path / "run1" / name).read_bytes(), name
    print("ACCEPTANCE PASS: determinism + CLI/service parity")


def test_synthetic_end_to_end():
    """Planted 3->2 structure is fully recovered within the time budget."""
    start = time.perf_counter()
    dataset, structure = make_dataset(n_points=150, n_layers=4)
    config = SessionConfig.from_json({"dataset": "synthetic", "color_by": "pos"})
    artifacts = compute_session(dataset, config)
    elapsed = time.perf_counter() - start
    (proj,) = artifacts.projections
    for li, layer_art in enumerate(proj.layers):
        planted = structure.labels_per_layer[li]
        ari = oracles.adjusted_rand_index(layer_art.clusters_2d.labels.tolist(), planted.tolist())
        assert ari >= 0.9, f"layer {li}: ARI {ari}"
        fpr = layer_art.reports[MetricId.FPR].values
        fnr = layer_art.reports[MetricId.FNR].values
        assert np.median(fpr) <= 0.1
        assert np.median(fnr) <= 0.1
        # summary label of each detected cluster matches its planted cluster
        detected = layer_art.clusters_2d.labels
        for entry in layer_art.summaries_2d["pos"]:
            members = np.nonzero(detected == entry["cluster"])[0]
            planted_ids, counts = np.unique(planted[members], return_counts=True)
            dominant = int(planted_ids[np.argmax(counts)])
            assert entry["label"] == structure.cluster_pos[dominant]
            assert entry["certainty"] >= 0.8
    bundle_count = sum(len(bundles) for bundles in proj.flows)
    assert bundle_count == structure.transition_count()
    assert elapsed < 10.0, f"took {elapsed:.2f}s"
    print(
        f"ACCEPTANCE PASS: synthetic end-to-end (ARI=1 targets, {bundle_count} bundles, {elapsed:.2f}s)"
    )
