"""The numba and numpy kernel backends must agree."""

import numpy as np
import pytest

from layerlens import kernels
from layerlens.cluster import Metric, pairwise_distances
from layerlens.metrics import kruskal_mst

needs_numba = pytest.mark.skipif("numba" not in kernels.IMPLS, reason="numba unavailable")


def both(name):
    return kernels.IMPLS["numpy"][name], kernels.IMPLS["numba"][name]


@needs_numba
def test_env_flag_documented():
    assert kernels.ENV_FLAG == "LAYERLENS_NUMBA"
    assert kernels.BACKEND in ("numba", "numpy")


@needs_numba
@pytest.mark.parametrize("name", ["pairwise_euclidean", "pairwise_cosine"])
def test_pairwise_backends_agree(name):
    rng = np.random.default_rng(0)
    for _ in range(10):
        n = int(rng.integers(2, 40))
        x = rng.normal(size=(n, int(rng.integers(2, 12))))
        f_np, f_nb = both(name)
        assert np.allclose(f_np(x), f_nb(x), atol=1e-12)


@needs_numba
def test_lance_williams_backends_agree():
    rng = np.random.default_rng(1)
    f_np, f_nb = both("lance_williams")
    for _ in range(10):
        n = int(rng.integers(3, 25))
        d = pairwise_distances(rng.normal(size=(n, 3)), Metric.EUCLIDEAN)
        for code in range(4):
            left_a, right_a, h_a = f_np(d, code)
            left_b, right_b, h_b = f_nb(d, code)
            assert np.array_equal(left_a, left_b)
            assert np.array_equal(right_a, right_b)
            assert np.allclose(h_a, h_b, atol=1e-12)


@needs_numba
def test_silhouette_backends_agree():
    rng = np.random.default_rng(2)
    f_np, f_nb = both("silhouette")
    for _ in range(15):
        n = int(rng.integers(3, 30))
        k = int(rng.integers(2, 5))
        d = pairwise_distances(rng.normal(size=(n, 3)), Metric.COSINE)
        labels = np.asarray(rng.integers(0, k, n), dtype=np.int64)
        labels[: k] = np.arange(k, dtype=np.int64)[: min(k, n)]
        assert f_np(d, labels, k) == pytest.approx(f_nb(d, labels, k), abs=1e-12)


@needs_numba
def test_kruskal_backends_agree():
    rng = np.random.default_rng(3)
    f_np, f_nb = both("kruskal")
    for _ in range(10):
        n = int(rng.integers(2, 30))
        d = pairwise_distances(rng.uniform(size=(n, 2)), Metric.EUCLIDEAN)
        iu, ju = np.triu_indices(n, 1)
        w = d[iu, ju]
        order = np.lexsort((ju, iu, w))
        us = iu[order].astype(np.int64)
        vs = ju[order].astype(np.int64)
        assert np.array_equal(f_np(n, us, vs), f_nb(n, us, vs))


@needs_numba
def test_grow_rates_backends_agree():
    rng = np.random.default_rng(4)
    f_np, f_nb = both("grow_rates")
    for _ in range(15):
        n = int(rng.integers(3, 30))
        coords = rng.uniform(size=(n, 2))
        mst = kruskal_mst(pairwise_distances(coords, Metric.EUCLIDEAN))
        k = int(rng.integers(1, 4))
        labels = np.asarray(rng.integers(0, k, n), dtype=np.int64)
        labels[:k] = np.arange(k, dtype=np.int64)
        sizes = np.bincount(labels, minlength=k).astype(np.int64)
        a = f_np(mst.indptr, mst.nbrs, mst.wts, labels, sizes)
        b = f_nb(mst.indptr, mst.nbrs, mst.wts, labels, sizes)
        assert np.array_equal(a[0], b[0])
        assert np.array_equal(a[1], b[1])
