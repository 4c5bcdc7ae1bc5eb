"""Numeric kernels for the hot inner loops.

Every kernel exists in two backends: a numba ``@njit`` build of the loop
core and a pure-numpy fallback. The backend is picked once at import time
from the ``LAYERLENS_NUMBA`` environment variable (``0``/``off``/``false``/
``no`` forces the numpy path; anything else uses numba when importable).
Both backends are kept importable side by side so the benchmark and the
equivalence tests can compare them in one process; see ``IMPLS``.

Conventions shared by all kernels:
  * distance matrices are dense float64, symmetric, zero diagonal;
  * tie-breaking on edges is ascending (weight, min endpoint, max endpoint);
  * linkage codes: 0=single, 1=complete, 2=average, 3=weighted (WPGMA).
"""

from __future__ import annotations

import os

import numpy as np

ENV_FLAG = "LAYERLENS_NUMBA"

_INF = np.inf


def numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def numba_requested() -> bool:
    value = os.environ.get(ENV_FLAG, "").strip().lower()
    return value not in ("0", "off", "false", "no")


# ---------------------------------------------------------------------------
# Loop cores. Written in numba-compilable style; the numpy backend either
# reuses these directly (cheap loops) or swaps in a vectorized variant.
# ---------------------------------------------------------------------------


def _pairwise_euclidean_core(x):
    n = x.shape[0]
    d = x.shape[1]
    out = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            acc = 0.0
            for c in range(d):
                diff = x[i, c] - x[j, c]
                acc += diff * diff
            v = np.sqrt(acc)
            out[i, j] = v
            out[j, i] = v
    return out


def _pairwise_cosine_core(x):
    n = x.shape[0]
    d = x.shape[1]
    norms = np.zeros(n, dtype=np.float64)
    for i in range(n):
        acc = 0.0
        for c in range(d):
            acc += x[i, c] * x[i, c]
        norms[i] = np.sqrt(acc)
    out = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            if norms[i] == 0.0 or norms[j] == 0.0:
                v = 1.0  # zero vector scores a neutral distance
            else:
                acc = 0.0
                for c in range(d):
                    acc += x[i, c] * x[j, c]
                sim = acc / (norms[i] * norms[j])
                if sim > 1.0:
                    sim = 1.0
                elif sim < -1.0:
                    sim = -1.0
                v = 1.0 - sim
            out[i, j] = v
            out[j, i] = v
    return out


def _lance_williams_core(dist, code):
    """Agglomerate a full distance matrix, returning the merge sequence.

    Cluster slots follow the min-leaf convention: a merged cluster lives in
    the lower slot, so slot index equals the smallest member id. The merge
    pair with minimal (distance, slot_i, slot_j) is taken each step, which
    makes the sequence deterministic under ties.
    """
    n = dist.shape[0]
    work = dist.copy()
    active = np.ones(n, dtype=np.bool_)
    node_id = np.arange(n, dtype=np.int64)
    size = np.ones(n, dtype=np.int64)
    merge_left = np.empty(n - 1, dtype=np.int64)
    merge_right = np.empty(n - 1, dtype=np.int64)
    heights = np.empty(n - 1, dtype=np.float64)
    for step in range(n - 1):
        best = _INF
        bi = -1
        bj = -1
        for i in range(n):
            if not active[i]:
                continue
            for j in range(i + 1, n):
                if not active[j]:
                    continue
                if work[i, j] < best:
                    best = work[i, j]
                    bi = i
                    bj = j
        merge_left[step] = node_id[bi]
        merge_right[step] = node_id[bj]
        heights[step] = best
        si = size[bi]
        sj = size[bj]
        for k in range(n):
            if not active[k] or k == bi or k == bj:
                continue
            dik = work[bi, k]
            djk = work[bj, k]
            if code == 0:
                v = dik if dik < djk else djk
            elif code == 1:
                v = dik if dik > djk else djk
            elif code == 2:
                v = (si * dik + sj * djk) / (si + sj)
            else:
                v = 0.5 * (dik + djk)
            work[bi, k] = v
            work[k, bi] = v
        active[bj] = False
        size[bi] = si + sj
        node_id[bi] = n + step
    return merge_left, merge_right, heights


def _lance_williams_numpy(dist, code):
    """Vectorized fallback: masked argmin per step, row update in bulk."""
    n = dist.shape[0]
    work = dist.astype(np.float64, copy=True)
    active = np.ones(n, dtype=bool)
    node_id = np.arange(n, dtype=np.int64)
    size = np.ones(n, dtype=np.int64)
    merge_left = np.empty(n - 1, dtype=np.int64)
    merge_right = np.empty(n - 1, dtype=np.int64)
    heights = np.empty(n - 1, dtype=np.float64)
    masked = work.copy()
    masked[np.tril_indices(n)] = _INF
    for step in range(n - 1):
        flat = int(np.argmin(masked))
        bi, bj = divmod(flat, n)
        best = masked[bi, bj]
        merge_left[step] = node_id[bi]
        merge_right[step] = node_id[bj]
        heights[step] = best
        si, sj = size[bi], size[bj]
        others = active.copy()
        others[bi] = False
        others[bj] = False
        dik = work[bi, others]
        djk = work[bj, others]
        if code == 0:
            v = np.minimum(dik, djk)
        elif code == 1:
            v = np.maximum(dik, djk)
        elif code == 2:
            v = (si * dik + sj * djk) / (si + sj)
        else:
            v = 0.5 * (dik + djk)
        work[bi, others] = v
        work[others, bi] = v
        active[bj] = False
        size[bi] = si + sj
        node_id[bi] = n + step
        # refresh the triangular mask entries touched by the merge
        masked[bj, :] = _INF
        masked[:, bj] = _INF
        cols = np.nonzero(others)[0]
        above = cols[cols > bi]
        below = cols[cols < bi]
        masked[bi, above] = work[bi, above]
        masked[below, bi] = work[below, bi]
    return merge_left, merge_right, heights


def _silhouette_core(dist, labels, k):
    """Mean silhouette for a flat labeling over a precomputed matrix."""
    n = dist.shape[0]
    if k < 2:
        return 0.0
    sums = np.zeros((n, k), dtype=np.float64)
    counts = np.zeros(k, dtype=np.int64)
    for i in range(n):
        counts[labels[i]] += 1
    for i in range(n):
        for j in range(n):
            if i != j:
                sums[i, labels[j]] += dist[i, j]
    total = 0.0
    for i in range(n):
        li = labels[i]
        if counts[li] <= 1:
            continue  # singleton contributes 0
        a = sums[i, li] / (counts[li] - 1)
        b = _INF
        for c in range(k):
            if c == li or counts[c] == 0:
                continue
            m = sums[i, c] / counts[c]
            if m < b:
                b = m
        denom = a if a > b else b
        if denom > 0.0:
            total += (b - a) / denom
    return total / n


def _silhouette_numpy(dist, labels, k):
    n = dist.shape[0]
    if k < 2:
        return 0.0
    onehot = np.zeros((n, k), dtype=np.float64)
    onehot[np.arange(n), labels] = 1.0
    counts = onehot.sum(axis=0)
    sums = dist @ onehot
    own = counts[labels]
    a = np.where(own > 1, sums[np.arange(n), labels] / np.maximum(own - 1, 1), 0.0)
    means = sums / np.maximum(counts, 1)
    means[:, counts == 0] = _INF
    means[np.arange(n), labels] = _INF
    b = means.min(axis=1)
    denom = np.maximum(a, b)
    s = np.where((own > 1) & (denom > 0), (b - a) / np.where(denom > 0, denom, 1.0), 0.0)
    return float(s.mean())


def _kruskal_core(n, us, vs):
    """Union-find pass over pre-sorted edge endpoint arrays.

    Returns indices (into the sorted arrays) of the accepted edges.
    """
    parent = np.arange(n, dtype=np.int64)
    rank = np.zeros(n, dtype=np.int64)
    chosen = np.empty(n - 1, dtype=np.int64)
    taken = 0
    for e in range(us.shape[0]):
        u = us[e]
        v = vs[e]
        ru = u
        while parent[ru] != ru:
            ru = parent[ru]
        rv = v
        while parent[rv] != rv:
            rv = parent[rv]
        # path compression
        w = u
        while parent[w] != ru:
            nxt = parent[w]
            parent[w] = ru
            w = nxt
        w = v
        while parent[w] != rv:
            nxt = parent[w]
            parent[w] = rv
            w = nxt
        if ru == rv:
            continue
        if rank[ru] < rank[rv]:
            parent[ru] = rv
        elif rank[rv] < rank[ru]:
            parent[rv] = ru
        else:
            parent[rv] = ru
            rank[ru] += 1
        chosen[taken] = e
        taken += 1
        if taken == n - 1:
            break
    return chosen[:taken]


def _grow_rates_core(indptr, nbrs, wts, labels, csizes):
    """Per-point FPR/FNR from Prim-style growth over the MST.

    For each point p, a neighborhood is grown edge by edge inside the tree:
    each step adds the out-of-set node reachable by the cheapest tree edge
    from the current set, running |cluster(p)| - 1 steps. The grown set is
    then scored against the point's cluster as a confusion matrix.
    """
    n = indptr.shape[0] - 1
    fpr = np.zeros(n, dtype=np.float64)
    fnr = np.zeros(n, dtype=np.float64)
    in_set = np.zeros(n, dtype=np.bool_)
    best_w = np.empty(n, dtype=np.float64)
    best_lo = np.empty(n, dtype=np.int64)
    best_hi = np.empty(n, dtype=np.int64)
    for p in range(n):
        nc = csizes[labels[p]]
        steps = nc - 1
        tp = 0
        if steps > 0:
            for i in range(n):
                in_set[i] = False
                best_w[i] = _INF
                best_lo[i] = 0
                best_hi[i] = 0
            in_set[p] = True
            for e in range(indptr[p], indptr[p + 1]):
                q = nbrs[e]
                w = wts[e]
                lo = p if p < q else q
                hi = q if p < q else p
                best_w[q] = w
                best_lo[q] = lo
                best_hi[q] = hi
            for _ in range(steps):
                pick = -1
                pw = _INF
                plo = 0
                phi = 0
                for v in range(n):
                    if in_set[v] or best_w[v] == _INF:
                        continue
                    w = best_w[v]
                    if w < pw or (
                        w == pw
                        and (
                            best_lo[v] < plo
                            or (best_lo[v] == plo and best_hi[v] < phi)
                        )
                    ):
                        pick = v
                        pw = w
                        plo = best_lo[v]
                        phi = best_hi[v]
                in_set[pick] = True
                best_w[pick] = _INF
                if labels[pick] == labels[p]:
                    tp += 1
                for e in range(indptr[pick], indptr[pick + 1]):
                    q = nbrs[e]
                    if in_set[q]:
                        continue
                    w = wts[e]
                    lo = pick if pick < q else q
                    hi = q if pick < q else pick
                    if w < best_w[q] or (
                        w == best_w[q]
                        and (
                            lo < best_lo[q]
                            or (lo == best_lo[q] and hi < best_hi[q])
                        )
                    ):
                        best_w[q] = w
                        best_lo[q] = lo
                        best_hi[q] = hi
        fp = steps - tp
        fn = (nc - 1) - tp
        tn = (n - 1) - tp - fp - fn
        fpr[p] = fp / (fp + tn) if (fp + tn) > 0 else 0.0
        fnr[p] = fn / (fn + tp) if (fn + tp) > 0 else 0.0
    return fpr, fnr


def _grow_rates_numpy(indptr, nbrs, wts, labels, csizes):
    """Vectorized growth: masked lexicographic argmin per step."""
    n = indptr.shape[0] - 1
    fpr = np.zeros(n, dtype=np.float64)
    fnr = np.zeros(n, dtype=np.float64)
    for p in range(n):
        nc = int(csizes[labels[p]])
        steps = nc - 1
        tp = 0
        if steps > 0:
            in_set = np.zeros(n, dtype=bool)
            best_w = np.full(n, _INF)
            best_lo = np.zeros(n, dtype=np.int64)
            best_hi = np.zeros(n, dtype=np.int64)
            in_set[p] = True
            sl = slice(indptr[p], indptr[p + 1])
            q = nbrs[sl]
            best_w[q] = wts[sl]
            best_lo[q] = np.minimum(p, q)
            best_hi[q] = np.maximum(p, q)
            for _ in range(steps):
                m = best_w.min()
                ties = np.nonzero(best_w == m)[0]
                if ties.shape[0] == 1:
                    pick = int(ties[0])
                else:
                    order = np.lexsort((best_hi[ties], best_lo[ties]))
                    pick = int(ties[order[0]])
                in_set[pick] = True
                best_w[pick] = _INF
                if labels[pick] == labels[p]:
                    tp += 1
                sl = slice(indptr[pick], indptr[pick + 1])
                q = nbrs[sl]
                w = wts[sl]
                keep = ~in_set[q]
                q, w = q[keep], w[keep]
                lo = np.minimum(pick, q)
                hi = np.maximum(pick, q)
                better = (w < best_w[q]) | (
                    (w == best_w[q])
                    & ((lo < best_lo[q]) | ((lo == best_lo[q]) & (hi < best_hi[q])))
                )
                upd = q[better]
                best_w[upd] = w[better]
                best_lo[upd] = lo[better]
                best_hi[upd] = hi[better]
        fp = steps - tp
        fn = (nc - 1) - tp
        tn = (n - 1) - tp - fp - fn
        fpr[p] = fp / (fp + tn) if (fp + tn) > 0 else 0.0
        fnr[p] = fn / (fn + tp) if (fn + tp) > 0 else 0.0
    return fpr, fnr


def _pairwise_euclidean_numpy(x):
    sq = np.einsum("ij,ij->i", x, x)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d2, 0.0, out=d2)
    d = np.sqrt(d2)
    upper = np.triu(d, 1)
    return upper + upper.T


def _pairwise_cosine_numpy(x):
    norms = np.linalg.norm(x, axis=1)
    safe = np.where(norms == 0.0, 1.0, norms)
    y = x / safe[:, None]
    sim = np.clip(y @ y.T, -1.0, 1.0)
    dist = 1.0 - sim
    zero = norms == 0.0
    if zero.any():
        dist[zero, :] = 1.0
        dist[:, zero] = 1.0
    upper = np.triu(dist, 1)
    return upper + upper.T


def _build_numba_impls():
    from numba import njit

    jit = lambda f: njit(f, cache=True)  # noqa: E731
    return {
        "pairwise_euclidean": jit(_pairwise_euclidean_core),
        "pairwise_cosine": jit(_pairwise_cosine_core),
        "lance_williams": jit(_lance_williams_core),
        "silhouette": jit(_silhouette_core),
        "kruskal": jit(_kruskal_core),
        "grow_rates": jit(_grow_rates_core),
    }


_NUMPY_IMPLS = {
    "pairwise_euclidean": _pairwise_euclidean_numpy,
    "pairwise_cosine": _pairwise_cosine_numpy,
    "lance_williams": _lance_williams_numpy,
    "silhouette": _silhouette_numpy,
    "kruskal": _kruskal_core,
    "grow_rates": _grow_rates_numpy,
}

IMPLS: dict[str, dict] = {"numpy": _NUMPY_IMPLS}

if numba_available():
    IMPLS["numba"] = _build_numba_impls()

BACKEND = "numba" if (numba_requested() and "numba" in IMPLS) else "numpy"

_ACTIVE = IMPLS[BACKEND]

pairwise_euclidean = _ACTIVE["pairwise_euclidean"]
pairwise_cosine = _ACTIVE["pairwise_cosine"]
lance_williams = _ACTIVE["lance_williams"]
silhouette_mean = _ACTIVE["silhouette"]
kruskal_scan = _ACTIVE["kruskal"]
grow_rates = _ACTIVE["grow_rates"]


def warmup() -> None:
    """Trigger JIT compilation on tiny inputs so later calls run hot."""
    x = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
    d = pairwise_euclidean(x)
    pairwise_cosine(x)
    lance_williams(d, 2)
    silhouette_mean(d, np.array([0, 0, 1], dtype=np.int64), 2)
    kruskal_scan(3, np.array([0, 0, 1], dtype=np.int64), np.array([1, 2, 2], dtype=np.int64))
    indptr = np.array([0, 1, 3, 4], dtype=np.int64)
    nbrs = np.array([1, 0, 2, 1], dtype=np.int64)
    wts = np.array([1.0, 1.0, 2.0, 2.0])
    grow_rates(indptr, nbrs, wts, np.array([0, 0, 1], dtype=np.int64), np.array([2, 1], dtype=np.int64))
