"""Comparison clusterers: K-means, spectral clustering, hierarchical spectral
clustering, and single linkage with a ratio-based level selection."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InvalidInput, NoLocalMaxima
from .lund import Clustering
from .markov import MarkovModel, PointCloud
from .mlund import nontrivial, select_optimal, total_vi_table

N_RESTARTS = 10
KMEANS_RTOL = 1e-9
KMEANS_MAX_ITER = 300


def _points(data) -> np.ndarray:
    pts = data.points if isinstance(data, PointCloud) else np.asarray(data, dtype=float)
    return pts[:, None] if pts.ndim == 1 else pts


@dataclass(frozen=True, eq=False)
class KMeansResult:
    clustering: Clustering
    centers: np.ndarray
    inertia: float
    history: list[float]
    restart: int


def _kmeanspp(X: np.ndarray, K: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = [X[rng.integers(n)]]
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for _ in range(1, K):
        total = d2.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = min(int(np.searchsorted(np.cumsum(d2), rng.uniform(0, total), side="right")), n - 1)
        centers.append(X[idx])
        d2 = np.minimum(d2, ((X - X[idx]) ** 2).sum(axis=1))
    return np.array(centers)


def _lloyd(X: np.ndarray, centers: np.ndarray, rtol: float, max_iter: int):
    history = []
    K = centers.shape[0]
    for _ in range(max_iter):
        D = cdist(X, centers, "sqeuclidean")
        assign = np.argmin(D, axis=1)
        cost = D[np.arange(X.shape[0]), assign]
        inertia = float(cost.sum())
        if history and history[-1] - inertia <= rtol * history[-1]:
            history.append(min(inertia, history[-1]))
            break
        history.append(inertia)
        sizes = np.bincount(assign, minlength=K)
        new = np.zeros_like(centers)
        np.add.at(new, assign, X)
        empty = sizes == 0
        new[~empty] /= sizes[~empty, None]
        # Reseed empty clusters at the points farthest from their centers.
        if empty.any():
            far = np.argsort(-cost, kind="stable")[: int(empty.sum())]
            new[empty] = X[far]
        centers = new
    D = cdist(X, centers, "sqeuclidean")
    assign = np.argmin(D, axis=1)
    return assign, centers, float(D[np.arange(X.shape[0]), assign].sum()), history


def kmeans_fit(data, K: int, seed: int = 0, n_init: int = N_RESTARTS,
               rtol: float = KMEANS_RTOL, max_iter: int = KMEANS_MAX_ITER) -> KMeansResult:
    """K-means with careful seeding; best of ``n_init`` restarts by (inertia, restart)."""
    X = _points(data)
    n = X.shape[0]
    if not 1 <= K <= n:
        raise InvalidInput(f"K must lie in 1..n ({n}), got {K}")
    best = None
    for r, child in enumerate(np.random.SeedSequence(seed).spawn(n_init)):
        rng = np.random.default_rng(child)
        assign, centers, inertia, history = _lloyd(X, _kmeanspp(X, K, rng), rtol, max_iter)
        if best is None or inertia < best[2]:
            best = (assign, centers, inertia, history, r)
    assign, centers, inertia, history, r = best
    clustering = Clustering.from_labels(assign)
    # Reorder centers so that row k belongs to label k + 1.
    _, first = np.unique(clustering.labels, return_index=True)
    return KMeansResult(clustering, centers[assign[first]], inertia, history, r)


def kmeans(data, K: int, seed: int = 0) -> Clustering:
    return kmeans_fit(data, K, seed).clustering


def spectral_cluster(model: MarkovModel, K: int, seed: int = 0) -> Clustering:
    """K-means on the row-normalized leading ``K`` eigenvectors of ``P``."""
    n = model.n
    if K < 2 or K > n:
        raise InvalidInput(f"spectral clustering needs 2 <= K <= n ({n}), got {K}")
    if K == n:
        return Clustering(np.arange(1, n + 1), n, np.empty(0, dtype=np.int64))
    if K > model.m:
        model = model.with_spectrum(K)
    emb = np.array(model.eigenvectors[:, :K])
    norms = np.linalg.norm(emb, axis=1)
    nz = norms > 0
    emb[nz] /= norms[nz, None]
    return kmeans(emb, K, seed)


def _power(lam: np.ndarray, t: float) -> np.ndarray:
    if float(t).is_integer():
        return lam ** int(t)
    return np.abs(lam) ** t


def eigengap_profile(eigenvalues: np.ndarray, times) -> tuple[np.ndarray, np.ndarray]:
    """``Delta_t = max_k |lambda_k^t - lambda_{k+1}^t|`` and its argmax ``K_t`` (1-based)."""
    gaps = np.array([np.abs(np.diff(_power(eigenvalues, t))) for t in times])
    return gaps.max(axis=1), gaps.argmax(axis=1) + 1


def local_maxima(values) -> list[int]:
    """Indices of local maxima; a plateau reports its first index.

    Endpoints count when they exceed their only neighboring plateau.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return []
    starts = [0] + [i for i in range(1, v.size) if v[i] != v[i - 1]]
    plateau = v[starts]
    out = []
    for j, s in enumerate(starts):
        left = j == 0 or plateau[j] > plateau[j - 1]
        right = j == len(starts) - 1 or plateau[j] > plateau[j + 1]
        if left and right:
            out.append(s)
    return out


@dataclass(frozen=True, eq=False)
class HscLevel:
    clustering: Clustering
    t: float
    alpha: float
    beta: float


def _single_cluster(n: int) -> Clustering:
    return Clustering(np.ones(n, dtype=np.int64), 1, np.empty(0, dtype=np.int64))


def hsc(model: MarkovModel, T_max: int, seed: int = 0, times=None) -> list[HscLevel]:
    """Hierarchical spectral clustering at the local maxima of the eigengap.

    ``times`` defaults to ``1..T_max``; ``alpha`` is the spacing to the previous
    maximum over ``T_max`` and ``beta`` the eigengap there.
    """
    times = np.arange(1, T_max + 1, dtype=float) if times is None else np.asarray(times, dtype=float)
    if T_max <= 0 or times.size == 0:
        warnings.warn("empty time range; no local maxima", NoLocalMaxima, stacklevel=2)
        return []
    delta, K_t = eigengap_profile(model.eigenvalues, times)
    peaks = local_maxima(delta)
    if not peaks:
        warnings.warn("eigengap has no local maxima", NoLocalMaxima, stacklevel=2)
        return []
    levels = []
    prev = 0.0
    for i in peaks:
        K = int(K_t[i])
        c = _single_cluster(model.n) if K < 2 else spectral_cluster(model, K, seed)
        levels.append(HscLevel(c, float(times[i]), (times[i] - prev) / T_max, float(delta[i])))
        prev = times[i]
    return levels


def hsc_multiscale(model: MarkovModel, times, seed: int = 0) -> tuple[Clustering | None, dict]:
    """Spectral clustering at the eigengap estimate ``K_t`` of every grid time,
    then the minimal-total-VI choice among the nontrivial ones.

    Returns the selected clustering (``None`` if none is nontrivial) and a
    record of per-time ``K_t``.
    """
    times = np.asarray(times, dtype=float)
    _, K_t = eigengap_profile(model.eigenvalues, times)
    cache: dict[int, Clustering] = {}
    chosen = {}
    for t, K in zip(times, K_t):
        K = int(K)
        if nontrivial(K, model.n):
            if K not in cache:
                cache[K] = spectral_cluster(model, K, seed)
            chosen[float(t)] = cache[K]
    best = select_optimal(total_vi_table(chosen))
    return (None if best is None else chosen[best]), {"times": times.tolist(), "K_t": [int(k) for k in K_t]}


@dataclass(frozen=True, eq=False)
class Dendrogram:
    """Single-linkage merge sequence.

    ``merges[i] = (a, b, height)`` joins the clusters holding points ``a`` and
    ``b`` at step ``i``; heights are non-decreasing.
    """

    merges: np.ndarray
    heights: np.ndarray
    points: np.ndarray

    @property
    def n(self) -> int:
        return self.points.shape[0]


def _prim_mst(X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = X.shape[0]
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    link = np.zeros(n, dtype=np.int64)
    u = 0
    in_tree[0] = True
    a = np.empty(n - 1, dtype=np.int64)
    b = np.empty(n - 1, dtype=np.int64)
    w = np.empty(n - 1)
    for step in range(n - 1):
        d = np.sqrt(((X - X[u]) ** 2).sum(axis=1))
        better = (d < best) & ~in_tree
        best[better] = d[better]
        link[better] = u
        cand = np.where(in_tree, np.inf, best)
        v = int(np.argmin(cand))
        a[step], b[step], w[step] = min(v, link[v]), max(v, link[v]), best[v]
        in_tree[v] = True
        u = v
    return a, b, w


def slc(data) -> Dendrogram:
    """Single-linkage dendrogram via a minimum spanning tree.

    Equal heights merge in order of (smaller endpoint, larger endpoint).
    """
    X = _points(data)
    if X.shape[0] < 2:
        raise InvalidInput("single linkage needs at least two points")
    a, b, w = _prim_mst(X)
    order = np.lexsort((b, a, w))
    merges = np.column_stack([a[order], b[order]])
    return Dendrogram(merges=merges, heights=w[order], points=X)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = np.arange(n)

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root


def slc_cut(dendrogram: Dendrogram, K: int) -> Clustering:
    """The ``K``-cluster level of the dendrogram."""
    n = dendrogram.n
    if not 1 <= K <= n:
        raise InvalidInput(f"K must lie in 1..n ({n}), got {K}")
    uf = _UnionFind(n)
    for a, b in dendrogram.merges[: n - K]:
        ra, rb = uf.find(a), uf.find(b)
        uf.parent[max(ra, rb)] = min(ra, rb)
    roots = np.array([uf.find(i) for i in range(n)])
    return Clustering.from_labels(roots)


def slc_ratios(dendrogram: Dendrogram) -> dict[int, float]:
    """``L_in / L_btw`` for each level ``2 <= l <= n/2``.

    ``L_in`` is the largest within-cluster Euclidean diameter and ``L_btw`` the
    height of the next merge.
    """
    X = dendrogram.points
    n = dendrogram.n
    uf = _UnionFind(n)
    members = {i: [i] for i in range(n)}
    diam = {i: 0.0 for i in range(n)}
    L_in = 0.0
    ratios = {}
    for step, (a, b) in enumerate(dendrogram.merges):
        level = n - step  # clusters present before this merge
        if 2 <= level <= n // 2:
            h = dendrogram.heights[step]
            ratios[level] = L_in / h if h > 0 else (np.inf if L_in > 0 else np.nan)
        ra, rb = uf.find(a), uf.find(b)
        cross = cdist(X[members[ra]], X[members[rb]]).max()
        keep, drop = min(ra, rb), max(ra, rb)
        uf.parent[drop] = keep
        members[keep] = members[keep] + members.pop(drop)
        diam[keep] = max(diam[keep], diam.pop(drop), cross)
        L_in = max(L_in, diam[keep])
    return ratios


def slc_select(dendrogram: Dendrogram) -> Clustering:
    """Level minimizing ``L_in / L_btw`` over ``2 <= l <= n/2`` (ties to fewer clusters)."""
    ratios = slc_ratios(dendrogram)
    if not ratios:
        raise InvalidInput("need n >= 4 for a level between 2 and n/2")
    levels = sorted(ratios)
    vals = np.array([ratios[l] for l in levels])
    vals = np.where(np.isnan(vals), np.inf, vals)
    return slc_cut(dendrogram, levels[int(np.argmin(vals))])
