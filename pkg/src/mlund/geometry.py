"""Diffusion maps, diffusion distances, density estimation and the LUND score."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from .errors import InvalidInput
from .markov import GraphConfig, MarkovModel, PointCloud

# Rows of distances materialized at once by the brute-force paths.
_CHUNK_ENTRIES = 1 << 22


@dataclass(frozen=True, eq=False)
class DensityEstimate:
    p: np.ndarray
    bandwidth: float
    neighbor_count: int


@dataclass(frozen=True, eq=False)
class DiffusionEmbedding:
    t: float
    coords: np.ndarray


def kde(data: PointCloud, cfg: GraphConfig) -> DensityEstimate:
    """Nearest-neighbor Gaussian KDE normalized to sum to one.

    The sum runs over the ``cfg.kde_neighbors`` nearest neighbors of each point,
    excluding the point itself.
    """
    n, N = data.n, cfg.kde_neighbors
    if N >= n:
        raise InvalidInput(f"kde_neighbors must be smaller than n ({n}), got {N}")
    dist, idx = cKDTree(data.points).query(data.points, k=N + 1)
    dist = dist.reshape(n, N + 1)
    idx = idx.reshape(n, N + 1)
    own = idx == np.arange(n)[:, None]
    own[~own.any(axis=1), -1] = True
    d = dist[~own].reshape(n, N)
    expo = -(d ** 2) / cfg.sigma0 ** 2
    # A common shift cancels in the normalization and delays underflow.
    w = np.exp(expo - expo.max()).sum(axis=1)
    w = np.maximum(w, np.finfo(float).tiny)
    p = w / w.sum()
    p.setflags(write=False)
    return DensityEstimate(p=p, bandwidth=cfg.sigma0, neighbor_count=N)


def diffusion_map(model: MarkovModel, t: float) -> DiffusionEmbedding:
    """Coordinates ``|lambda_i|^t psi_i`` over the stored spectrum.

    The modulus is used so that real ``t`` is meaningful for negative
    eigenvalues; distances are unaffected by the sign.
    """
    if t < 0:
        raise InvalidInput(f"diffusion time must be nonnegative, got {t}")
    scale = np.power(np.abs(model.eigenvalues), float(t))
    return DiffusionEmbedding(t=float(t), coords=model.eigenvectors * scale)


def diffusion_distance(model: MarkovModel, t: float, i: int, j: int) -> float:
    lam = np.power(np.abs(model.eigenvalues), float(t))
    diff = (model.eigenvectors[i] - model.eigenvectors[j]) * lam
    return float(np.sqrt(diff @ diff))


def pairwise_diffusion_distances(model: MarkovModel, t: float) -> np.ndarray:
    coords = diffusion_map(model, t).coords[:, 1:]
    if coords.shape[1] == 0:
        return np.zeros((model.n, model.n))
    return cdist(coords, coords)


def density_order(p: np.ndarray) -> np.ndarray:
    """Indices sorted by density, non-increasing, ties by index."""
    return np.lexsort((np.arange(p.shape[0]), -np.asarray(p)))


def _brute_nearest_earlier(Y, points, rank):
    best = np.empty(points.shape[0], dtype=np.int64)
    dbest = np.empty(points.shape[0])
    n = Y.shape[0]
    step = max(1, _CHUNK_ENTRIES // n)
    for s in range(0, points.shape[0], step):
        block = points[s:s + step]
        D = cdist(Y[block], Y)
        D[rank[None, :] >= rank[block][:, None]] = np.inf
        dmin = D.min(axis=1)
        cand = np.where(D == dmin[:, None], np.arange(n)[None, :], n)
        best[s:s + step] = cand.min(axis=1)
        dbest[s:s + step] = dmin
    return best, dbest


def nearest_denser(coords: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Distance to, and index of, the nearest point of higher density.

    Density ties count as higher only for lower-index points. Distances are
    Euclidean in ``coords``. The global maximizer gets its largest distance to
    any point and parent ``-1``. Ties in distance go to the lowest index.

    A k-d tree answers most queries from a few nearest neighbors; points whose
    neighborhood holds no denser point (or whose answer sits on the neighborhood
    boundary) are retried with a larger neighborhood and finally by brute force.
    """
    n = coords.shape[0]
    Y = np.ascontiguousarray(coords)
    order = density_order(p)
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    parent = np.full(n, -1, dtype=np.int64)
    rho = np.zeros(n)
    top = order[0]
    if Y.shape[1] == 0:
        # No non-constant coordinates: every distance is zero.
        parent[order[1:]] = order[0]
        return rho, parent
    rho[top] = cdist(Y[top:top + 1], Y).max()

    pending = order[1:]
    tree = cKDTree(Y)
    k = min(16, n)
    while pending.size and 4 * k <= n:
        d, idx = tree.query(Y[pending], k=k)
        valid = rank[idx] < rank[pending][:, None]
        dv = np.where(valid, d, np.inf)
        dmin = dv.min(axis=1)
        cand = np.where(dv == dmin[:, None], idx, n).min(axis=1)
        done = np.isfinite(dmin) & (dmin < d[:, -1])
        parent[pending[done]] = cand[done]
        rho[pending[done]] = dmin[done]
        pending = pending[~done]
        k *= 4
    if pending.size:
        best, dbest = _brute_nearest_earlier(Y, pending, rank)
        parent[pending] = best
        rho[pending] = dbest
    return rho, parent


def rho_t(model: MarkovModel, density: DensityEstimate, t: float) -> np.ndarray:
    """Diffusion distance from each point to its nearest higher-density point."""
    coords = diffusion_map(model, t).coords[:, 1:]
    return nearest_denser(coords, density.p)[0]


def lund_score(density: DensityEstimate | np.ndarray, rho: np.ndarray) -> np.ndarray:
    p = density.p if isinstance(density, DensityEstimate) else np.asarray(density)
    return p * np.asarray(rho)
