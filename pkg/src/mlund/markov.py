"""Graph construction, Markov transition matrix and truncated spectrum.

Weights use the Gaussian kernel ``W_ij = exp(-|x_i - x_j|^2 / sigma^2)`` on
either the complete graph (dense arrays) or a symmetrized k-nearest-neighbor
graph (sparse CSR). Self-loops ``W_ii = 1`` are always kept.

Eigenpairs are computed from the symmetric conjugate
``D^{-1/2} W D^{-1/2}`` and mapped back to right eigenvectors of ``P``
normalized to unit length in l2(pi), so that the diffusion map coordinates
``lambda_i^t psi_i`` reproduce diffusion distances exactly when ``m = n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import LinearOperator, eigsh
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from .errors import DegenerateKernel, DisconnectedGraph, InvalidInput

DEFAULT_M = 10
# Below this size the full spectrum is cheap enough to take from a dense solver.
DENSE_EIGEN_MAX_N = 500


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray
    truth_labels: np.ndarray | None = None

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] < 1:
            raise InvalidInput(f"points must be an n x D matrix with n >= 2, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InvalidInput("points contain non-finite coordinates")
        object.__setattr__(self, "points", pts)
        if self.truth_labels is not None:
            lab = np.asarray(self.truth_labels, dtype=np.int64).ravel()
            if lab.shape[0] != pts.shape[0]:
                raise InvalidInput("truth_labels length does not match the number of points")
            object.__setattr__(self, "truth_labels", lab)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class GraphConfig:
    """Graph and density-estimation parameters.

    ``knn=None`` selects the complete graph, otherwise the symmetrized
    ``knn``-nearest-neighbor graph.
    """

    sigma: float
    sigma0: float
    kde_neighbors: int
    knn: int | None = None

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidInput(f"sigma must be positive, got {self.sigma}")
        if not self.sigma0 > 0:
            raise InvalidInput(f"sigma0 must be positive, got {self.sigma0}")
        if self.kde_neighbors < 1:
            raise InvalidInput(f"kde_neighbors must be positive, got {self.kde_neighbors}")
        if self.knn is not None and self.knn < 1:
            raise InvalidInput(f"knn must be positive, got {self.knn}")

    @property
    def mode(self) -> str:
        return "complete" if self.knn is None else "knn"


@dataclass(frozen=True, eq=False)
class MarkovModel:
    """Reversible random walk on a weighted graph with a truncated spectrum.

    Attributes
    ----------
    W : ndarray or scipy.sparse.csr_matrix
        Symmetric nonnegative weights.
    P : ndarray or scipy.sparse.csr_matrix
        Row-stochastic transition matrix ``D^{-1} W``.
    pi : ndarray
        Stationary distribution (normalized degrees).
    eigenvalues : ndarray of shape (m,)
        Sorted by modulus, non-increasing; ``eigenvalues[0] == 1``.
    eigenvectors : ndarray of shape (n, m)
        Right eigenvectors of ``P``, orthonormal in l2(pi).
    """

    W: object
    P: object
    pi: np.ndarray
    degrees: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    config: GraphConfig | None = field(default=None)

    @property
    def n(self) -> int:
        return self.pi.shape[0]

    @property
    def m(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.P)

    @property
    def lambda2(self) -> float:
        """Modulus of the second eigenvalue."""
        return float(abs(self.eigenvalues[1])) if self.m > 1 else 0.0

    @property
    def pi_min(self) -> float:
        return float(self.pi.min())

    @property
    def spectrum(self) -> list[tuple[float, np.ndarray]]:
        return [(float(lam), self.eigenvectors[:, i]) for i, lam in enumerate(self.eigenvalues)]

    def dense_P(self) -> np.ndarray:
        return self.P.toarray() if self.is_sparse else np.asarray(self.P)

    def dense_W(self) -> np.ndarray:
        return self.W.toarray() if sp.issparse(self.W) else np.asarray(self.W)

    def with_spectrum(self, m: int | None) -> "MarkovModel":
        """Return a copy carrying ``m`` eigenpairs (``None`` for all of them)."""
        if m is not None and m <= self.m:
            return MarkovModel(self.W, self.P, self.pi, self.degrees,
                               self.eigenvalues[:m], self.eigenvectors[:, :m], self.config)
        vals, vecs = _spectrum(self.W, self.degrees, m)
        return MarkovModel(self.W, self.P, self.pi, self.degrees, vals, vecs, self.config)


def gaussian_weights(points: np.ndarray, cfg: GraphConfig):
    """Kernel weight matrix, dense for the complete graph and CSR for KNN."""
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    scale = cfg.sigma ** 2
    if cfg.knn is None:
        W = cdist(points, points, "sqeuclidean")
        W /= -scale
        np.exp(W, out=W)
        return W
    if cfg.knn >= n:
        raise InvalidInput(f"knn must be smaller than n ({n}), got {cfg.knn}")
    dist, idx = cKDTree(points).query(points, k=cfg.knn + 1)
    # Drop each point's own entry; with duplicate points it may not be first.
    own = idx == np.arange(n)[:, None]
    own[~own.any(axis=1), -1] = True
    keep = ~own
    nbr = idx[keep].reshape(n, cfg.knn)
    d = dist[keep].reshape(n, cfg.knn)
    rows = np.concatenate([np.repeat(np.arange(n), cfg.knn), np.arange(n)])
    cols = np.concatenate([nbr.ravel(), np.arange(n)])
    vals = np.concatenate([np.exp(-(d.ravel() ** 2) / scale), np.ones(n)])
    W = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    # Union symmetrization: an edge survives if either endpoint lists the other.
    W = W.maximum(W.T).tocsr()
    W.sort_indices()
    return W


def count_components(W) -> int:
    if sp.issparse(W):
        return int(connected_components(W, directed=False)[0])
    # Breadth-first sweep over dense rows; avoids materializing a sparse copy.
    n = W.shape[0]
    seen = np.zeros(n, dtype=bool)
    components = 0
    for start in range(n):
        if seen[start]:
            continue
        components += 1
        seen[start] = True
        frontier = np.array([start])
        while frontier.size:
            reach = (W[frontier] > 0).any(axis=0) & ~seen
            frontier = np.flatnonzero(reach)
            seen[frontier] = True
    return components


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    # Make the largest-magnitude entry of each column positive.
    pivot = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[pivot, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def _spectrum(W, degrees: np.ndarray, m: int | None) -> tuple[np.ndarray, np.ndarray]:
    n = degrees.shape[0]
    s = 1.0 / np.sqrt(degrees)
    k = n if m is None else min(m, n)
    if n <= DENSE_EIGEN_MAX_N or k >= n - 1:
        Wd = W.toarray() if sp.issparse(W) else np.asarray(W)
        A = Wd * s[:, None] * s[None, :]
        A = 0.5 * (A + A.T)
        vals, vecs = eigh(A)
    else:
        if sp.issparse(W):
            A = sp.diags(s) @ W @ sp.diags(s)
        else:
            A = LinearOperator((n, n), matvec=lambda v: s * (W @ (s * v.ravel())), dtype=float)
        v0 = np.random.default_rng(0).standard_normal(n)
        vals, vecs = eigsh(A, k=k, which="LM", v0=v0, tol=0)
    order = np.lexsort((-vals, -np.abs(vals)))[:k]
    vals = np.clip(vals[order], -1.0, 1.0)
    vecs = vecs[:, order]
    # Back-transform to right eigenvectors of P with unit l2(pi) norm.
    vol = degrees.sum()
    psi = vecs * (np.sqrt(vol) * s)[:, None]
    psi = _fix_signs(psi)
    # The top pair is known in closed form.
    vals[0] = 1.0
    psi[:, 0] = 1.0
    return vals, psi


def markov_from_weights(W, m: int | None = DEFAULT_M, config: GraphConfig | None = None) -> MarkovModel:
    """Build the random walk for a given symmetric weight matrix.

    ``m=None`` keeps the full spectrum.
    """
    if sp.issparse(W):
        W = sp.csr_matrix(W, dtype=float)
        degrees = np.asarray(W.sum(axis=1)).ravel()
    else:
        W = np.asarray(W, dtype=float)
        degrees = W.sum(axis=1)
    n = W.shape[0]
    if W.ndim != 2 or W.shape != (n, n) or n < 2:
        raise InvalidInput("weight matrix must be square with n >= 2")
    bad = ~np.isfinite(degrees) | (degrees <= 0)
    if bad.any():
        raise DegenerateKernel(f"{int(bad.sum())} rows of W have zero or non-finite sum (first: {int(np.argmax(bad))})")
    components = count_components(W)
    if components > 1:
        raise DisconnectedGraph(components)
    if sp.issparse(W):
        P = (sp.diags(1.0 / degrees) @ W).tocsr()
    else:
        P = W / degrees[:, None]
    pi = degrees / degrees.sum()
    vals, vecs = _spectrum(W, degrees, m)
    for arr in (pi, degrees, vals, vecs):
        arr.setflags(write=False)
    if not sp.issparse(P):
        W.setflags(write=False)
        P.setflags(write=False)
    return MarkovModel(W, P, pi, degrees, vals, vecs, config)


def build_markov(data: PointCloud, cfg: GraphConfig, m: int | None = DEFAULT_M) -> MarkovModel:
    """Build the Markov model for a point cloud under ``cfg``."""
    if cfg.knn is not None and cfg.knn >= data.n:
        raise InvalidInput(f"knn must be smaller than n ({data.n}), got {cfg.knn}")
    return markov_from_weights(gaussian_weights(data.points, cfg), m=m, config=cfg)


def stationary_distribution(model: MarkovModel) -> np.ndarray:
    return model.pi.copy()
