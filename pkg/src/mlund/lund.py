"""Mode detection and label propagation at a fixed diffusion time."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AllScoresEqual, InvalidInput
from .geometry import DensityEstimate, density_order, diffusion_map, nearest_denser
from .markov import MarkovModel

RATIO_FLOOR = 1e-300


@dataclass(frozen=True, eq=False)
class Clustering:
    """Hard partition with labels in ``1..K``.

    ``modes[k]`` is the point that seeded label ``k + 1`` (empty when the
    clustering does not come from a mode-seeking method).
    """

    labels: np.ndarray
    K: int
    modes: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).ravel()
        modes = np.asarray(self.modes, dtype=np.int64).ravel()
        if labels.size and (labels.min() < 1 or labels.max() > self.K):
            raise InvalidInput("labels must lie in 1..K")
        if np.unique(labels).size != self.K:
            raise InvalidInput("every label in 1..K must occur")
        if modes.size and not np.array_equal(labels[modes], np.arange(1, modes.size + 1)):
            raise InvalidInput("modes must carry labels 1..K in order")
        labels.setflags(write=False)
        modes.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "modes", modes)

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @classmethod
    def from_labels(cls, labels) -> "Clustering":
        """Relabel arbitrary integer labels to ``1..K`` by first occurrence."""
        labels = np.asarray(labels).ravel()
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
        rank = np.empty(first.size, dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(1, first.size + 1)
        return cls(labels=rank[inverse.ravel()], K=int(first.size), modes=np.empty(0, dtype=np.int64))


@dataclass(frozen=True, eq=False)
class LundRun:
    clustering: Clustering
    t: float
    score: np.ndarray
    rho: np.ndarray
    score_order: np.ndarray
    degenerate: bool


def estimate_K(score: np.ndarray) -> tuple[int, np.ndarray]:
    """Number of modes from the largest ratio of consecutive sorted scores.

    Returns ``(K, order)`` where ``order`` sorts the scores non-increasingly
    (ties by index). Constant scores give ``K = 1`` and an ``AllScoresEqual``
    warning.
    """
    score = np.asarray(score, dtype=float)
    n = score.shape[0]
    if n < 2:
        raise InvalidInput("estimate_K needs at least two scores")
    order = np.lexsort((np.arange(n), -score))
    s = score[order]
    if s[0] == s[-1]:
        warnings.warn("all LUND scores are equal; returning K = 1", AllScoresEqual, stacklevel=2)
        return 1, order
    ratios = s[:-1] / np.maximum(s[1:], RATIO_FLOOR)
    return int(np.argmax(ratios)) + 1, order


def lund_run(model: MarkovModel, density: DensityEstimate, t: float, K: int | None = None) -> LundRun:
    """LUND at time ``t``; ``K`` forces the number of modes instead of estimating it."""
    p = density.p
    n = p.shape[0]
    if n != model.n:
        raise InvalidInput("density and model cover different numbers of points")
    coords = diffusion_map(model, t).coords[:, 1:]
    rho, parent = nearest_denser(coords, p)
    score = p * rho
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        K_hat, score_order = estimate_K(score)
    if K is None:
        K = K_hat
    elif not 1 <= K <= n:
        raise InvalidInput(f"K must lie in 1..{n}, got {K}")
    degenerate = any(issubclass(w.category, AllScoresEqual) for w in caught)
    if degenerate:
        warnings.warn(f"all LUND scores are equal at t={t}; K = 1", AllScoresEqual, stacklevel=2)

    modes = score_order[:K]
    labels = np.zeros(n, dtype=np.int64)
    labels[modes] = np.arange(1, K + 1)
    order = density_order(p)
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)

    # Modes that come later in density order but tie in density are admissible
    # candidates too; collect them per density value.
    tied_modes: dict[float, list[int]] = {}
    for mode in modes:
        tied_modes.setdefault(float(p[mode]), []).append(int(mode))

    def dist(x, ys):
        diff = coords[ys] - coords[x]
        return np.sqrt(np.einsum("ij,ij->i", diff, diff))

    for x in order:
        if labels[x]:
            continue
        cands = [y for y in tied_modes.get(float(p[x]), ()) if rank[y] > rank[x]]
        if parent[x] >= 0:
            cands.append(int(parent[x]))
        elif not cands:
            # Global maximizer that is not a mode: nearest mode overall.
            cands = [int(y) for y in modes]
        if len(cands) == 1:
            best = cands[0]
        else:
            cands = np.array(sorted(cands))
            d = dist(x, cands)
            best = int(cands[np.flatnonzero(d == d.min())[0]])
        labels[x] = labels[best]

    clustering = Clustering(labels=labels, K=K, modes=modes)
    return LundRun(clustering=clustering, t=float(t), score=score, rho=rho,
                   score_order=score_order, degenerate=degenerate)


def lund_cluster(model: MarkovModel, density: DensityEstimate, t: float, K: int | None = None) -> Clustering:
    """LUND clustering of the model's points at diffusion time ``t``."""
    return lund_run(model, density, t, K).clustering
