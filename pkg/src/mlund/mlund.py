"""Multiscale sweep over diffusion times with total-VI model selection."""

from __future__ import annotations

import math
import warnings
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyJ, InvalidInput, Lambda2Unity
from .geometry import DensityEstimate, kde
from .lund import Clustering, LundRun, lund_run
from .markov import DEFAULT_M, GraphConfig, MarkovModel, PointCloud, build_markov
from .metrics import vi

UNITY_TOL = 1e-12
# Relative tolerance under which two total-VI values count as tied.
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class SweepConfig:
    beta: float = 2.0
    tau: float = 1e-5

    def __post_init__(self):
        if not self.beta > 1:
            raise InvalidInput(f"beta must exceed 1, got {self.beta}")
        if not 0 < self.tau < 1:
            raise InvalidInput(f"tau must lie in (0, 1), got {self.tau}")


@dataclass(frozen=True, eq=False)
class MlundResult:
    T: int
    times: np.ndarray
    runs: list[LundRun]
    J: list[int]
    total_vi: dict[float, float]
    optimal_index: int | None
    model: MarkovModel | None = field(default=None, repr=False)
    density: DensityEstimate | None = field(default=None, repr=False)

    @property
    def clusterings(self) -> list[Clustering]:
        return [r.clustering for r in self.runs]

    @property
    def K_t(self) -> list[int]:
        return [r.clustering.K for r in self.runs]

    @property
    def optimal(self) -> Clustering | None:
        return None if self.optimal_index is None else self.runs[self.optimal_index].clustering

    @property
    def optimal_time(self) -> float | None:
        return None if self.optimal_index is None else float(self.times[self.optimal_index])


def stationarity_time(lambda2: float, pi_min: float, tau: float) -> float:
    """``log_{|lambda2|}(tau * pi_min / 2)``: beyond it all diffusion distances are below tau."""
    lam = abs(lambda2)
    if lam >= 1 - UNITY_TOL:
        raise Lambda2Unity(f"|lambda_2| = {lam!r} is numerically 1; the graph is effectively disconnected")
    if lam == 0:
        return 0.0
    return math.log(tau * pi_min / 2) / math.log(lam)


def compute_T(lambda2: float, pi_min: float, cfg: SweepConfig) -> int:
    """Index of the last grid time, ``ceil(log_beta(log_|lambda2|(tau pi_min / 2)))``.

    Clamped at 0 when the inner logarithm is at most 1.
    """
    inner = stationarity_time(lambda2, pi_min, cfg.tau)
    if inner <= 1:
        return 0
    return max(0, math.ceil(math.log(inner) / math.log(cfg.beta)))


def time_grid(T: int, beta: float) -> np.ndarray:
    return np.array([0.0] + [float(beta) ** j for j in range(T + 1)])


def _canonical(labels: np.ndarray) -> bytes:
    return Clustering.from_labels(labels).labels.tobytes()


def total_vi_table(clusterings: Mapping[float, Clustering]) -> dict[float, float]:
    """Total VI of each clustering against all of them (self-term included).

    Identical partitions are evaluated once and weighted by multiplicity.
    """
    keys = list(clusterings)
    canon = [_canonical(clusterings[t].labels) for t in keys]
    groups: dict[bytes, int] = {}
    reps: list[Clustering] = []
    mult: list[int] = []
    which = []
    for t, c in zip(keys, canon):
        if c not in groups:
            groups[c] = len(reps)
            reps.append(clusterings[t])
            mult.append(0)
        mult[groups[c]] += 1
        which.append(groups[c])
    g = len(reps)
    dist = np.zeros((g, g))
    for a in range(g):
        for b in range(a + 1, g):
            dist[a, b] = dist[b, a] = vi(reps[a], reps[b])
    totals = dist @ np.asarray(mult, dtype=float)
    return {t: float(totals[w]) for t, w in zip(keys, which)}


def select_optimal(total: Mapping[float, float]) -> float | None:
    """Argmin of total VI; near-ties go to the largest time."""
    if not total:
        return None
    best = min(total.values())
    tol = TIE_RTOL * max(1.0, abs(best))
    return max(t for t, v in total.items() if v <= best + tol)


def nontrivial(K: int, n: int) -> bool:
    return 2 <= K and 2 * K < n


def mlund_sweep(model: MarkovModel, density: DensityEstimate, cfg: SweepConfig = SweepConfig()) -> MlundResult:
    """Run LUND over the exponential grid and select the minimal-total-VI clustering."""
    T = compute_T(model.lambda2, model.pi_min, cfg)
    times = time_grid(T, cfg.beta)
    runs = [lund_run(model, density, t) for t in times]
    n = model.n
    J = [i for i, r in enumerate(runs) if nontrivial(r.clustering.K, n)]
    total = total_vi_table({float(times[i]): runs[i].clustering for i in J})
    best_time = select_optimal(total)
    if best_time is None:
        warnings.warn("no nontrivial clustering found across the sweep", EmptyJ, stacklevel=2)
        optimal_index = None
    else:
        optimal_index = int(np.flatnonzero(times == best_time)[0])
    return MlundResult(T=T, times=times, runs=runs, J=J, total_vi=total,
                       optimal_index=optimal_index, model=model, density=density)


def mlund(data: PointCloud, graph_cfg: GraphConfig, cfg: SweepConfig = SweepConfig(),
          m: int | None = DEFAULT_M) -> MlundResult:
    """Build the diffusion model and density for ``data`` and run the sweep."""
    model = build_markov(data, graph_cfg, m=m)
    density = kde(data, graph_cfg)
    return mlund_sweep(model, density, cfg)


def fixed_k(result: MlundResult, K: int) -> tuple[Clustering, float, bool]:
    """Clustering with exactly ``K`` clusters drawn from a sweep.

    Among sampled clusterings with ``K`` clusters the one of least total VI
    (against the whole nontrivial set) is returned. When the sweep never
    produced ``K`` clusters, LUND is rerun with ``K`` modes forced at every
    grid time and the total-VI minimizer of those runs is returned. The last
    element of the result tells whether that fallback was used.
    """
    n = result.runs[0].clustering.n
    if not 1 <= K <= n:
        raise InvalidInput(f"K must lie in 1..{n}, got {K}")
    pool = {float(result.times[i]): result.runs[i].clustering for i in result.J}
    hits = [t for t in map(float, result.times) if result.runs[_index(result, t)].clustering.K == K]
    if hits:
        total = {}
        for t in hits:
            c = result.runs[_index(result, t)].clustering
            total[t] = sum(vi(c, other) for other in pool.values())
        best = select_optimal(total)
        return result.runs[_index(result, best)].clustering, best, False
    if result.model is None or result.density is None:
        raise InvalidInput("forcing K needs the model and density of the sweep")
    forced = {float(t): lund_run(result.model, result.density, t, K).clustering for t in result.times}
    best = select_optimal(total_vi_table(forced))
    return forced[best], best, True


def _index(result: MlundResult, t: float) -> int:
    return int(np.flatnonzero(result.times == t)[0])
