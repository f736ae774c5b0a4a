"""Geometric analysis of clusterings through stochastic complements.

For a partition of the states of ``P`` this module computes the stochastic
complement ``S``, its limit ``S_inf``, the constants ``(|lambda_{K+1}|, delta,
kappa)``, the time intervals on which the partition is guaranteed to be
epsilon-separable by diffusion distances, and numerical checks of the bounds
that tie these quantities together.

All matrices are dense; the analysis targets desk-scale problems.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import (BoundViolation, DefectiveComplement, DegenerateClustering, InvalidInput,
                     NonPrimitiveBlock, SingularComplement)
from .geometry import diffusion_map
from .lund import Clustering
from .markov import MarkovModel

ROW_SUM_TOL = 1e-9
DELTA_IDENTITY_TOL = 1e-8
PRIMITIVE_TOL = 1e-10
REVERSIBLE_RTOL = 1e-10
# Eigenvector matrices with a larger condition number are treated as defective.
DEFECTIVE_COND = 1e12
BOUND_SLACK = 1e-9
DEFAULT_N_EPSILONS = 200
EPSILON_FLOOR = 1e-8
_CHUNK_ROWS = 1024


def _labels_of(clustering) -> np.ndarray:
    labels = np.asarray(getattr(clustering, "labels", clustering)).ravel()
    return Clustering.from_labels(labels).labels


def _dense(P) -> np.ndarray:
    if isinstance(P, MarkovModel):
        return P.dense_P()
    if hasattr(P, "toarray"):
        return P.toarray()
    return np.asarray(P, dtype=float)


def _check_P(P: np.ndarray) -> None:
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise InvalidInput("transition matrix must be square")
    if not np.all(np.isfinite(P)) or (P < 0).any():
        raise InvalidInput("transition matrix must be finite and nonnegative")
    if np.abs(P.sum(axis=1) - 1).max() > 1e-8:
        raise InvalidInput("transition matrix rows must sum to 1")


@dataclass(frozen=True, eq=False)
class StochasticComplement:
    """Block-diagonal stochastic complement in cluster-block order.

    ``S`` and ``S_infinity`` have rows and columns ordered by ``perm``
    (cluster 1 first, original order within each cluster); row ``i`` of ``S``
    is state ``perm[i]`` of ``P``. ``blocks`` are the diagonal blocks and
    ``block_pi`` their stationary distributions.
    """

    S: np.ndarray
    S_infinity: np.ndarray
    perm: np.ndarray
    labels: np.ndarray
    blocks: tuple
    block_pi: tuple

    @property
    def K(self) -> int:
        return len(self.blocks)

    @property
    def n(self) -> int:
        return self.perm.shape[0]

    def original_order(self) -> tuple[np.ndarray, np.ndarray]:
        """``(S, S_infinity)`` indexed like the states of ``P``."""
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.n)
        return self.S[np.ix_(inv, inv)], self.S_infinity[np.ix_(inv, inv)]


def _block_stationary(S_kk: np.ndarray) -> np.ndarray:
    m = S_kk.shape[0]
    if m == 1:
        return np.ones(1)
    A = np.vstack([S_kk.T - np.eye(m), np.ones((1, m))])
    b = np.zeros(m + 1)
    b[-1] = 1.0
    w = np.linalg.lstsq(A, b, rcond=None)[0]
    w = np.maximum(w, 0.0)
    return w / w.sum()


def _reachable(P: np.ndarray, idx: np.ndarray, rest: np.ndarray) -> np.ndarray:
    """States of ``rest`` reachable from ``idx`` without re-entering ``idx``."""
    inner = P[np.ix_(rest, rest)] > 0
    seen = (P[np.ix_(idx, rest)] > 0).any(axis=0)
    frontier = seen.copy()
    while frontier.any():
        frontier = inner[frontier].any(axis=0) & ~seen
        seen |= frontier
    return rest[seen]


def _complement_block(P: np.ndarray, idx: np.ndarray, rest: np.ndarray) -> np.ndarray:
    P_AA = P[np.ix_(idx, idx)]
    # States the walk cannot reach from this cluster contribute nothing, and
    # dropping them keeps closed blocks elsewhere from making I - P_k singular.
    rest = _reachable(P, idx, rest)
    if rest.size == 0:
        return P_AA.copy()
    P_BB = P[np.ix_(rest, rest)]
    # I - P_BB with the diagonal taken from the off-diagonal row mass, which
    # avoids cancellation in 1 - P_ii when the chain is nearly absorbing.
    M = -P_BB
    off = P[rest].sum(axis=1) - P[rest, rest]
    M[np.diag_indices_from(M)] = off
    try:
        Y = np.linalg.solve(M, P[np.ix_(rest, idx)])
    except np.linalg.LinAlgError as exc:
        raise SingularComplement(f"I - P_k is singular for a cluster of size {idx.size}") from exc
    if not np.all(np.isfinite(Y)):
        raise SingularComplement(f"I - P_k is numerically singular for a cluster of size {idx.size}")
    return P_AA + P[np.ix_(idx, rest)] @ Y


def stochastic_complement(P, clustering) -> StochasticComplement:
    """Stochastic complement of ``P`` with respect to a partition of its states.

    Each block is ``P_kk + P_k* (I - P_k)^{-1} P_*k`` computed with a linear
    solve. Blocks whose second eigenvalue has modulus within 1e-10 of one are
    reported with a :class:`NonPrimitiveBlock` warning.
    """
    P = _dense(P)
    _check_P(P)
    labels = _labels_of(clustering)
    n = P.shape[0]
    if labels.shape[0] != n:
        raise InvalidInput(f"clustering has {labels.shape[0]} points but P has {n} states")
    K = int(labels.max())
    if K < 2:
        raise DegenerateClustering("the stochastic complement needs at least two clusters")
    perm = np.argsort(labels, kind="stable")
    blocks, block_pi = [], []
    for k in range(1, K + 1):
        idx = np.flatnonzero(labels == k)
        rest = np.flatnonzero(labels != k)
        S_kk = _complement_block(P, idx, rest)
        err = np.abs(S_kk.sum(axis=1) - 1).max()
        if not err <= ROW_SUM_TOL:
            raise SingularComplement(f"stochastic complement of cluster {k} has row sums off by {err:.3g}")
        if idx.size == 1:
            S_kk = np.ones((1, 1))
        if idx.size > 1 and _second_modulus(S_kk) > 1 - PRIMITIVE_TOL:
            warnings.warn(f"stochastic complement of cluster {k} is not primitive", NonPrimitiveBlock,
                          stacklevel=2)
        blocks.append(S_kk)
        block_pi.append(_block_stationary(S_kk))
    S = np.zeros((n, n))
    S_inf = np.zeros((n, n))
    start = 0
    for S_kk, w in zip(blocks, block_pi):
        stop = start + S_kk.shape[0]
        S[start:stop, start:stop] = S_kk
        S_inf[start:stop, start:stop] = w[None, :]
        start = stop
    for arr in (S, S_inf, perm, labels):
        arr.setflags(write=False)
    return StochasticComplement(S=S, S_infinity=S_inf, perm=perm, labels=labels,
                                blocks=tuple(blocks), block_pi=tuple(block_pi))


def _second_modulus(S_kk: np.ndarray) -> float:
    vals = np.sort(np.abs(np.linalg.eigvals(S_kk)))[::-1]
    return float(vals[1]) if vals.size > 1 else 0.0


def _is_reversible(S_kk: np.ndarray, w: np.ndarray) -> bool:
    F = w[:, None] * S_kk
    return bool(np.abs(F - F.T).max() <= REVERSIBLE_RTOL * max(F.max(), 1e-300))


def _block_eigen(S_kk: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigenvalues, unit-column diagonalizer ``Z`` and ``Z^{-1}`` of one block."""
    m = S_kk.shape[0]
    if m == 1:
        one = np.ones((1, 1))
        return np.ones(1), one, one
    if np.all(w > 0) and _is_reversible(S_kk, w):
        r = np.sqrt(w)
        A = r[:, None] * S_kk / r[None, :]
        vals, U = np.linalg.eigh((A + A.T) / 2)
        Z = U / r[:, None]
        c = np.linalg.norm(Z, axis=0)
        return vals, Z / c, (c[:, None] * U.T) * r[None, :]
    vals, V = np.linalg.eig(S_kk)
    V = V / np.linalg.norm(V, axis=0)
    if np.linalg.cond(V) > DEFECTIVE_COND:
        return vals, V, np.full_like(V, np.inf)
    return vals, V, np.linalg.inv(V)


@dataclass(frozen=True)
class GeometricConstants:
    lambda_next: float
    delta: float
    kappa: float
    K: int = 0
    n: int | None = None

    def __post_init__(self):
        if not 0 <= self.lambda_next <= 1:
            raise InvalidInput(f"lambda_next must lie in [0, 1], got {self.lambda_next}")
        if not self.delta >= 0:
            raise InvalidInput(f"delta must be nonnegative, got {self.delta}")
        if not self.kappa >= 1:
            raise InvalidInput(f"kappa must be at least 1, got {self.kappa}")


def delta_identity(P, labels) -> float:
    """``2 max_k ||P_k*||_inf``: twice the largest one-step escape probability."""
    P = _dense(P)
    labels = _labels_of(labels)
    same = labels[:, None] == labels[None, :]
    return float(2 * np.where(same, 0.0, P).sum(axis=1).max())


def geometric_constants(P, clustering, sc: StochasticComplement | None = None) -> GeometricConstants:
    P = _dense(P)
    if sc is None:
        sc = stochastic_complement(P, clustering)
    lam = 0.0
    z_norm = zi_norm = 0.0
    defective = False
    for S_kk, w in zip(sc.blocks, sc.block_pi):
        vals, Z, Zi = _block_eigen(S_kk, w)
        if vals.size > 1:
            lam = max(lam, float(np.sort(np.abs(vals))[-2]))
        if not np.all(np.isfinite(Zi)):
            defective = True
        z_norm = max(z_norm, float(np.abs(Z).sum(axis=1).max()))
        zi_norm = max(zi_norm, float(np.abs(Zi).sum(axis=1).max()))
    if defective:
        warnings.warn("stochastic complement is not diagonalizable within tolerance; kappa = inf",
                      DefectiveComplement, stacklevel=2)
        kappa = math.inf
    else:
        # Rounding can leave the product a hair below its lower bound of 1.
        kappa = max(1.0, z_norm * zi_norm)
    S, _ = sc.original_order()
    delta = float(np.abs(P - S).sum(axis=1).max())
    check = delta_identity(P, sc.labels)
    if abs(delta - check) > DELTA_IDENTITY_TOL:
        raise BoundViolation(f"||P - S||_inf = {delta!r} but 2 max ||P_k*||_inf = {check!r}")
    return GeometricConstants(lambda_next=min(lam, 1.0), delta=delta, kappa=kappa,
                              K=sc.K, n=sc.n)


@dataclass(frozen=True)
class EpsilonInterval:
    epsilon: float
    lower: float
    upper: float

    @property
    def empty(self) -> bool:
        return self.lower > self.upper

    @property
    def log_length(self) -> float:
        """``log(upper - lower)``; ``-inf`` for a single point, ``nan`` when empty."""
        if self.empty:
            return math.nan
        width = self.upper - self.lower
        if math.isinf(width):
            return math.inf
        return math.log(width) if width > 0 else -math.inf


def _check_epsilon(epsilon: float, n: int | None) -> float:
    eps = float(epsilon)
    if not eps > 0:
        raise InvalidInput(f"epsilon must be positive, got {epsilon}")
    if n is not None and not eps < 1 / math.sqrt(n):
        raise InvalidInput(f"epsilon must be below 1/sqrt(n) = {1 / math.sqrt(n):.6g}, got {epsilon}")
    return eps


def epsilon_interval(consts: GeometricConstants, epsilon: float) -> EpsilonInterval:
    """``[log(2 kappa / eps) / log(1 / |lambda|), eps / (2 delta)]``."""
    eps = _check_epsilon(epsilon, consts.n)
    lam, kappa = consts.lambda_next, consts.kappa
    if math.isinf(kappa) or lam >= 1:
        lower = math.inf
    elif lam == 0:
        lower = 0.0
    else:
        lower = max(0.0, math.log(2 * kappa / eps) / math.log(1 / lam))
    upper = math.inf if consts.delta == 0 else eps / (2 * consts.delta)
    return EpsilonInterval(epsilon=eps, lower=lower, upper=upper)


def default_epsilons(n: int, count: int = DEFAULT_N_EPSILONS) -> np.ndarray:
    """Log-spaced grid from 1e-8 up to (excluding) ``1/sqrt(n)``."""
    hi = 1 / math.sqrt(n)
    return np.logspace(math.log10(EPSILON_FLOOR), math.log10(hi), count, endpoint=False)


def interval_curve(consts: GeometricConstants, epsilons) -> list[EpsilonInterval]:
    return [epsilon_interval(consts, e) for e in np.asarray(epsilons, dtype=float)]


def intervals_overlap(a: EpsilonInterval, b: EpsilonInterval) -> bool:
    if a.empty or b.empty:
        return False
    return max(a.lower, b.lower) <= min(a.upper, b.upper)


class Stability(enum.Enum):
    MORE_STABLE = "more_stable"
    LESS_STABLE = "less_stable"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def stability_compare(a: GeometricConstants, b: GeometricConstants, epsilon: float) -> Stability:
    """Compare the log-lengths of the two epsilon-intervals."""
    ia, ib = epsilon_interval(a, epsilon), epsilon_interval(b, epsilon)
    if ia.empty or ib.empty:
        return Stability.INCOMPARABLE
    la, lb = ia.log_length, ib.log_length
    if la == lb:
        return Stability.EQUAL
    return Stability.MORE_STABLE if la > lb else Stability.LESS_STABLE


def is_more_stable(a: GeometricConstants, b: GeometricConstants, epsilon: float) -> bool:
    return stability_compare(a, b, epsilon) in (Stability.MORE_STABLE, Stability.EQUAL)


def _is_integer_time(t: float) -> bool:
    return float(t).is_integer()


def transition_power(model_or_P, t: float, pi: np.ndarray | None = None) -> np.ndarray:
    """Dense ``P^t``.

    Integer ``t`` uses repeated squaring. Other ``t`` use the full spectrum of
    the reversible chain with ``|lambda|^t``, matching the diffusion map.
    """
    if t < 0:
        raise InvalidInput(f"time must be nonnegative, got {t}")
    if isinstance(model_or_P, MarkovModel):
        pi = model_or_P.pi
    P = _dense(model_or_P)
    if _is_integer_time(t):
        return np.linalg.matrix_power(P, int(t))
    if pi is None:
        raise InvalidInput("real-valued times need the stationary distribution")
    r = np.sqrt(pi)
    A = r[:, None] * P / r[None, :]
    vals, U = np.linalg.eigh((A + A.T) / 2)
    lam = np.power(np.abs(vals), float(t))
    return ((U * lam) @ U.T) / r[:, None] * r[None, :]


def _row_c(U: np.ndarray) -> np.ndarray:
    n = U.shape[1]
    l2 = np.linalg.norm(U, axis=1)
    l1 = np.abs(U).sum(axis=1)
    c = np.ones(U.shape[0])
    nz = l1 > 0
    c[nz] = math.sqrt(n) * l2[nz] / l1[nz]
    return np.clip(c, 1.0, math.sqrt(n))


def gamma_from_power(Pt: np.ndarray, S_inf: np.ndarray) -> float:
    """Largest ``c_u = sqrt(n) ||u||_2 / ||u||_1`` over rows ``u`` of ``P^t - S_inf``.

    Rows that vanish contribute 1.
    """
    return float(_row_c(Pt - S_inf).max())


def gamma(P, S_infinity: np.ndarray, t: float, pi: np.ndarray | None = None) -> float:
    """``gamma(t)`` for ``S_infinity`` indexed like the states of ``P``."""
    return gamma_from_power(transition_power(P, t, pi), S_infinity)


def distances_from_power(Pt: np.ndarray, pi: np.ndarray) -> np.ndarray:
    """Pairwise ``||P^t(x, .) - P^t(y, .)||_{l2(1/pi)}`` from the rows of ``P^t``."""
    R = Pt / np.sqrt(pi)[None, :]
    return cdist(R, R)


@dataclass(frozen=True)
class SeparationProfile:
    t: float
    d_in: float
    d_btw: float
    n: int

    @property
    def ratio(self) -> float:
        if self.d_btw == 0:
            return 0.0 if self.d_in == 0 else math.inf
        return self.d_in / self.d_btw

    def epsilon_separable(self, epsilon: float) -> bool:
        eps = _check_epsilon(epsilon, self.n)
        return self.ratio <= eps / (1 / math.sqrt(self.n) - eps)


def _within_between(coords: np.ndarray, labels: np.ndarray) -> tuple[float, float]:
    n = coords.shape[0]
    d_in, d_btw = 0.0, math.inf
    for s in range(0, n, _CHUNK_ROWS):
        D = cdist(coords[s:s + _CHUNK_ROWS], coords)
        same = labels[s:s + _CHUNK_ROWS, None] == labels[None, :]
        if same.any():
            d_in = max(d_in, float(D[same].max()))
        if (~same).any():
            d_btw = min(d_btw, float(D[~same].min()))
    return d_in, d_btw


def separation_profile(model: MarkovModel, clustering, t: float) -> SeparationProfile:
    """Largest within-cluster and smallest between-cluster diffusion distance at ``t``.

    Distances come from the model's (possibly truncated) spectrum.
    """
    labels = _labels_of(clustering)
    if labels.shape[0] != model.n:
        raise InvalidInput("clustering and model cover different numbers of points")
    if labels.max() < 2:
        raise DegenerateClustering("between-cluster distance is undefined for a single cluster")
    coords = diffusion_map(model, t).coords[:, 1:]
    d_in, d_btw = _within_between(coords, labels)
    return SeparationProfile(t=float(t), d_in=d_in, d_btw=d_btw, n=model.n)


@dataclass(frozen=True)
class MeyerRecord:
    t: float
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + BOUND_SLACK * max(1.0, self.rhs)


def meyer_rhs(consts: GeometricConstants, t: float) -> float:
    if math.isinf(consts.kappa):
        return math.inf
    return consts.delta * t + consts.kappa * consts.lambda_next ** t


def verify_meyer(model, clustering, times, sc: StochasticComplement | None = None,
                 consts: GeometricConstants | None = None, strict: bool = True) -> list[MeyerRecord]:
    """Evaluate ``||P^t - S_inf||_inf <= delta t + kappa |lambda_{K+1}|^t`` at each time.

    Raises :class:`BoundViolation` on failure when ``strict``.
    """
    P = _dense(model)
    pi = model.pi if isinstance(model, MarkovModel) else None
    if sc is None:
        sc = stochastic_complement(P, clustering)
    if consts is None:
        consts = geometric_constants(P, clustering, sc)
    _, S_inf = sc.original_order()
    out = []
    for t in times:
        Pt = transition_power(P, float(t), pi)
        rec = MeyerRecord(t=float(t), lhs=float(np.abs(Pt - S_inf).sum(axis=1).max()),
                          rhs=meyer_rhs(consts, float(t)))
        if strict and not rec.holds:
            raise BoundViolation(f"Meyer bound fails at t={t}: {rec.lhs!r} > {rec.rhs!r}")
        out.append(rec)
    return out


@dataclass(frozen=True)
class DiffusionBounds:
    t: float
    gamma: float
    in_upper: float
    btw_lower: float
    s_inf_min_norm: float
    measured_in: float
    measured_btw: float
    in_upper_weighted: float = math.inf
    btw_lower_weighted: float = -math.inf

    @property
    def in_holds(self) -> bool:
        return self.measured_in <= self.in_upper + BOUND_SLACK * max(1.0, self.in_upper)

    @property
    def btw_holds(self) -> bool:
        if self.btw_lower <= 0:
            return True
        return self.measured_btw >= self.btw_lower - BOUND_SLACK * max(1.0, self.btw_lower)

    @property
    def weighted_holds(self) -> bool:
        slack_in = BOUND_SLACK * max(1.0, self.in_upper_weighted)
        slack_btw = BOUND_SLACK * max(1.0, abs(self.btw_lower_weighted))
        return (self.measured_in <= self.in_upper_weighted + slack_in
                and self.measured_btw >= self.btw_lower_weighted - slack_btw)


def s_inf_min_norm(S_inf: np.ndarray, pi: np.ndarray) -> float:
    """``min_w ||s_inf(w, .)||_{l2(1/pi)}``."""
    return float(np.sqrt((S_inf ** 2 / pi[None, :]).sum(axis=1)).min())


def diffusion_bounds(model: MarkovModel, clustering, t: float, sc: StochasticComplement | None = None,
                     consts: GeometricConstants | None = None) -> DiffusionBounds:
    """Within/between diffusion-distance bounds at time ``t`` next to measured values.

    ``in_upper = 2 gamma(t) / sqrt(n) * (delta t + kappa |lambda|^t)`` and
    ``btw_lower = min_w ||s_inf(w, .)||_{l2(1/pi)} - in_upper``. Measured
    distances are the exact ``l2(1/pi)`` row distances of ``P^t``.

    These bounds control the rows of ``P^t - S_inf`` in the plain l2 norm
    while the distances carry the ``1/pi`` weight, so they can fail. The
    ``*_weighted`` pair rescales the error term by ``1/sqrt(pi_min)`` and uses
    ``sqrt(2)`` for the disjoint rows of ``S_inf``; it holds for every chain.
    """
    labels = _labels_of(clustering)
    if labels.max() < 2:
        raise DegenerateClustering("between-cluster distance is undefined for a single cluster")
    P = model.dense_P()
    if sc is None:
        sc = stochastic_complement(P, labels)
    if consts is None:
        consts = geometric_constants(P, labels, sc)
    _, S_inf = sc.original_order()
    return _bounds_from_power(transition_power(model, t), model.pi, labels, S_inf, consts, float(t))


def _bounds_from_power(Pt, pi, labels, S_inf, consts, t) -> DiffusionBounds:
    n = pi.shape[0]
    g = gamma_from_power(Pt, S_inf)
    in_upper = 2 * g / math.sqrt(n) * meyer_rhs(consts, t)
    s_min = s_inf_min_norm(S_inf, pi)
    d_in, d_btw = _within_between(Pt / np.sqrt(pi)[None, :], labels)
    in_weighted = in_upper / math.sqrt(pi.min())
    return DiffusionBounds(t=t, gamma=g, in_upper=in_upper, btw_lower=s_min - in_upper,
                           s_inf_min_norm=s_min, measured_in=d_in, measured_btw=d_btw,
                           in_upper_weighted=in_weighted,
                           btw_lower_weighted=math.sqrt(2) * s_min - in_weighted)


def relative_pointwise_distance(model: MarkovModel, t: float, check: bool = True) -> float:
    """``Delta(t) = max_{i,j} |P^t_ij - pi_j| / pi_j``.

    With ``check``, asserts ``Delta(t) <= |lambda_2|^t / pi_min``.
    """
    Pt = transition_power(model, t)
    pi = model.pi
    value = float((np.abs(Pt - pi[None, :]) / pi[None, :]).max())
    if check:
        bound = relative_distance_bound(model, t)
        if value > bound + BOUND_SLACK * max(1.0, bound):
            raise BoundViolation(f"Delta({t}) = {value!r} exceeds |lambda_2|^t / pi_min = {bound!r}")
    return value


def relative_distance_bound(model: MarkovModel, t: float) -> float:
    return model.lambda2 ** float(t) / model.pi_min


def max_pairwise_distance(model: MarkovModel, t: float) -> float:
    coords = diffusion_map(model, t).coords[:, 1:]
    n = coords.shape[0]
    best = 0.0
    for s in range(0, n, _CHUNK_ROWS):
        best = max(best, float(cdist(coords[s:s + _CHUNK_ROWS], coords).max()))
    return best


@dataclass(frozen=True, eq=False)
class ClusteringAnalysis:
    labels: np.ndarray
    constants: GeometricConstants
    intervals: list[EpsilonInterval]
    meyer: list[MeyerRecord]
    bounds: list[DiffusionBounds]

    @property
    def K(self) -> int:
        return self.constants.K


@dataclass(frozen=True, eq=False)
class MeldReport:
    n: int
    epsilons: np.ndarray
    times: np.ndarray
    analyses: list[ClusteringAnalysis]
    overlaps: dict[tuple[int, int], list[float]]


def meld_report(model: MarkovModel, clusterings, epsilons=None, times=None) -> MeldReport:
    """Constants, interval curves and bound checks for several clusterings.

    ``P^t`` is formed once per time and shared by all clusterings. Overlaps
    map each pair of clusterings to the epsilons at which both intervals are
    nonempty and intersect.
    """
    n = model.n
    eps = default_epsilons(n) if epsilons is None else np.asarray(epsilons, dtype=float)
    times = np.array([0.0] + [2.0 ** j for j in range(11)]) if times is None else np.asarray(times, dtype=float)
    if (times < 0).any():
        raise InvalidInput("times must be nonnegative")
    P = model.dense_P()
    prepared = []
    for c in clusterings:
        labels = _labels_of(c)
        if labels.shape[0] != n:
            raise InvalidInput(f"clustering has {labels.shape[0]} labels for {n} points")
        sc = stochastic_complement(P, labels)
        consts = geometric_constants(P, labels, sc)
        prepared.append((labels, sc.original_order()[1], consts))
    meyer = [[] for _ in prepared]
    bounds = [[] for _ in prepared]
    for t in times:
        Pt = transition_power(model, float(t))
        for i, (labels, S_inf, consts) in enumerate(prepared):
            lhs = float(np.abs(Pt - S_inf).sum(axis=1).max())
            meyer[i].append(MeyerRecord(t=float(t), lhs=lhs, rhs=meyer_rhs(consts, float(t))))
            bounds[i].append(_bounds_from_power(Pt, model.pi, labels, S_inf, consts, float(t)))
    analyses = [ClusteringAnalysis(labels=labels, constants=consts, intervals=interval_curve(consts, eps),
                                   meyer=meyer[i], bounds=bounds[i])
                for i, (labels, _, consts) in enumerate(prepared)]
    overlaps = {}
    for a in range(len(analyses)):
        for b in range(a + 1, len(analyses)):
            overlaps[(a, b)] = [float(e) for e, ia, ib in
                                zip(eps, analyses[a].intervals, analyses[b].intervals)
                                if intervals_overlap(ia, ib)]
    return MeldReport(n=n, epsilons=eps, times=times, analyses=analyses, overlaps=overlaps)
