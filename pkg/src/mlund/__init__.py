"""Multiscale diffusion clustering."""

from .baselines import hsc, hsc_multiscale, kmeans, slc, slc_cut, slc_select, spectral_cluster
from .errors import MlundError
from .geometry import DensityEstimate, kde, diffusion_distance, rho_t, lund_score
from .lund import Clustering, estimate_K, lund_cluster
from .markov import GraphConfig, MarkovModel, PointCloud, build_markov, stationary_distribution
from .meld import (GeometricConstants, Stability, StochasticComplement, diffusion_bounds, epsilon_interval,
                   gamma, geometric_constants, meld_report, relative_pointwise_distance, separation_profile,
                   stability_compare, stochastic_complement, verify_meyer)
from .metrics import Undefined, entropy, mutual_information, nmi, vi
from .mlund import MlundResult, SweepConfig, compute_T, fixed_k, mlund, total_vi_table

__all__ = [
    "Clustering", "DensityEstimate", "GeometricConstants", "GraphConfig", "MarkovModel", "MlundError",
    "MlundResult", "PointCloud", "Stability", "StochasticComplement", "SweepConfig", "Undefined",
    "build_markov", "compute_T", "diffusion_bounds", "diffusion_distance", "entropy", "epsilon_interval",
    "estimate_K", "fixed_k", "gamma", "geometric_constants", "hsc", "hsc_multiscale", "kde", "kmeans",
    "lund_cluster", "lund_score", "meld_report", "mlund", "mutual_information", "nmi",
    "relative_pointwise_distance", "rho_t", "separation_profile", "slc", "slc_cut", "slc_select",
    "spectral_cluster", "stability_compare", "stationary_distribution", "stochastic_complement",
    "total_vi_table", "verify_meyer", "vi",
]
