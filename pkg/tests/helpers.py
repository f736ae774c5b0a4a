"""Shared generators for the test suite."""

import numpy as np

from mlund.markov import markov_from_weights


def random_reversible_weights(rng, n):
    A = rng.random((n, n)) ** rng.uniform(1, 8)
    return A + A.T


def random_partition(rng, n, K):
    """Labels in 1..K with every cluster nonempty."""
    labels = np.concatenate([np.arange(1, K + 1), rng.integers(1, K + 1, n - K)])
    rng.shuffle(labels)
    return labels


def fuzz_chains(count=200, seed=0, n_range=(5, 30), K_range=(2, 4)):
    """Random reversible chains with random partitions, full spectrum kept."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        K = int(rng.integers(K_range[0], K_range[1] + 1))
        model = markov_from_weights(random_reversible_weights(rng, n), m=None)
        yield model, random_partition(rng, n, K)


def two_blobs(n_per=20, gap=6.0, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.normal(0.0, 0.3, (n_per, 2))
    b = rng.normal(0.0, 0.3, (n_per, 2)) + [gap, 0.0]
    return np.vstack([a, b]), np.repeat([1, 2], n_per)


def trapezoid_clusterings(n=400):
    """The three nested clusterings of four equal blobs used in the trapezoid analysis."""
    truth = np.repeat(np.arange(1, 5), n // 4)
    c1 = truth
    c2 = np.array([0, 1, 1, 2, 3])[truth]
    c3 = np.array([0, 1, 1, 2, 2])[truth]
    return c1, c2, c3
