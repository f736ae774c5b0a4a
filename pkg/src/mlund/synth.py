"""Seeded generators for the synthetic benchmark shapes.

Constants live in :mod:`mlund.shapes`. Every generator returns a
:class:`~mlund.markov.PointCloud` with 1-indexed truth labels and exactly ``n``
rows, in a deterministic order for a given ``(n, seed)``.
"""

from __future__ import annotations

import numpy as np

from . import shapes
from .errors import InvalidInput
from .markov import PointCloud


def split_counts(n: int, weights) -> np.ndarray:
    """Largest-remainder split of ``n`` into parts proportional to ``weights``."""
    w = np.asarray(weights, dtype=float)
    raw = n * w / w.sum()
    counts = np.floor(raw).astype(np.int64)
    short = n - counts.sum()
    counts[np.argsort(-(raw - counts), kind="stable")[:short]] += 1
    return counts


def _check_n(n: int, minimum: int) -> None:
    if n < minimum:
        raise InvalidInput(f"n must be at least {minimum}, got {n}")


def gen_gaussians4(n: int = shapes.GAUSSIANS_N, seed: int = 0) -> PointCloud:
    _check_n(n, 4)
    rng = np.random.default_rng(seed)
    counts = split_counts(n, [1, 1, 1, 1])
    pts, labels = [], []
    for k, (c, s, m) in enumerate(zip(shapes.GAUSSIANS_CENTERS, shapes.GAUSSIANS_STDS, counts)):
        pts.append(np.asarray(c) + s * rng.standard_normal((m, 3)))
        labels.append(np.full(m, k + 1))
    return PointCloud(np.vstack(pts), np.concatenate(labels))


def gen_rings3(n: int = shapes.RINGS_N, seed: int = 0) -> PointCloud:
    _check_n(n, 3)
    rng = np.random.default_rng(seed)
    annuli = shapes.RINGS_ANNULI
    areas = [b * b - a * a for a, b in annuli]
    counts = split_counts(n, areas)
    pts, labels = [], []
    for k, ((a, b), m) in enumerate(zip(annuli, counts)):
        # Uniform on the annulus: radius by inverse CDF of r^2.
        r = np.sqrt(rng.uniform(a * a, b * b, m))
        theta = rng.uniform(0.0, 2 * np.pi, m)
        pts.append(np.column_stack([r * np.cos(theta), r * np.sin(theta)]))
        labels.append(np.full(m, k + 1))
    return PointCloud(np.vstack(pts), np.concatenate(labels))


def gen_bottlenecks(n: int = shapes.BOTTLENECK_N, seed: int = 0) -> PointCloud:
    """Two dumbbells and an extra blob.

    Truth labels: 1-5 for the blobs (left dumbbell 1-2, right dumbbell 3-4,
    extra blob 5) and 6-7 for the bridges of the left and right dumbbells.
    """
    _check_n(n, 7)
    rng = np.random.default_rng(seed)
    blobs, bridges = shapes.BOTTLENECK_BLOBS, shapes.BOTTLENECK_BRIDGES
    counts = split_counts(n, [b[3] for b in blobs] + [b[4] for b in bridges])
    pts, labels = [], []
    for k, ((cx, cy, s, _), m) in enumerate(zip(blobs, counts)):
        pts.append(np.array([cx, cy]) + s * rng.standard_normal((m, 2)))
        labels.append(np.full(m, k + 1))
    for k, ((x, y0, y1, hw, _), m) in enumerate(zip(bridges, counts[len(blobs):])):
        pts.append(np.column_stack([rng.uniform(x - hw, x + hw, m), rng.uniform(y0, y1, m)]))
        labels.append(np.full(m, len(blobs) + k + 1))
    return PointCloud(np.vstack(pts), np.concatenate(labels))


def bottleneck_groupings(truth: np.ndarray) -> dict[int, np.ndarray]:
    """Coarsenings of the bottleneck truth labels into 5, 3 and 2 groups."""
    truth = np.asarray(truth)
    five = np.array([0, 1, 2, 3, 4, 5, 1, 3])[truth]
    three = np.array([0, 1, 1, 2, 2, 3, 1, 2])[truth]
    two = np.array([0, 1, 1, 2, 2, 2, 1, 2])[truth]
    return {5: five, 3: three, 2: two}


def trapezoid_centers(deltas, half_width: float) -> np.ndarray:
    d1, d2, d3 = deltas
    h = half_width
    x_top = d1 / 2 + h
    x_bot = d2 / 2 + h
    dx = max(0.0, (x_bot - x_top) - 2 * h)
    dy = np.sqrt(d3 ** 2 - dx ** 2) + 2 * h
    return np.array([[-x_top, 0.0], [x_top, 0.0], [-x_bot, -dy], [x_bot, -dy]])


def gen_trapezoid(n: int = shapes.TRAPEZOID_N, deltas=shapes.TRAPEZOID_DELTAS, seed: int = 0,
                  half_width: float = shapes.TRAPEZOID_BLOB_HALF_WIDTH) -> PointCloud:
    """Four equal square blobs on the corners of a trapezoid.

    Blobs 1 and 2 form the short side (gap ``delta1``), blobs 3 and 4 the long
    side (gap ``delta2``), and ``delta3`` separates 1 from 3 and 2 from 4.
    """
    _check_n(n, 4)
    d = tuple(float(x) for x in deltas)
    if len(d) != 3 or not 0 < d[0] < d[1] < d[2]:
        raise InvalidInput(f"deltas must satisfy 0 < delta1 < delta2 < delta3, got {deltas}")
    if n % 4:
        raise InvalidInput(f"trapezoid blobs have equal size; n must be divisible by 4, got {n}")
    rng = np.random.default_rng(seed)
    centers = trapezoid_centers(d, half_width)
    m = n // 4
    pts = np.vstack([c + rng.uniform(-half_width, half_width, (m, 2)) for c in centers])
    return PointCloud(pts, np.repeat(np.arange(1, 5), m))
