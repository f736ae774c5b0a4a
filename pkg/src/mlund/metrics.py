"""Information-theoretic comparison of clusterings (natural logarithm)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput


class _Undefined:
    """Marker returned by :func:`nmi` when an entropy vanishes."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Undefined"

    def __bool__(self):
        return False


Undefined = _Undefined()


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    counts: np.ndarray

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)


def _labels(c) -> np.ndarray:
    return np.asarray(getattr(c, "labels", c)).ravel()


def contingency(c, c2) -> ContingencyTable:
    a, b = _labels(c), _labels(c2)
    if a.shape != b.shape:
        raise InvalidInput("clusterings cover different numbers of points")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    ia, ib = ia.ravel(), ib.ravel()
    ka, kb = ia.max() + 1, ib.max() + 1
    counts = np.bincount(ia * kb + ib, minlength=ka * kb).reshape(ka, kb)
    return ContingencyTable(counts)


def _entropy_of_counts(counts: np.ndarray) -> float:
    counts = counts[counts > 0].astype(float)
    q = counts / counts.sum()
    return float(-(q * np.log(q)).sum())


def entropy(c) -> float:
    _, counts = np.unique(_labels(c), return_counts=True)
    return _entropy_of_counts(counts)


def mutual_information(c, c2) -> float:
    table = contingency(c, c2).counts.astype(float)
    n = table.sum()
    a = table.sum(axis=1)
    b = table.sum(axis=0)
    i, j = np.nonzero(table)
    nij = table[i, j]
    mi = float((nij / n * np.log(nij * n / (a[i] * b[j]))).sum())
    return max(mi, 0.0)


def vi(c, c2) -> float:
    """Variation of information ``H(C) + H(C') - 2 I(C, C')``.

    Evaluated as ``-sum n_ij/n [log(n_ij/a_i) + log(n_ij/b_j)]``, which is
    algebraically identical and exactly zero for identical partitions.
    """
    table = contingency(c, c2).counts.astype(float)
    n = table.sum()
    a = table.sum(axis=1)
    b = table.sum(axis=0)
    i, j = np.nonzero(table)
    nij = table[i, j]
    # fsum is correctly rounded, hence independent of term order: VI(a, b) == VI(b, a) exactly.
    value = -math.fsum(nij / n * (np.log(nij / a[i]) + np.log(nij / b[j])))
    return max(value, 0.0)


def nmi(c, c2):
    """Normalized mutual information ``I / sqrt(H H')``.

    Returns :data:`Undefined` when either clustering has zero entropy.
    """
    h1, h2 = entropy(c), entropy(c2)
    if h1 == 0.0 or h2 == 0.0:
        return Undefined
    if vi(c, c2) == 0.0:
        return 1.0
    value = mutual_information(c, c2) / np.sqrt(h1 * h2)
    return float(min(max(value, 0.0), np.nextafter(1.0, 0.0)))
