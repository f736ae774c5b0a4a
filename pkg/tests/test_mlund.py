import math

import numpy as np
import pytest

from helpers import trapezoid_clusterings, two_blobs
from mlund.errors import EmptyJ, InvalidInput, Lambda2Unity
from mlund.lund import Clustering
from mlund.markov import GraphConfig, PointCloud
from mlund.metrics import vi
from mlund.mlund import (SweepConfig, compute_T, fixed_k, mlund, nontrivial, select_optimal,
                         stationarity_time, time_grid, total_vi_table)


def test_compute_T_frozen():
    # log(5e-7)/log(0.5) = 20.93..., log2 of which is 4.39..., so T = 5.
    assert compute_T(0.5, 0.1, SweepConfig()) == 5
    assert stationarity_time(0.5, 0.1, 1e-5) == pytest.approx(20.931568569324174, rel=1e-14)


def test_compute_T_edge_cases():
    assert compute_T(0.0, 0.5, SweepConfig()) == 0
    assert compute_T(1e-9, 0.5, SweepConfig()) == 0
    with pytest.raises(Lambda2Unity):
        compute_T(1.0, 0.1, SweepConfig())


def test_sweep_config_validation():
    with pytest.raises(InvalidInput):
        SweepConfig(beta=1.0)
    with pytest.raises(InvalidInput):
        SweepConfig(tau=0.0)


def test_time_grid():
    assert time_grid(3, 2.0).tolist() == [0.0, 1.0, 2.0, 4.0, 8.0]


def test_nontrivial():
    assert not nontrivial(1, 10)
    assert nontrivial(2, 10)
    assert nontrivial(4, 10)
    assert not nontrivial(5, 10)


def test_total_vi_matches_brute_force():
    rng = np.random.default_rng(0)
    base = [rng.integers(1, 4, 30) for _ in range(3)]
    clusterings = {float(t): Clustering.from_labels(base[t % 3]) for t in range(7)}
    table = total_vi_table(clusterings)
    for t, c in clusterings.items():
        brute = sum(vi(c, other) for other in clusterings.values())
        assert table[t] == pytest.approx(brute, abs=1e-12)


def test_trapezoid_totals():
    c1, c2, c3 = trapezoid_clusterings()
    m1, m2, m3 = 2, 3, 4
    seq = [c1] * m1 + [c2] * m2 + [c3] * m3
    table = total_vi_table({float(i): Clustering.from_labels(c) for i, c in enumerate(seq)})
    h = 0.5 * math.log(2)
    assert table[0.0] == pytest.approx(h * (m2 + 2 * m3), abs=1e-12)
    assert table[float(m1)] == pytest.approx(h * (m1 + m3), abs=1e-12)
    assert table[float(m1 + m2)] == pytest.approx(h * (2 * m1 + m2), abs=1e-12)


def test_select_optimal_prefers_later_time_on_ties():
    assert select_optimal({1.0: 2.0, 4.0: 2.0, 8.0: 3.0}) == 4.0
    assert select_optimal({1.0: 1.0, 2.0: 1.0 + 1e-15}) == 2.0
    assert select_optimal({}) is None


@pytest.fixture(scope="module")
def blob_result():
    X, truth = two_blobs(30, gap=5.0)
    return mlund(PointCloud(X, truth), GraphConfig(1.0, 0.5, 10), m=None), truth


def test_sweep_structure(blob_result):
    res, truth = blob_result
    assert len(res.times) == res.T + 2
    assert res.times[0] == 0.0
    assert all(nontrivial(res.K_t[i], 60) for i in res.J)
    assert res.optimal.K == 2
    assert vi(res.optimal, truth) == 0.0
    assert res.optimal_time == res.times[res.optimal_index]


def test_fixed_k(blob_result):
    res, _ = blob_result
    c, t, fallback = fixed_k(res, 2)
    assert c.K == 2 and not fallback
    c, t, fallback = fixed_k(res, 5)
    assert c.K == 5 and fallback
    assert t in res.times
    with pytest.raises(InvalidInput):
        fixed_k(res, 0)


def test_empty_J_warns():
    X = np.array([[0.0], [0.1], [0.2], [0.3]])
    with pytest.warns(EmptyJ):
        res = mlund(PointCloud(X), GraphConfig(1.0, 1.0, 2), m=None)
    assert res.optimal is None and res.optimal_time is None
