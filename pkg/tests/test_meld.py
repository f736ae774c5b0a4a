import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import fuzz_chains, random_partition, random_reversible_weights, two_blobs
from mlund.errors import BoundViolation, DegenerateClustering, InvalidInput, NonPrimitiveBlock
from mlund.markov import GraphConfig, PointCloud, build_markov, markov_from_weights
from mlund.meld import (GeometricConstants, Stability, default_epsilons, delta_identity, diffusion_bounds,
                        epsilon_interval, gamma, geometric_constants, interval_curve, intervals_overlap,
                        is_more_stable, max_pairwise_distance, meld_report, relative_pointwise_distance,
                        s_inf_min_norm, separation_profile, stability_compare, stochastic_complement,
                        transition_power, verify_meyer)

TOY = np.array([[.45, .45, .05, .05],
                [.45, .45, .05, .05],
                [.05, .05, .45, .45],
                [.05, .05, .45, .45]])
TOY_LABELS = [1, 1, 2, 2]
TWO_STATE = np.array([[.9, .1], [.1, .9]])


def chains():
    return st.tuples(st.integers(4, 20), st.integers(2, 4), st.integers(0, 2**32 - 1)).map(_chain)


def _chain(args):
    n, K, seed = args
    rng = np.random.default_rng(seed)
    model = markov_from_weights(random_reversible_weights(rng, n), m=None)
    return model, random_partition(rng, n, min(K, n))


def paper_gamma_row(u):
    # 1 / (1 - 0.5 * sum (|u_i| / ||u||_2 - 1/sqrt(n))^2), the defining formula.
    n = u.size
    norm = np.linalg.norm(u)
    if norm == 0:
        return 1.0
    return 1.0 / (1 - 0.5 * np.sum((np.abs(u) / norm - 1 / math.sqrt(n)) ** 2))


def test_toy_complement():
    sc = stochastic_complement(TOY, TOY_LABELS)
    S, S_inf = sc.original_order()
    half = np.full((2, 2), 0.5)
    expected = np.block([[half, np.zeros((2, 2))], [np.zeros((2, 2)), half]])
    assert np.allclose(S, expected, atol=1e-15)
    assert np.allclose(S_inf, expected, atol=1e-15)


def test_toy_constants():
    c = geometric_constants(TOY, TOY_LABELS)
    assert c.lambda_next == pytest.approx(0.0, abs=1e-15)
    assert c.delta == pytest.approx(0.2, abs=1e-14)
    assert delta_identity(TOY, TOY_LABELS) == pytest.approx(2 * 0.1, abs=1e-15)
    # Unit-column eigenvectors of [[.5,.5],[.5,.5]] are (1,1)/sqrt2 and (1,-1)/sqrt2:
    # row sums of |Z| and |Z^-1| are both sqrt2.
    assert c.kappa == pytest.approx(2.0, abs=1e-12)
    iv = epsilon_interval(c, 0.1)
    assert (iv.lower, iv.upper) == (0.0, pytest.approx(0.25, abs=1e-13))


def test_toy_meyer_at_one():
    rec = verify_meyer(TOY, TOY_LABELS, [1])[0]
    assert rec.lhs == pytest.approx(0.2, abs=1e-14)
    assert rec.holds


def test_block_diagonal_chain():
    P = np.kron(np.eye(2), np.full((2, 2), 0.5))
    sc = stochastic_complement(P, TOY_LABELS)
    assert np.array_equal(sc.original_order()[0], P)
    c = geometric_constants(P, TOY_LABELS)
    assert c.delta == 0.0
    iv = epsilon_interval(c, 0.1)
    assert iv.lower == 0.0 and iv.upper == math.inf


def test_singletons_give_identity():
    P = markov_from_weights(random_reversible_weights(np.random.default_rng(1), 5), m=None).dense_P()
    sc = stochastic_complement(P, np.arange(5))
    assert np.array_equal(sc.S, np.eye(5))
    assert geometric_constants(P, np.arange(5), sc).kappa == 1.0


def test_single_cluster_rejected():
    with pytest.raises(DegenerateClustering):
        stochastic_complement(TOY, [1, 1, 1, 1])


def test_non_primitive_block_warns():
    # Every excursion from state 0 returns to state 1 and vice versa, so the
    # complement of the first cluster swaps its two states.
    P = np.array([[0, .9, .1, 0], [.9, 0, 0, .1], [0, 1, 0, 0], [1, 0, 0, 0]])
    with pytest.warns(NonPrimitiveBlock):
        sc = stochastic_complement(P, [1, 1, 2, 2])
    assert np.allclose(sc.blocks[0], [[0, 1], [1, 0]])


def test_interval_formula():
    c = GeometricConstants(lambda_next=0.5, delta=0.01, kappa=1.0)
    iv = epsilon_interval(c, 0.1)
    assert iv.lower == pytest.approx(math.log(20) / math.log(2), rel=1e-14)
    assert iv.upper == pytest.approx(5.0, rel=1e-14)
    assert not iv.empty


def test_interval_validation():
    with pytest.raises(InvalidInput):
        GeometricConstants(lambda_next=0.5, delta=0.1, kappa=0.5)
    c = GeometricConstants(lambda_next=0.5, delta=0.1, kappa=1.0, n=100)
    with pytest.raises(InvalidInput):
        epsilon_interval(c, 0.1)
    with pytest.raises(InvalidInput):
        epsilon_interval(c, 0.0)


def test_stability_cases():
    a = GeometricConstants(lambda_next=0.5, delta=0.001, kappa=1.0)
    b = GeometricConstants(lambda_next=0.5, delta=0.01, kappa=1.0)
    assert stability_compare(a, a, 0.1) is Stability.EQUAL
    assert stability_compare(a, b, 0.1) is Stability.MORE_STABLE
    assert stability_compare(b, a, 0.1) is Stability.LESS_STABLE
    empty = GeometricConstants(lambda_next=0.99, delta=0.5, kappa=10.0)
    assert epsilon_interval(empty, 0.1).empty
    assert stability_compare(a, empty, 0.1) is Stability.INCOMPARABLE


def test_two_state_relative_distance():
    model = markov_from_weights(np.array([[.9, .1], [.1, .9]]), m=None)
    assert np.allclose(model.dense_P(), TWO_STATE)
    assert relative_pointwise_distance(model, 1) == pytest.approx(0.8, abs=1e-14)
    assert max_pairwise_distance(model, 1) == pytest.approx(1.6, abs=1e-14)


def test_two_state_gamma():
    P = TWO_STATE
    S_inf = np.full((2, 2), 0.5)
    # Rows of P - S_inf are (0.4, -0.4): uniform magnitude, so gamma is 1.
    assert gamma(P, S_inf, 1) == pytest.approx(1.0, abs=1e-15)
    S_inf = np.eye(2)
    u = P[0] - S_inf[0]
    assert gamma(P, S_inf, 1) == pytest.approx(paper_gamma_row(u), abs=1e-14)


def test_rank_one_chain_is_stationary():
    pi = np.array([0.2, 0.3, 0.5])
    W = np.outer(pi, pi)
    model = markov_from_weights(W, m=None)
    for t in (1, 2, 5):
        assert relative_pointwise_distance(model, t) == pytest.approx(0.0, abs=1e-12)


def test_separation_two_point_masses():
    X = np.vstack([np.zeros((4, 1)), np.full((4, 1), 10.0)]) + np.arange(8)[:, None] * 1e-3
    model = build_markov(PointCloud(X), GraphConfig(3.0, 1.0, 2), m=None)
    prof = separation_profile(model, np.repeat([1, 2], 4), 5)
    assert prof.ratio < 1e-6
    assert prof.epsilon_separable(1 / math.sqrt(8) * 0.99)
    with pytest.raises(DegenerateClustering):
        separation_profile(model, np.ones(8), 5)


def test_real_time_power_matches_integer_power():
    # A Gram kernel has a nonnegative spectrum, where |lambda|^t and lambda^t agree.
    B = np.random.default_rng(4).random((6, 6))
    model = markov_from_weights(B @ B.T, m=None)
    A = transition_power(model, 3)
    # 3.0 goes the integer route; nudge the spectral route with a float time near 3.
    B = transition_power(model, 3 + 1e-13)
    assert np.abs(A - B).max() < 1e-10


def test_meld_report_shapes():
    X, truth = two_blobs(10, gap=3.0)
    model = build_markov(PointCloud(X), GraphConfig(1.5, 1.0, 3), m=None)
    rep = meld_report(model, [truth, np.arange(20) % 4 + 1], times=[0, 1, 4])
    assert len(rep.epsilons) == 200
    assert rep.epsilons.max() < 1 / math.sqrt(20)
    assert [a.K for a in rep.analyses] == [2, 4]
    assert all(r.holds for a in rep.analyses for r in a.meyer)
    assert set(rep.overlaps) == {(0, 1)}


def test_default_epsilons():
    e = default_epsilons(100)
    assert e[0] == pytest.approx(1e-8)
    assert e[-1] < 0.1
    assert np.all(np.diff(e) > 0)


# Properties


@settings(max_examples=60, deadline=None)
@given(chains())
def test_complement_properties(chain):
    model, labels = chain
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonPrimitiveBlock)
        sc = stochastic_complement(model, labels)
    S, S_inf = sc.original_order()
    assert np.abs(S.sum(axis=1) - 1).max() < 1e-9
    same = labels[:, None] == labels[None, :]
    assert np.all(S[~same] == 0)
    assert np.abs(S_inf @ S_inf - S_inf).max() < 1e-8
    # Block stationary vectors equal the renormalized restriction of pi (a second route).
    for k, w in enumerate(sc.block_pi):
        pk = model.pi[sc.labels == k + 1]
        assert np.allclose(w, pk / pk.sum(), atol=1e-9)
    assert s_inf_min_norm(S_inf, model.pi) >= 1 / math.sqrt(model.n)


@settings(max_examples=60, deadline=None)
@given(chains(), st.integers(0, 2**32 - 1))
def test_refinement_never_decreases_delta(chain, seed):
    model, coarse = chain
    rng = np.random.default_rng(seed)
    # Split every coarse cluster at random: a refinement.
    fine = coarse * 2 + rng.integers(0, 2, coarse.size)
    P = model.dense_P()
    assert delta_identity(P, fine) >= delta_identity(P, coarse) - 1e-15


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 0.95), st.floats(0.01, 0.95), st.floats(1e-4, 0.05), st.floats(1e-4, 0.05),
       st.floats(1.0, 50.0), st.floats(1e-3, 0.099))
def test_more_coherent_and_separated_is_more_stable(la, lb, da, db, kappa, eps):
    la, lb = sorted((la, lb))
    da, db = sorted((da, db))
    a = GeometricConstants(lambda_next=la, delta=da, kappa=kappa)
    b = GeometricConstants(lambda_next=lb, delta=db, kappa=kappa)
    if epsilon_interval(b, eps).empty:
        return
    assert not epsilon_interval(a, eps).empty
    assert is_more_stable(a, b, eps)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 0.99), st.floats(0.0, 1.0), st.floats(1.0, 100.0),
       st.lists(st.floats(1e-8, 0.099), min_size=2, max_size=10))
def test_interval_endpoints_monotone_in_epsilon(lam, delta, kappa, eps):
    c = GeometricConstants(lambda_next=lam, delta=delta, kappa=kappa)
    curve = interval_curve(c, sorted(eps))
    for a, b in zip(curve, curve[1:]):
        assert b.lower <= a.lower
        assert b.upper >= a.upper
        assert a.empty == (a.lower > a.upper)


def test_overlap_requires_nonempty_intersection():
    from mlund.meld import EpsilonInterval
    assert intervals_overlap(EpsilonInterval(0.1, 1, 3), EpsilonInterval(0.1, 2, 5))
    assert not intervals_overlap(EpsilonInterval(0.1, 1, 2), EpsilonInterval(0.1, 3, 5))
    assert not intervals_overlap(EpsilonInterval(0.1, 4, 3), EpsilonInterval(0.1, 0, 5))


@settings(max_examples=40, deadline=None)
@given(chains(), st.sampled_from([0, 1, 2, 3, 8, 1.5]))
def test_gamma_range_and_formula(chain, t):
    model, labels = chain
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonPrimitiveBlock)
        sc = stochastic_complement(model, labels)
    _, S_inf = sc.original_order()
    g = gamma(model.dense_P(), S_inf, t, model.pi)
    n = model.n
    assert 1.0 <= g <= math.sqrt(n)
    U = transition_power(model, t) - S_inf
    assert g == pytest.approx(max(paper_gamma_row(u) for u in U), rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(chains())
def test_meyer_and_weighted_bounds_hold(chain):
    model, labels = chain
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        consts = geometric_constants(model.dense_P(), labels)
        verify_meyer(model, labels, [1, 2, 4, 16, 64, 256], consts=consts)
        for t in (1, 2, 4, 16, 64):
            assert diffusion_bounds(model, labels, t, consts=consts).weighted_holds


def test_relative_distance_bound_on_fuzz_set():
    for model, _ in fuzz_chains(count=30, seed=5):
        for t in (1, 2, 8, 32):
            relative_pointwise_distance(model, t)


def test_bound_violation_detected():
    model = markov_from_weights(random_reversible_weights(np.random.default_rng(2), 6), m=None)
    tight = GeometricConstants(lambda_next=0.0, delta=0.0, kappa=1.0)
    with pytest.raises(BoundViolation):
        verify_meyer(model, [1, 1, 1, 2, 2, 2], [1], consts=tight)
    recs = verify_meyer(model, [1, 1, 1, 2, 2, 2], [1], consts=tight, strict=False)
    assert not recs[0].holds
