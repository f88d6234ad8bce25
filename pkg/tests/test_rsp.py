import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crsp.errors import ConvergenceError, NumericError, ValidationError
from crsp.graph import RspInputs, rsp_inputs, transition_matrix
from crsp.rsp import (
    RspParams,
    absorbing_cost_oracle,
    check_convergence,
    commute_time_distance,
    commute_time_oracle,
    gibbs_weights,
    rsp_dissimilarity,
    shortest_path_oracle,
    spectral_radius_bound,
)
from oracles import complete_graph, path_graph, random_connected_graph, random_weighted_graph


@pytest.mark.parametrize("beta", [0.02, 1.0, 20.0])
def test_two_node_path(beta):
    d = rsp_dissimilarity(rsp_inputs(path_graph(2)), RspParams(beta))
    assert abs(d[0, 1] - 1.0) <= 1e-12
    assert d[0, 0] == d[1, 1] == 0.0


def test_triangle_high_beta_is_all_ones():
    d = rsp_dissimilarity(rsp_inputs(complete_graph(3)), RspParams(20.0))
    np.testing.assert_allclose(d[~np.eye(3, dtype=bool)], 1.0, atol=1e-6)


def test_gibbs_weights_on_support_only():
    inputs = rsp_inputs(path_graph(3))
    w = gibbs_weights(inputs.p_ref, inputs.cost, 0.5)
    assert w[0, 2] == 0.0
    assert w[0, 1] == pytest.approx(np.exp(-0.5), rel=1e-15)
    assert w[1, 0] == pytest.approx(0.5 * np.exp(-0.5), rel=1e-15)


# --- spectral radius ----------------------------------------------------------


def test_radius_of_half_identity():
    assert spectral_radius_bound(0.5 * np.eye(4)) == pytest.approx(0.5, abs=1e-10)


def test_radius_of_zero_and_empty():
    assert spectral_radius_bound(np.zeros((3, 3))) == pytest.approx(0.0, abs=1e-10)
    assert spectral_radius_bound(np.zeros((0, 0))) == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_radius_matches_eigvals(seed):
    rng = np.random.default_rng(seed)
    w = rng.random((6, 6)) * (rng.random((6, 6)) < 0.6)
    rho = np.abs(np.linalg.eigvals(w)).max()
    assert abs(spectral_radius_bound(w) - rho) <= 1e-9


def test_radius_bipartite_cycle():
    # eigenvalues +-rho on an even cycle; a zero shift would oscillate forever
    w = 0.4 * (np.roll(np.eye(6), 1, 1) + np.roll(np.eye(6), -1, 1))
    assert spectral_radius_bound(w) == pytest.approx(0.8, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 15), st.integers(0, 2**31 - 1), st.floats(0.01, 5.0))
def test_radius_below_row_sum_bound(n, seed, beta):
    rng = np.random.default_rng(seed)
    inputs = rsp_inputs(random_weighted_graph(rng, n))
    w = gibbs_weights(inputs.p_ref, inputs.cost, beta)
    assert spectral_radius_bound(w) <= w.sum(axis=1).max() + 1e-10


def test_radius_rejects_bad_input():
    with pytest.raises(ValidationError):
        spectral_radius_bound(-np.eye(2))
    with pytest.raises(ValidationError):
        spectral_radius_bound(np.ones((2, 3)))


def test_guard_fires_on_stochastic_w():
    with pytest.raises(ConvergenceError, match="will not converge"):
        check_convergence(transition_matrix(complete_graph(4)))


def test_guard_quiet_on_substochastic_w():
    check_convergence(0.9 * transition_matrix(complete_graph(4)))


def test_zero_cost_edges_trip_the_guard():
    p = transition_matrix(complete_graph(3))
    inputs = RspInputs.__new__(RspInputs)
    object.__setattr__(inputs, "p_ref", p)
    object.__setattr__(inputs, "cost", np.zeros((3, 3)))
    with pytest.raises(ConvergenceError):
        rsp_dissimilarity(inputs)


def test_huge_beta_is_numeric_error():
    inputs = rsp_inputs(path_graph(8))
    with pytest.raises(NumericError):
        rsp_dissimilarity(inputs, RspParams(1e6))


def test_params_validation():
    for bad in (0.0, -1.0, np.inf, np.nan):
        with pytest.raises(ValidationError):
            RspParams(bad)
    with pytest.raises(ValidationError):
        RspParams(1.0, radius_tolerance=0.5)


# --- oracles --------------------------------------------------------------------


def test_dijkstra_weighted_triangle():
    a = np.array([[0, 1, 0.25], [1, 0, 1], [0.25, 1, 0]], dtype=float)  # cost 1, 1, 4
    d = shortest_path_oracle(rsp_inputs(a))
    assert d[0, 2] == 2.0
    assert d[0, 1] == 1.0


def test_commute_oracle_three_path():
    np.testing.assert_allclose(
        commute_time_oracle(path_graph(3)), [[0, 2, 4], [2, 0, 2], [4, 2, 0]], atol=1e-12
    )


@pytest.mark.parametrize("seed", range(5))
def test_commute_pinv_is_round_trip(seed):
    a = random_connected_graph(np.random.default_rng(seed), 12)
    np.testing.assert_allclose(commute_time_distance(a), 2 * commute_time_oracle(a), atol=1e-8)


# --- limits and structure ---------------------------------------------------------


@pytest.mark.parametrize("seed", range(10))
def test_high_beta_matches_dijkstra(seed):
    rng = np.random.default_rng(seed)
    inputs = rsp_inputs(random_connected_graph(rng, int(rng.integers(3, 25))))
    d = rsp_dissimilarity(inputs, RspParams(20.0))
    assert np.abs(d - shortest_path_oracle(inputs)).max() <= 1e-6


@pytest.mark.parametrize("seed", range(10))
def test_low_beta_matches_absorbing_walk(seed):
    rng = np.random.default_rng(100 + seed)
    inputs = rsp_inputs(random_weighted_graph(rng, int(rng.integers(3, 25))))
    d = rsp_dissimilarity(inputs, RspParams(1e-6))
    ref = absorbing_cost_oracle(inputs)
    off = ~np.eye(len(d), dtype=bool)
    assert np.max(np.abs(d - ref)[off] / ref[off]) <= 1e-3


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 20), st.integers(0, 2**31 - 1), st.floats(0.005, 10.0))
def test_dissimilarity_invariants(n, seed, beta):
    rng = np.random.default_rng(seed)
    inputs = rsp_inputs(random_weighted_graph(rng, n))
    d = rsp_dissimilarity(inputs, RspParams(beta))
    np.testing.assert_array_equal(d, d.T)
    np.testing.assert_array_equal(np.diag(d), 0.0)
    sp = shortest_path_oracle(inputs)
    sym_sp = 0.5 * (sp + sp.T)
    assert np.all(d >= sym_sp - 1e-9 * np.maximum(1.0, sym_sp))


def test_monotone_in_beta_towards_shortest_path():
    inputs = rsp_inputs(random_connected_graph(np.random.default_rng(7), 15))
    sp = shortest_path_oracle(inputs)
    gaps = [np.abs(rsp_dissimilarity(inputs, RspParams(b)) - sp).sum() for b in (0.01, 0.1, 1, 10)]
    assert all(x > y for x, y in zip(gaps, gaps[1:]))


def test_deterministic():
    inputs = rsp_inputs(random_weighted_graph(np.random.default_rng(2), 20))
    a = rsp_dissimilarity(inputs)
    b = rsp_dissimilarity(inputs)
    assert a.tobytes() == b.tobytes()


def test_relabel_equivariance():
    rng = np.random.default_rng(4)
    a = random_weighted_graph(rng, 14)
    perm = rng.permutation(14)
    d = rsp_dissimilarity(rsp_inputs(a), RspParams(0.3))
    dp = rsp_dissimilarity(rsp_inputs(a[np.ix_(perm, perm)]), RspParams(0.3))
    np.testing.assert_allclose(dp, d[np.ix_(perm, perm)], rtol=1e-10, atol=1e-12)
