import numpy as np
import pytest

from conftest import brute_independent_sets, forward_transition_row
from pglauber.dynamics import (
    ExplicitDistribution,
    Fugacities,
    RandomGreedyDistribution,
    SingleSiteDistribution,
    as_explicit,
    local_minimum_schedule,
    run_chain,
)
from pglauber.errors import CapExceededError, ReducibleChainError, ValidationError
from pglauber.exact import (
    build_matrix,
    check_detailed_balance,
    exact_mixing_time,
    is_aperiodic,
    is_irreducible,
    product_form,
    reachable_configurations,
    stationary_vector,
    support_condition,
    tv_distance,
)
from pglauber.graph import complete_graph, connected_graphs, cycle_graph, empty_graph, generate, path_graph, star_graph


def test_product_form_examples():
    sd = product_form(path_graph(2), Fugacities((1.0, 1.0)))
    assert sd.Z == 3 and sd.pi == pytest.approx([1 / 3] * 3)
    sd = product_form(path_graph(1), Fugacities((3.0,)))
    assert sd.pi == pytest.approx([0.25, 0.75])
    sd = product_form(complete_graph(3), Fugacities((1.0, 2.0, 3.0)))
    assert sd.Z == pytest.approx(7)
    assert sd.pi == pytest.approx([1 / 7, 1 / 7, 2 / 7, 3 / 7])
    assert sd.pi[0] == pytest.approx(1 / sd.Z)


def test_product_form_cap():
    with pytest.raises(CapExceededError):
        product_form(empty_graph(13), Fugacities.uniform(13, 1.0), cap=4096)


def test_build_matrix_examples():
    P = build_matrix(path_graph(1), Fugacities((1.0,)), SingleSiteDistribution.uniform(1)).P
    assert P == pytest.approx(np.full((2, 2), 0.5))
    tm = build_matrix(path_graph(2), Fugacities((1.0, 1.0)), SingleSiteDistribution.uniform(2))
    assert tm.omega == [0, 1, 2]
    assert tm.P[0, 1] == pytest.approx(0.25)
    assert tm.P[1, 2] == 0.0


def test_build_matrix_matches_forward_oracle():
    rng = np.random.default_rng(1)
    for g in list(connected_graphs(5))[::2] + [empty_graph(3)]:
        fug = Fugacities(tuple(rng.uniform(0.1, 2, g.n)))
        for dist in (SingleSiteDistribution.uniform(g.n), RandomGreedyDistribution.uniform(g.n, 0.5)):
            explicit = as_explicit(dist, g)
            tm = build_matrix(g, fug, dist)
            assert tm.omega == brute_independent_sets(g)
            assert np.abs(tm.P.sum(axis=1) - 1).max() <= 1e-12
            assert (tm.P >= 0).all()
            for i, sigma in enumerate(tm.omega):
                row = forward_transition_row(g, fug, explicit, sigma)
                expected = [row.get(eta, 0.0) for eta in tm.omega]
                assert tm.P[i] == pytest.approx(expected, abs=1e-12)


def test_single_site_equals_explicit_singletons():
    g = star_graph(5)
    fug = Fugacities((0.3, 1.1, 0.7, 2.0, 0.5))
    a = build_matrix(g, fug, SingleSiteDistribution.uniform(5)).P
    b = build_matrix(g, fug, ExplicitDistribution(tuple(1 << v for v in range(5)), (0.2,) * 5)).P
    assert np.array_equal(a, b)


def test_detailed_balance_examples():
    g, fug = path_graph(3), Fugacities.uniform(3, 0.5)
    sd = product_form(g, fug)
    tm = build_matrix(g, fug, SingleSiteDistribution.uniform(3))
    rep = check_detailed_balance(tm.P, sd.pi)
    assert rep.max_violation < 1e-12 and rep.holds and rep.irreducible
    bad = tm.P.copy()
    bad[0, 1] += 1e-3
    rep = check_detailed_balance(bad, sd.pi)
    assert rep.max_violation == pytest.approx(1e-3 * sd.pi[0], rel=1e-6)
    assert not rep.holds and rep.pair == (0, 1)


def test_reducible_chain_flagged():
    g, fug = path_graph(3), Fugacities.uniform(3, 1.0)
    dist = ExplicitDistribution((1,), (1.0,))
    assert not support_condition(g, dist)
    tm = build_matrix(g, fug, dist)
    rep = check_detailed_balance(tm.P, product_form(g, fug).pi)
    assert rep.holds and not rep.irreducible
    assert reachable_configurations(g, fug, dist, 0) == [0, 1]
    with pytest.raises(ReducibleChainError):
        exact_mixing_time(tm.P, product_form(g, fug).pi, 0.1)


def test_zero_marginal_means_reducible():
    # each vertex left out of the support freezes its coordinate
    for g in [path_graph(4), cycle_graph(5), star_graph(4)]:
        fug = Fugacities.uniform(g.n, 0.8)
        for skip in range(g.n):
            sets = tuple(1 << v for v in range(g.n) if v != skip)
            dist = ExplicitDistribution(sets, (1 / len(sets),) * len(sets))
            assert not is_irreducible(build_matrix(g, fug, dist).P)
        assert is_irreducible(build_matrix(g, fug, SingleSiteDistribution.uniform(g.n)).P)


def test_stationary_vector_solver():
    g = generate("erdos_renyi", {"n": 7, "p": 0.3}, seed=2)
    fug = Fugacities(tuple(np.linspace(0.1, 2, 7)))
    tm = build_matrix(g, fug, local_minimum_schedule(g))
    assert np.abs(stationary_vector(tm.P) - product_form(g, fug).pi).max() <= 1e-10


def test_tv_examples():
    assert tv_distance([0.3, 0.7], [0.3, 0.7]) == 0
    assert tv_distance([1, 0], [0, 1]) == 1
    assert tv_distance([0.75, 0.25], [0.5, 0.5]) == pytest.approx(0.25)
    with pytest.raises(ValidationError):
        tv_distance([0.5, 0.6], [0.5, 0.5])
    with pytest.raises(ValidationError):
        tv_distance([1.0], [0.5, 0.5])


def test_mixing_examples():
    P = build_matrix(path_graph(1), Fugacities((1.0,)), SingleSiteDistribution.uniform(1)).P
    pi = np.array([0.5, 0.5])
    for eps in (0.49, 0.01, 1e-6):
        assert exact_mixing_time(P, pi, eps).t_mix == 1
    # the start itself is within 0.5 of uniform
    assert exact_mixing_time(P, pi, 0.5).t_mix == 0
    assert exact_mixing_time(P, pi, 1.0).t_mix == 0
    assert exact_mixing_time(P, pi, 2.0).t_mix == 0


def test_mixing_time_against_matrix_powers():
    g, fug = path_graph(2), Fugacities((1.0, 1.0))
    sd = product_form(g, fug)
    tm = build_matrix(g, fug, SingleSiteDistribution.uniform(2))
    rep = exact_mixing_time(tm.P, sd.pi, 0.01, tm.omega)
    t = rep.t_mix
    def worst(k):
        return 0.5 * np.abs(np.linalg.matrix_power(tm.P, k) - sd.pi).sum(axis=1).max()
    assert worst(t) <= 0.01 < worst(t - 1)
    assert rep.tv_curve[-1] == pytest.approx(worst(t), abs=1e-12)
    assert rep.worst_start in tm.omega


def test_tv_curve_monotone_and_rows_stochastic():
    g = cycle_graph(6)
    fug = Fugacities(tuple(np.linspace(0.2, 1.5, 6)))
    tm = build_matrix(g, fug, RandomGreedyDistribution.uniform(6, 0.5))
    sd = product_form(g, fug)
    rep = exact_mixing_time(tm.P, sd.pi, 1e-4, tm.omega)
    diffs = np.diff(rep.tv_curve[1:])
    assert (diffs <= 1e-12).all()
    Pt = np.linalg.matrix_power(tm.P, rep.t_mix)
    assert np.abs(Pt.sum(axis=1) - 1).max() <= 1e-9


def test_periodic_chain_detected():
    P = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert is_irreducible(P) and not is_aperiodic(P)
    with pytest.raises(ReducibleChainError):
        exact_mixing_time(P, np.array([0.5, 0.5]), 0.1)


def test_iteration_cap():
    g, fug = path_graph(2), Fugacities((1.0, 1.0))
    tm = build_matrix(g, fug, SingleSiteDistribution.uniform(2))
    with pytest.raises(CapExceededError):
        exact_mixing_time(tm.P, product_form(g, fug).pi, 1e-12, max_iterations=3)


def test_long_run_empirical_converges():
    g = star_graph(4)
    fug = Fugacities((0.5, 1.0, 1.5, 0.8))
    sd = product_form(g, fug)
    assert len(sd.omega) <= 50
    for dist in (SingleSiteDistribution.uniform(4), RandomGreedyDistribution.uniform(4, 0.7)):
        s = run_chain(g, fug, dist, 10**6, seed=11)
        emp = s.empirical()
        assert tv_distance([emp.get(x, 0.0) for x in sd.omega], sd.pi) <= 0.01
