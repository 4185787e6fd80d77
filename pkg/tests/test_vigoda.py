import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.sparse import lil_matrix
from scipy.sparse.csgraph import shortest_path

from pglauber.dynamics import Fugacities
from pglauber.errors import CapExceededError, ValidationError
from pglauber.graph import cycle_graph, empty_graph, generate, members, path_graph, star_graph
from pglauber.vigoda import (
    VigodaMetric,
    blocked_neighbors,
    edge_length,
    lemma5_check,
    theorem5_a,
    try_add,
    vigoda_distance,
)


def scipy_metric(g, fug):
    """All-pairs shortest paths over the flip graph, with lengths computed from scratch."""
    size = 1 << g.n
    W = lil_matrix((size, size))
    for tau in range(size):
        for u in range(g.n):
            if tau >> u & 1:
                continue
            free = 0.0
            for w in g.neighbors(u):
                blocked = tau >> w & 1 or any(tau >> x & 1 for x in g.neighbors(w))
                if not blocked:
                    free += fug.lam[w]
            W[tau, tau | 1 << u] = W[tau | 1 << u, tau] = 1.0 + free / 2
    return shortest_path(W.tocsr(), directed=False)


def test_blocked_examples():
    p3 = path_graph(3)
    assert blocked_neighbors(p3, 0, 1) == (0, 0b101)
    assert blocked_neighbors(p3, 0b100, 0) == (0b010, 0)
    b, free = blocked_neighbors(star_graph(4), 0b0010, 0)
    assert b >> 1 & 1 and b | free == 0b1110 and b & free == 0


def test_edge_length_examples():
    fug = Fugacities.uniform(3, 0.5)
    assert edge_length(empty_graph(3), fug, 0b100, 0) == 1
    assert edge_length(path_graph(3), fug, 0, 1) == pytest.approx(1.5)
    with pytest.raises(ValidationError):
        edge_length(path_graph(3), fug, 0b010, 1)


def test_edge_length_range_when_a_below_two():
    g = cycle_graph(6)
    fug = Fugacities((0.9, 0.5, 0.99, 0.2, 0.7, 0.3))
    assert theorem5_a(g, fug) < 2
    for tau in range(1 << 6):
        for v in range(6):
            if not tau >> v & 1:
                assert 1 <= edge_length(g, fug, tau, v) < 2


@pytest.mark.parametrize("g", [path_graph(3), star_graph(4), cycle_graph(5), generate("erdos_renyi", {"n": 6, "p": 0.5}, seed=3)])
def test_distance_matches_scipy(g):
    rng = np.random.default_rng(g.n)
    fug = Fugacities(tuple(rng.uniform(0.1, 3, g.n)))
    ref = scipy_metric(g, fug)
    metric = VigodaMetric(g, fug)
    for a, b in itertools.product(range(1 << g.n), repeat=2):
        assert metric.distance(a, b) == pytest.approx(ref[a, b], abs=1e-12)
    assert vigoda_distance(g, fug, 0, 0) == 0


def test_direct_edge_when_a_below_two():
    g = cycle_graph(5)
    fug = Fugacities((0.9, 0.4, 0.6, 0.3, 0.8))
    metric = VigodaMetric(g, fug)
    for tau in range(1 << 5):
        for v in range(5):
            if not tau >> v & 1:
                assert metric.distance(tau, tau | 1 << v) == pytest.approx(edge_length(g, fug, tau, v), abs=1e-12)


def test_metric_cap():
    with pytest.raises(CapExceededError):
        VigodaMetric(path_graph(17), Fugacities.uniform(17, 0.1))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10), st.floats(0.1, 0.7), st.integers(0, 2**31), st.data())
def test_metric_axioms(n, p, seed, data):
    g = generate("erdos_renyi", {"n": n, "p": p}, seed=seed)
    fug = Fugacities(tuple(data.draw(st.lists(st.floats(0.01, 4), min_size=n, max_size=n))))
    metric = VigodaMetric(g, fug)
    conf = st.integers(0, (1 << n) - 1)
    for _ in range(5):
        a, b, c = data.draw(conf), data.draw(conf), data.draw(conf)
        dab, dba = metric.distance(a, b), metric.distance(b, a)
        assert dab >= 0 and (dab == 0) == (a == b)
        assert dab == pytest.approx(dba, abs=1e-12)
        assert metric.distance(a, c) <= dab + metric.distance(b, c) + 1e-9


def test_lemma5_isolated_vertex():
    r = lemma5_check(empty_graph(1), Fugacities((1.0,)), 0, 0)
    assert r.lhs == pytest.approx(-4.0) and r.rhs == pytest.approx(-2.0) and r.holds
    assert r.per_vertex == pytest.approx([-1.0])


def test_lemma5_p3_center_by_hand():
    g = path_graph(3)
    fug = Fugacities.uniform(3, 0.5)
    metric = VigodaMetric(g, fug)
    r = lemma5_check(g, fug, 0, 1, metric)
    lhs = 0.0
    base = metric.distance(0, 0b010)
    for y in range(3):
        lam = fug.lam[y]
        up = metric.distance(try_add(g, 0, y), try_add(g, 0b010, y)) - base
        down = metric.distance(0 & ~(1 << y), 0b010 & ~(1 << y)) - base
        lhs += 2 * (lam * up + down)
    assert r.lhs == pytest.approx(lhs)
    assert r.rhs == pytest.approx(-1.0)
    assert r.holds


def test_lemma5_preconditions():
    g = path_graph(3)
    with pytest.raises(ValidationError):
        lemma5_check(g, Fugacities.uniform(3, 0.5), 0b010, 1)
    with pytest.raises(ValidationError, match="a < 2"):
        lemma5_check(g, Fugacities.uniform(3, 1.0), 0, 0)
    with pytest.raises(CapExceededError):
        lemma5_check(path_graph(13), Fugacities.uniform(13, 0.1), 0, 0)


def test_lemma5_sweep_small():
    rng = np.random.default_rng(8)
    for g in (path_graph(4), star_graph(4), cycle_graph(4)):
        lam = rng.uniform(0.05, 1.5, g.n)
        a = max(sum(lam[w] for w in members(nb)) for nb in g.adjacency)
        if a >= 2:
            lam *= 1.9 / a
        fug = Fugacities(tuple(lam))
        metric = VigodaMetric(g, fug)
        for sigma in range(1 << g.n):
            for v in range(g.n):
                if not sigma >> v & 1:
                    assert lemma5_check(g, fug, sigma, v, metric).holds
