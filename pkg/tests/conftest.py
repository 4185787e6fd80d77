"""Shared brute-force oracles used across test modules."""

import itertools

import numpy as np
import pytest

from pglauber.graph import Graph


def brute_independent_sets(g: Graph) -> list[int]:
    """All subsets with no edge inside, by scanning the whole cube."""
    out = []
    for s in range(1 << g.n):
        if all(not (s >> u & 1 and s >> v & 1) for u, v in g.edges):
            out.append(s)
    return out


def forward_transition_row(g, fug, explicit, sigma):
    """One-slot law from ``sigma`` by enumerating every coin outcome of every support set."""
    row = {}
    for m, q in explicit.pairs():
        verts = [v for v in range(g.n) if m >> v & 1]
        for outcome in itertools.product((0, 1), repeat=len(verts)):
            prob = q
            eta = sigma
            for v, add in zip(verts, outcome):
                prob *= fug.p[v] if add else fug.pbar[v]
                blocked = any(sigma >> w & 1 for w in range(g.n) if g.adjacency[v] >> w & 1)
                if add and not blocked:
                    eta |= 1 << v
                else:
                    eta &= ~(1 << v)
            row[eta] = row.get(eta, 0.0) + prob
    return row


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
