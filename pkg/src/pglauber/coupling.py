"""Coupled chains under the weighted Hamming metric.

Both copies draw the same update set and read the same per-vertex coin; a
copy in which the vertex is blocked ignores its coin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _bits
from .dynamics import (
    Fugacities,
    UpdateSetDistribution,
    _step_unchecked,
    as_explicit,
    marginals_of,
    require_valid,
    sample_update_sets,
    step,
    step_batch,
)
from .errors import ValidationError
from .graph import Graph, is_independent, members


@dataclass(frozen=True)
class WeightFunction:
    """Positive per-vertex weights for the weighted Hamming distance."""

    f: tuple[float, ...]

    def __post_init__(self):
        f = tuple(float(x) for x in self.f)
        if any(not (math.isfinite(x) and x > 0) for x in f):
            raise ValidationError("weights must be positive and finite")
        object.__setattr__(self, "f", f)

    @classmethod
    def uniform(cls, n: int) -> WeightFunction:
        return cls((1.0,) * n)

    @property
    def m_f(self) -> float:
        return min(self.f)

    @property
    def M_f(self) -> float:
        return max(self.f)

    @property
    def xi(self) -> float:
        return self.M_f / self.m_f

    def array(self) -> np.ndarray:
        return np.array(self.f)


def weighted_hamming(sigma: int, eta: int, f: WeightFunction) -> float:
    """Sum of ``f(v)`` over the vertices where the configurations differ."""
    diff = sigma ^ eta
    if diff >> len(f.f):
        raise ValidationError("configuration wider than the weight vector")
    return math.fsum(f.f[v] for v in members(diff))


@dataclass(frozen=True)
class CoupledPair:
    sigma: int
    eta: int

    @property
    def coalesced(self) -> bool:
        return self.sigma == self.eta


def coupled_step(g: Graph, fug: Fugacities, pair: CoupledPair, m: int, coins) -> CoupledPair:
    """Advance both copies with the same update set and the same coins."""
    return CoupledPair(step(g, fug, pair.sigma, m, coins), step(g, fug, pair.eta, m, coins))


@dataclass
class DriftReport:
    """Expected one-slot change of the distance for an adjacent pair.

    ``exact`` comes from the coupled transition itself; ``case_value`` from
    the per-neighbor blocked/unblocked split; ``rhs`` is the neighbor bound
    that ignores blocking.
    """

    exact: float
    case_value: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.exact


def exact_adjacent_drift(
    g: Graph,
    fug: Fugacities,
    dist: UpdateSetDistribution,
    f: WeightFunction,
    sigma: int,
    v: int,
) -> DriftReport:
    """Exact drift of the pair ``(sigma, sigma + v)`` under the shared-coin coupling.

    Requires ``v`` unoccupied with no occupied neighbor in ``sigma``.
    """
    if not is_independent(g, sigma):
        raise ValidationError("sigma is not feasible")
    if sigma >> v & 1:
        raise ValidationError(f"vertex {v} is already occupied")
    if g.adjacency[v] & sigma:
        raise ValidationError(f"vertex {v} has an occupied neighbor, so sigma + v is infeasible")
    explicit = as_explicit(dist, g)
    eta = sigma | 1 << v
    adj, p, w = g.adjacency, fug.p, f.f
    start = w[v]
    expected = 0.0
    for m, q in explicit.pairs():
        if q <= 0:
            continue
        # Outside m the difference is unchanged; inside m a vertex ends up
        # different iff exactly one copy can add it and the shared coin says add.
        phi = 0.0 if m >> v & 1 else start
        for u in members(m):
            free_s = not adj[u] & sigma
            free_e = not adj[u] & eta
            if free_s != free_e:
                phi += p[u] * w[u]
        expected += q * phi
    exact = expected - start

    qv = marginals_of(explicit, g)
    case = -qv[v] * w[v]
    rhs = -qv[v] * w[v]
    for u in members(adj[v]):
        term = qv[u] * p[u] * w[u]
        rhs += term
        if not adj[u] & sigma:
            case += term
    return DriftReport(exact, case, rhs)


def random_feasible(g: Graph, rng: np.random.Generator, size: int, density: float = 0.5) -> np.ndarray:
    """Random independent sets: visit vertices in random order, keep each unblocked one with prob ``density``."""
    n = g.n
    order = np.argsort(rng.random((size, n)), axis=1)
    keep = rng.random((size, n)) < density
    adj = g.adjacency_array()
    out = np.zeros(size, dtype=np.uint64)
    rows = np.arange(size)
    for k in range(n):
        vtx = order[:, k]
        ok = keep[rows, k] & ((out & adj[vtx]) == 0)
        out[ok] |= np.uint64(1) << vtx[ok].astype(np.uint64)
    return out


@dataclass
class CoalescenceResult:
    """Per-slot statistics for ``slots + 1`` times (slot 0 is the start)."""

    pairs: int
    seed: int
    coalesced_fraction: list[float]
    mean_phi: list[float]
    coalescence_times: np.ndarray

    def rows(self):
        return [(t, c, phi) for t, (c, phi) in enumerate(zip(self.coalesced_fraction, self.mean_phi))]


def coalescence_experiment(
    g: Graph,
    fug: Fugacities,
    dist: UpdateSetDistribution,
    pairs: int,
    slots: int,
    seed: int,
    f: WeightFunction | None = None,
    start: tuple[int, int] | None = None,
) -> CoalescenceResult:
    """Run ``pairs`` coupled copies for ``slots`` slots.

    Starting pairs are drawn independently at random unless ``start`` fixes
    one pair for every replica. ``coalescence_times[i]`` is the first slot at
    which replica ``i`` coalesced, or -1.
    """
    require_valid(dist, g)
    if pairs < 1 or slots < 0:
        raise ValidationError("need pairs >= 1 and slots >= 0")
    f = f or WeightFunction.uniform(g.n)
    rng = np.random.default_rng(seed)
    if start is None:
        x = random_feasible(g, rng, pairs)
        y = random_feasible(g, rng, pairs)
    else:
        if not (is_independent(g, start[0]) and is_independent(g, start[1])):
            raise ValidationError("starting pair must be feasible")
        x = np.full(pairs, start[0], dtype=np.uint64)
        y = np.full(pairs, start[1], dtype=np.uint64)
    phi_of = _bits.SubsetSum(f.f)
    times = np.where(x == y, 0, -1)
    frac = [float(np.mean(x == y))]
    mean_phi = [float(phi_of(x ^ y).mean())]
    for t in range(1, slots + 1):
        ms = sample_update_sets(dist, g, rng, pairs)
        coins = rng.random((pairs, g.n))
        x = step_batch(g, fug, x, ms, coins)
        y = step_batch(g, fug, y, ms, coins)
        same = x == y
        times[(times < 0) & same] = t
        frac.append(float(same.mean()))
        mean_phi.append(float(phi_of(x ^ y).mean()))
    return CoalescenceResult(pairs, seed, frac, mean_phi, times)


def sequential_update(g: Graph, fug: Fugacities, sigma: int, order, coin_of: dict[int, float]) -> int:
    """Update the vertices of ``order`` one at a time, each seeing the latest state."""
    p, adj = fug.p, g.adjacency
    cur = sigma
    for y in order:
        cur = _step_unchecked(adj, p, cur, 1 << y, [coin_of[y]])
    return cur
