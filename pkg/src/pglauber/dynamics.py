"""Parallel Glauber dynamics on independent sets.

In each slot an independent update set ``m`` is drawn from an update-set
distribution. Every vertex of ``m`` with no occupied neighbor becomes occupied
with probability ``p_v = lambda_v / (1 + lambda_v)`` and empty otherwise; a
vertex of ``m`` with an occupied neighbor becomes empty; all other vertices
keep their state.

Coin discipline: a slot consumes exactly one uniform per vertex of the update
set, in ascending vertex order, from a coin stream separate from the stream
that draws update sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from statistics import NormalDist
from typing import Sequence, Union

import numpy as np

from . import _bits
from .errors import CapExceededError, ValidationError
from .graph import Graph, enumerate_independent_sets, is_independent, members, popcount

NORMALIZATION_TOL = 1e-12
EXACT_GREEDY_MAX_N = 20
EXPLICIT_GREEDY_MAX_N = 16


@dataclass(frozen=True)
class Fugacities:
    """Per-vertex activities ``lambda_v > 0``."""

    lam: tuple[float, ...]

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lam)
        for v, x in enumerate(lam):
            if not (math.isfinite(x) and x > 0):
                raise ValidationError(f"fugacity of vertex {v} must be positive and finite, got {x}")
        object.__setattr__(self, "lam", lam)

    @classmethod
    def uniform(cls, n: int, value: float) -> Fugacities:
        return cls((value,) * n)

    @property
    def n(self) -> int:
        return len(self.lam)

    @property
    def p(self) -> tuple[float, ...]:
        return tuple(x / (1.0 + x) for x in self.lam)

    @property
    def pbar(self) -> tuple[float, ...]:
        return tuple(1.0 / (1.0 + x) for x in self.lam)

    def array(self) -> np.ndarray:
        return np.array(self.lam)


# -- update-set distributions -------------------------------------------------


@dataclass(frozen=True)
class ExplicitDistribution:
    """Finite list of update sets ``sets[i]`` drawn with probability ``probs[i]``."""

    sets: tuple[int, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(int(s) for s in self.sets))
        object.__setattr__(self, "probs", tuple(float(q) for q in self.probs))
        if len(self.sets) != len(self.probs):
            raise ValidationError("sets and probs differ in length")

    @classmethod
    def from_pairs(cls, pairs) -> ExplicitDistribution:
        sets, probs = zip(*pairs) if pairs else ((), ())
        return cls(tuple(sets), tuple(probs))

    def pairs(self):
        return list(zip(self.sets, self.probs))


@dataclass(frozen=True)
class SingleSiteDistribution:
    """One vertex per slot, vertex ``v`` chosen with probability ``weights[v]``."""

    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if any(not (math.isfinite(x) and x > 0) for x in w):
            raise ValidationError("single-site weights must be positive")
        total = sum(w)
        object.__setattr__(self, "weights", tuple(x / total for x in w))

    @classmethod
    def uniform(cls, n: int) -> SingleSiteDistribution:
        return cls((1.0,) * n)

    @classmethod
    def fugacity_weighted(cls, fug: Fugacities) -> SingleSiteDistribution:
        """Select ``y`` with probability proportional to ``1 + lambda_y``."""
        return cls(tuple(1.0 + x for x in fug.lam))


@dataclass(frozen=True)
class RandomGreedyDistribution:
    """Activation coins plus random-order greedy insertion.

    Each vertex activates independently with probability ``activation[v]``;
    activated vertices are visited in a uniformly random order and each is
    added unless a neighbor is already in the set.
    """

    activation: tuple[float, ...]

    def __post_init__(self):
        a = tuple(float(x) for x in self.activation)
        if any(not (0.0 < x <= 1.0) for x in a):
            raise ValidationError("activation probabilities must lie in (0, 1]")
        object.__setattr__(self, "activation", a)

    @classmethod
    def uniform(cls, n: int, a: float) -> RandomGreedyDistribution:
        return cls((a,) * n)


UpdateSetDistribution = Union[ExplicitDistribution, SingleSiteDistribution, RandomGreedyDistribution]


@dataclass
class ValidationReport:
    independent: bool
    normalized: bool
    covers_all: bool
    uncovered: list[int] = field(default_factory=list)
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.independent and self.normalized and self.covers_all


def _check_width(dist, g: Graph):
    if isinstance(dist, ExplicitDistribution):
        for s in dist.sets:
            if s < 0 or s >> g.n:
                raise ValidationError("update set wider than the graph")
        return
    k = len(dist.weights) if isinstance(dist, SingleSiteDistribution) else len(dist.activation)
    if k != g.n:
        raise ValidationError(f"distribution covers {k} vertices but the graph has {g.n}")


def validate(dist: UpdateSetDistribution, g: Graph) -> ValidationReport:
    """Check independence, normalization and that every vertex can be updated."""
    _check_width(dist, g)
    report = ValidationReport(True, True, True)
    if isinstance(dist, ExplicitDistribution):
        covered = 0
        for s, q in dist.pairs():
            if q < 0:
                report.normalized = False
                report.problems.append(f"negative probability {q} for set {members(s)}")
            if not is_independent(g, s):
                report.independent = False
                report.problems.append(f"update set not independent: {members(s)}")
            if q > 0:
                covered |= s
        total = sum(dist.probs)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            report.normalized = False
            report.problems.append(f"probabilities sum to {total!r}, not 1")
    elif isinstance(dist, SingleSiteDistribution):
        covered = g.full_mask
    else:
        # Vertex v is visited first with positive probability whenever it activates.
        covered = sum(1 << v for v, a in enumerate(dist.activation) if a > 0)
    report.uncovered = members(g.full_mask & ~covered)
    if report.uncovered:
        report.covers_all = False
        report.problems.append(f"vertices never updated: {report.uncovered}")
    return report


def require_valid(dist: UpdateSetDistribution, g: Graph, need_cover: bool = False) -> None:
    report = validate(dist, g)
    if not report.independent or not report.normalized or (need_cover and not report.covers_all):
        raise ValidationError("; ".join(report.problems))


# -- exact laws of the generated schedules -------------------------------------


def greedy_law(g: Graph, activation: Sequence[float]) -> dict[int, float]:
    """Exact law of the random-greedy update set, as ``{set: probability}``.

    Uses the recursion over the set ``R`` of undecided vertices: the next
    visited vertex is uniform on ``R``; if it activates it joins the set and
    its closed neighborhood leaves ``R``, otherwise only it leaves ``R``.
    """
    if g.n > EXPLICIT_GREEDY_MAX_N:
        raise CapExceededError("random-greedy support enumeration (vertices)", EXPLICIT_GREEDY_MAX_N, g.n)
    adj = g.adjacency
    a = tuple(activation)

    @lru_cache(maxsize=None)
    def law(rest: int) -> tuple[tuple[int, float], ...]:
        if rest == 0:
            return ((0, 1.0),)
        verts = members(rest)
        share = 1.0 / len(verts)
        acc: dict[int, float] = {}
        for u in verts:
            if a[u] > 0:
                for s, q in law(rest & ~(adj[u] | 1 << u)):
                    acc[s | 1 << u] = acc.get(s | 1 << u, 0.0) + share * a[u] * q
            if a[u] < 1:
                for s, q in law(rest & ~(1 << u)):
                    acc[s] = acc.get(s, 0.0) + share * (1.0 - a[u]) * q
        return tuple(sorted(acc.items()))

    return dict(law(g.full_mask))


def local_minimum_schedule(g: Graph) -> ExplicitDistribution:
    """Update set = vertices whose random priority beats all their neighbors.

    Every vertex draws an i.i.d. continuous priority; ``v`` is updated iff its
    priority is the smallest in its closed neighborhood, so ``q_v = 1/(d_v+1)``.
    The exact law is computed by revealing priorities in increasing order.
    """
    if g.n > EXPLICIT_GREEDY_MAX_N:
        raise CapExceededError("local-minimum schedule (vertices)", EXPLICIT_GREEDY_MAX_N, g.n)
    adj = g.adjacency

    @lru_cache(maxsize=None)
    def law(unseen: int) -> tuple[tuple[int, float], ...]:
        if unseen == 0:
            return ((0, 1.0),)
        verts = members(unseen)
        share = 1.0 / len(verts)
        acc: dict[int, float] = {}
        for u in verts:
            # u is a local minimum iff none of its neighbors was revealed before it.
            bit = 1 << u if adj[u] & ~unseen == 0 else 0
            for s, q in law(unseen & ~(1 << u)):
                acc[s | bit] = acc.get(s | bit, 0.0) + share * q
        return tuple(sorted(acc.items()))

    pairs = law(g.full_mask)
    return ExplicitDistribution(tuple(s for s, _ in pairs), tuple(q for _, q in pairs))


def as_explicit(dist: UpdateSetDistribution, g: Graph) -> ExplicitDistribution:
    """Convert any variant into an explicit list of (set, probability)."""
    _check_width(dist, g)
    if isinstance(dist, ExplicitDistribution):
        return dist
    if isinstance(dist, SingleSiteDistribution):
        return ExplicitDistribution(tuple(1 << v for v in range(g.n)), dist.weights)
    law = greedy_law(g, dist.activation)
    items = sorted(law.items())
    return ExplicitDistribution(tuple(s for s, _ in items), tuple(q for _, q in items))


# -- marginals ----------------------------------------------------------------


@dataclass
class Marginals:
    """Per-vertex update probabilities ``q_v``; ``halfwidth`` is a 99% CI (0 if exact)."""

    q: np.ndarray
    halfwidth: np.ndarray
    mode: str


def _greedy_marginals_exact(g: Graph, activation: Sequence[float]) -> np.ndarray:
    n = g.n
    if n == 0:
        return np.zeros(0)
    size = 1 << n
    a = np.asarray(activation, dtype=float)
    closed = np.array([g.adjacency[u] | 1 << u for u in range(n)], dtype=np.int64)
    masks = np.arange(size, dtype=np.int64)
    pc = np.array([popcount(int(x)) for x in range(size)]) if n <= 12 else _popcounts(masks)
    # table[R, v] = P(v ends in the set | undecided vertices R)
    table = np.zeros((size, n))
    eye = np.eye(n)
    for k in range(1, n + 1):
        layer = masks[pc == k]
        acc = np.zeros((len(layer), n))
        for u in range(n):
            sel = (layer >> u) & 1 == 1
            if not sel.any():
                continue
            rows = layer[sel]
            take = table[rows & ~closed[u]] + eye[u]
            skip = table[rows & ~(1 << u)]
            acc[sel] += a[u] * take + (1.0 - a[u]) * skip
        table[layer] = acc / k
    return table[size - 1].copy()


def _popcounts(masks: np.ndarray) -> np.ndarray:
    out = np.zeros(masks.shape, dtype=np.int64)
    x = masks.copy()
    while x.any():
        out += x & 1
        x >>= 1
    return out


def update_marginals(
    dist: UpdateSetDistribution,
    g: Graph,
    mode: str = "exact",
    samples: int = 100_000,
    seed: int = 0,
) -> Marginals:
    """Per-vertex probability ``q_v`` of being in the update set.

    ``mode="exact"`` is available for every explicit and single-site
    distribution and for random-greedy distributions with ``n <= 20``.
    ``mode="monte_carlo"`` averages ``samples`` draws.
    """
    _check_width(dist, g)
    n = g.n
    if mode == "exact":
        if isinstance(dist, ExplicitDistribution):
            q = np.zeros(n)
            for s, prob in dist.pairs():
                for v in members(s):
                    q[v] += prob
        elif isinstance(dist, SingleSiteDistribution):
            q = np.array(dist.weights)
        else:
            if n > EXACT_GREEDY_MAX_N:
                raise CapExceededError("exact random-greedy marginals (vertices)", EXACT_GREEDY_MAX_N, n)
            q = _greedy_marginals_exact(g, dist.activation)
        return Marginals(q, np.zeros(n), "exact")
    if mode != "monte_carlo":
        raise ValidationError(f"unknown marginal mode {mode!r}")
    if samples < 2:
        raise ValidationError("monte_carlo mode needs at least 2 samples")
    rng = np.random.default_rng(seed)
    sets = sample_update_sets(dist, g, rng, samples)
    q = _bits.bit_counts(sets, n) / samples
    z = NormalDist().inv_cdf(0.995)
    half = z * np.sqrt(q * (1.0 - q) / samples)
    return Marginals(q, half, "monte_carlo")


def marginals_of(dist_or_q, g: Graph) -> np.ndarray:
    """Exact ``q_v`` from a distribution, or pass an explicit vector through."""
    if isinstance(dist_or_q, (ExplicitDistribution, SingleSiteDistribution, RandomGreedyDistribution)):
        return update_marginals(dist_or_q, g).q
    q = np.asarray(dist_or_q, dtype=float)
    if q.shape != (g.n,):
        raise ValidationError("marginal vector has the wrong length")
    return q


# -- sampling -----------------------------------------------------------------


def _pick(cdf: np.ndarray, u):
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)


def sample_update_set(dist: UpdateSetDistribution, g: Graph, rng: np.random.Generator) -> int:
    """Draw one update set."""
    if isinstance(dist, ExplicitDistribution):
        return dist.sets[int(_pick(np.cumsum(dist.probs), rng.random()))]
    if isinstance(dist, SingleSiteDistribution):
        return 1 << int(_pick(np.cumsum(dist.weights), rng.random()))
    active = rng.random(g.n) < np.asarray(dist.activation)
    order = rng.permutation(np.flatnonzero(active))
    m = 0
    for v in order:
        if not g.adjacency[v] & m:
            m |= 1 << int(v)
    return m


def sample_update_sets(dist: UpdateSetDistribution, g: Graph, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` update sets at once, as a ``uint64`` array."""
    if isinstance(dist, ExplicitDistribution):
        table = np.array(dist.sets, dtype=np.uint64)
        return table[_pick(np.cumsum(dist.probs), rng.random(size))]
    if isinstance(dist, SingleSiteDistribution):
        v = _pick(np.cumsum(dist.weights), rng.random(size)).astype(np.uint64)
        return np.uint64(1) << v
    n = g.n
    active = rng.random((size, n)) < np.asarray(dist.activation)
    order = np.argsort(rng.random((size, n)), axis=1)
    adj = g.adjacency_array()
    m = np.zeros(size, dtype=np.uint64)
    rows = np.arange(size)
    for k in range(n):
        v = order[:, k]
        ok = active[rows, v] & ((m & adj[v]) == 0)
        m[ok] |= np.uint64(1) << v[ok].astype(np.uint64)
    return m


# -- one slot -----------------------------------------------------------------


def _step_unchecked(adj, p, sigma: int, m: int, coins) -> int:
    out = sigma & ~m
    i = 0
    v = 0
    mm = m
    while mm:
        if mm & 1:
            if not adj[v] & sigma and coins[i] < p[v]:
                out |= 1 << v
            i += 1
        mm >>= 1
        v += 1
    return out


def step(g: Graph, fug: Fugacities, sigma: int, m: int, coins: Sequence[float]) -> int:
    """Apply one slot of the dynamics with update set ``m``.

    Args:
        sigma: current feasible configuration.
        m: independent update set.
        coins: one uniform in [0, 1) per vertex of ``m``, ascending vertex order.

    Returns:
        The next configuration (always feasible).
    """
    if not is_independent(g, sigma):
        raise ValidationError("current configuration is not feasible")
    if not is_independent(g, m):
        raise ValidationError("update set not independent")
    if len(coins) != popcount(m):
        raise ValidationError(f"expected {popcount(m)} coins, got {len(coins)}")
    return _step_unchecked(g.adjacency, fug.p, sigma, m, coins)


def step_batch(g: Graph, fug: Fugacities, sigmas: np.ndarray, ms: np.ndarray, coins: np.ndarray) -> np.ndarray:
    """Vectorized slot over many independent chains.

    ``coins[i, v]`` is the coin of vertex ``v`` for chain ``i``; columns of
    vertices outside the update set are ignored.
    """
    sigmas = np.asarray(sigmas, dtype=np.uint64)
    ms = np.asarray(ms, dtype=np.uint64)
    p = fug.p
    out = sigmas & ~ms
    one = np.uint64(1)
    for v, nb in enumerate(g.adjacency):
        bit = one << np.uint64(v)
        add = ((ms & bit) != 0) & ((sigmas & np.uint64(nb)) == 0) & (coins[:, v] < p[v])
        out[add] |= bit
    return out


# -- trajectories -------------------------------------------------------------


@dataclass
class ChainSummary:
    """Visit statistics for the slots after burn-in.

    ``counts`` maps configuration bitmask to visit count (``None`` when the
    state space was too large to track); ``occupancy[v]`` counts the recorded
    slots in which ``v`` was occupied.
    """

    n: int
    slots: int
    burn_in: int
    seed: int
    recorded: int
    occupancy: np.ndarray
    counts: dict[int, int] | None
    final: int
    trace: list[tuple[int, int]] | None = None

    def empirical(self) -> dict[int, float]:
        if self.counts is None:
            raise ValidationError("configuration counts were not collected")
        if self.recorded == 0:
            return {}
        return {s: c / self.recorded for s, c in self.counts.items()}

    def occupancy_fraction(self) -> np.ndarray:
        if self.recorded == 0:
            return np.zeros(self.n)
        return self.occupancy / self.recorded


def chain_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent (schedule, coin) generators derived from one seed."""
    sched, coin = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(sched), np.random.default_rng(coin)


def run_chain(
    g: Graph,
    fug: Fugacities,
    dist: UpdateSetDistribution,
    slots: int,
    seed: int,
    burn_in: int = 0,
    start: int = 0,
    count_configurations: bool | None = None,
    cap: int = 4096,
    trace: bool = False,
    chunk: int = 1 << 16,
) -> ChainSummary:
    """Run the chain for ``slots`` slots and summarize slots ``burn_in+1..slots``.

    Per-configuration counts are collected when ``count_configurations`` is
    true, or by default when the state space has at most ``cap`` states.
    """
    if slots < 0 or burn_in < 0:
        raise ValidationError("slots and burn_in must be non-negative")
    if fug.n != g.n:
        raise ValidationError("fugacity vector length does not match the graph")
    require_valid(dist, g)
    if not is_independent(g, start):
        raise ValidationError("start configuration is not feasible")
    if count_configurations is None:
        try:
            enumerate_independent_sets(g, cap)
            count_configurations = True
        except CapExceededError:
            count_configurations = False
    elif count_configurations:
        enumerate_independent_sets(g, cap)

    sched_rng, coin_rng = chain_streams(seed)
    adj, p = g.adjacency, fug.p
    sigma = start
    counts: dict[int, int] | None = {} if count_configurations else None
    occupancy = np.zeros(g.n, dtype=np.int64)
    trace_rows: list[tuple[int, int]] | None = [] if trace else None
    t = 0
    while t < slots:
        k = min(chunk, slots - t)
        ms = [int(x) for x in sample_update_sets(dist, g, sched_rng, k)]
        need = sum(popcount(x) for x in ms)
        coins = coin_rng.random(need).tolist()
        pos = 0
        states = []
        for m in ms:
            c = popcount(m)
            sigma = _step_unchecked(adj, p, sigma, m, coins[pos:pos + c])
            pos += c
            states.append(sigma)
        first = max(0, burn_in - t)
        kept = states[first:]
        if kept:
            arr = np.array(kept, dtype=np.uint64)
            occupancy += _bits.bit_counts(arr, g.n)
            if counts is not None:
                vals, cnt = np.unique(arr, return_counts=True)
                for s, c in zip(vals.tolist(), cnt.tolist()):
                    counts[s] = counts.get(s, 0) + c
            if trace_rows is not None:
                base = t + first + 1
                trace_rows.extend((base + i, s) for i, s in enumerate(kept))
        t += k
    recorded = max(0, slots - burn_in)
    if counts is not None:
        counts = dict(sorted(counts.items()))
    return ChainSummary(g.n, slots, burn_in, seed, recorded, occupancy, counts, sigma, trace_rows)


# -- exact one-step law -------------------------------------------------------


def transition_probability(g: Graph, fug: Fugacities, dist: ExplicitDistribution, sigma: int, eta: int) -> float:
    """Exact probability of moving from ``sigma`` to ``eta`` in one slot.

    Sums, over support sets ``m`` containing ``sigma ^ eta``, the product of
    ``pbar`` over removals, ``p`` over additions, ``p`` over kept vertices of
    ``m`` and ``pbar`` over vertices of ``m`` that are unoccupied in both and
    not adjacent to ``sigma | eta``. The diagonal uses the same sum.
    """
    if not isinstance(dist, ExplicitDistribution):
        raise ValidationError("transition_probability needs an explicit distribution")
    if not (is_independent(g, sigma) and is_independent(g, eta)):
        raise ValidationError("sigma and eta must be feasible")
    union = sigma | eta
    if not is_independent(g, union):
        return 0.0
    diff = sigma ^ eta
    p, pbar = fug.p, fug.pbar
    nb_union = g.neighborhood(union)
    base = 1.0
    for v in members(sigma & ~eta):
        base *= pbar[v]
    for v in members(eta & ~sigma):
        base *= p[v]
    total = 0.0
    for m, q in zip(dist.sets, dist.probs):
        if q <= 0 or diff & ~m:
            continue
        term = q * base
        for v in members(m & sigma & eta):
            term *= p[v]
        for v in members(m & ~union & ~nb_union):
            term *= pbar[v]
        total += term
    return total
