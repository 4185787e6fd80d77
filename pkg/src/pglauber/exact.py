"""Ground truth on small graphs: stationary law, transition matrix, mixing time.

State spaces are the feasible configurations in ascending bitmask order, so
index ``i`` of every vector and matrix refers to ``omega[i]``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import _bits
from .dynamics import Fugacities, UpdateSetDistribution, as_explicit, require_valid, validate
from .errors import CapExceededError, ReducibleChainError, ValidationError
from .graph import Graph, enumerate_independent_sets

MATRIX_CAP = 4096
MAX_ITERATIONS = 1_000_000


@dataclass
class StationaryDistribution:
    omega: list[int]
    pi: np.ndarray
    Z: float

    def index(self) -> dict[int, int]:
        return {s: i for i, s in enumerate(self.omega)}


@dataclass
class TransitionMatrix:
    omega: list[int]
    P: np.ndarray


@dataclass
class DetailedBalanceReport:
    max_violation: float
    pair: tuple[int, int] | None
    irreducible: bool
    tol: float

    @property
    def holds(self) -> bool:
        return self.max_violation <= self.tol

    def to_dict(self) -> dict:
        return {
            "max_violation": self.max_violation,
            "pair": list(self.pair) if self.pair else None,
            "irreducible": self.irreducible,
            "tol": self.tol,
            "holds": self.holds,
        }


@dataclass
class MixingReport:
    epsilon: float
    t_mix: int
    worst_start: int
    tv_curve: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "t_mix": self.t_mix,
            "worst_start": self.worst_start,
            "tv_curve": list(self.tv_curve),
        }


def product_form(g: Graph, fug: Fugacities, cap: int = MATRIX_CAP) -> StationaryDistribution:
    """Hard-core law ``pi(s) = prod_{v in s} lambda_v / Z`` over the feasible set."""
    if fug.n != g.n:
        raise ValidationError("fugacity vector length does not match the graph")
    omega = enumerate_independent_sets(g, cap)
    weights = _bits.SubsetProduct(fug.lam)(np.array(omega, dtype=np.uint64))
    Z = float(weights.sum())
    return StationaryDistribution(omega, weights / Z, Z)


def build_matrix(
    g: Graph,
    fug: Fugacities,
    dist: UpdateSetDistribution,
    cap: int = MATRIX_CAP,
    block: int = 1 << 20,
) -> TransitionMatrix:
    """Dense one-slot transition matrix over the feasible configurations.

    Entry ``(i, j)`` is the same sum as ``dynamics.transition_probability``,
    evaluated for all pairs at once.
    """
    if fug.n != g.n:
        raise ValidationError("fugacity vector length does not match the graph")
    dist = as_explicit(dist, g)
    require_valid(dist, g)
    omega = enumerate_independent_sets(g, cap)
    k = len(omega)
    states = np.array(omega, dtype=np.uint64)
    prod_p = _bits.SubsetProduct(fug.p)
    prod_pbar = _bits.SubsetProduct(fug.pbar)
    nb_union = _bits.NeighborUnion(g.adjacency)
    support = [(np.uint64(m), q) for m, q in dist.pairs() if q > 0]
    P = np.zeros((k, k))
    rows_per_block = max(1, block // max(k, 1))
    for r0 in range(0, k, rows_per_block):
        sig = states[r0:r0 + rows_per_block, None]
        eta = states[None, :]
        union = sig | eta
        diff = sig ^ eta
        ok = _feasible_mask(g, union)
        base = prod_pbar(sig & ~eta) * prod_p(eta & ~sig)
        around = nb_union(union)
        block_P = np.zeros(union.shape)
        for m, q in support:
            hit = ok & ((diff & ~m) == 0)
            if not hit.any():
                continue
            term = q * prod_p(m & sig & eta) * prod_pbar(m & ~union & ~around)
            block_P += np.where(hit, term, 0.0)
        P[r0:r0 + rows_per_block] = block_P * base
    return TransitionMatrix(omega, P)


def _feasible_mask(g: Graph, masks: np.ndarray) -> np.ndarray:
    ok = np.ones(masks.shape, dtype=bool)
    one = np.uint64(1)
    for v, nb in enumerate(g.adjacency):
        has = (masks >> np.uint64(v)) & one == one
        ok &= ~(has & ((masks & np.uint64(nb)) != 0))
    return ok


def stationary_vector(P: np.ndarray) -> np.ndarray:
    """Solve ``x P = x, sum(x) = 1`` directly (independent of any product form)."""
    k = P.shape[0]
    A = np.vstack([P.T - np.eye(k), np.ones((1, k))])
    b = np.zeros(k + 1)
    b[-1] = 1.0
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    return x


def is_irreducible(P: np.ndarray, tol: float = 0.0) -> bool:
    """Every state reaches every other state along positive entries."""
    k = P.shape[0]
    if k == 0:
        return True
    adj = P > tol
    return bool(_reach(adj, 0).all() and _reach(adj.T, 0).all())


def _reach(adj: np.ndarray, start: int) -> np.ndarray:
    seen = np.zeros(adj.shape[0], dtype=bool)
    seen[start] = True
    queue = deque([start])
    while queue:
        i = queue.popleft()
        nxt = np.flatnonzero(adj[i] & ~seen)
        seen[nxt] = True
        queue.extend(nxt.tolist())
    return seen


def is_aperiodic(P: np.ndarray, tol: float = 0.0) -> bool:
    """Period one, assuming irreducibility (gcd of cycle lengths via BFS levels)."""
    k = P.shape[0]
    if k == 0 or (np.diag(P) > tol).any():
        return True
    adj = P > tol
    level = -np.ones(k, dtype=np.int64)
    level[0] = 0
    queue = deque([0])
    g = 0
    while queue:
        i = queue.popleft()
        for j in np.flatnonzero(adj[i]).tolist():
            if level[j] < 0:
                level[j] = level[i] + 1
                queue.append(j)
            else:
                g = np.gcd(g, level[i] + 1 - level[j])
    return bool(g == 1)


def check_detailed_balance(P: np.ndarray, pi: np.ndarray, tol: float = 1e-12) -> DetailedBalanceReport:
    """Largest ``|pi(s) P(s,t) - pi(t) P(t,s)|`` over all pairs."""
    flow = pi[:, None] * P
    gap = np.abs(flow - flow.T)
    if gap.size == 0:
        return DetailedBalanceReport(0.0, None, True, tol)
    i, j = np.unravel_index(int(np.argmax(gap)), gap.shape)
    return DetailedBalanceReport(float(gap[i, j]), (int(i), int(j)), is_irreducible(P), tol)


def tv_distance(mu, nu, tol: float = 1e-9) -> float:
    """Total-variation distance ``0.5 * sum |mu - nu|``."""
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if mu.shape != nu.shape:
        raise ValidationError("distributions have different supports")
    for name, d in (("mu", mu), ("nu", nu)):
        if abs(d.sum() - 1.0) > tol or (d < -tol).any():
            raise ValidationError(f"{name} is not a normalized distribution")
    return float(0.5 * np.abs(mu - nu).sum())


def exact_mixing_time(
    P: np.ndarray,
    pi: np.ndarray,
    epsilon: float,
    omega: list[int] | None = None,
    max_iterations: int = MAX_ITERATIONS,
) -> MixingReport:
    """Smallest ``t`` with ``max_x ||P^t(x, .) - pi||_TV <= epsilon``.

    Evolves the rows of ``P^t`` for every start state at once. ``tv_curve[t]``
    is the worst-start distance at time ``t`` for ``t = 0..t_mix``.
    """
    if epsilon <= 0:
        raise ValidationError("epsilon must be positive")
    if not is_irreducible(P):
        raise ReducibleChainError("transition matrix is reducible")
    if not is_aperiodic(P):
        raise ReducibleChainError("transition matrix is periodic")
    k = P.shape[0]
    rows = np.eye(k)
    curve = []
    for t in range(max_iterations + 1):
        dist = 0.5 * np.abs(rows - pi[None, :]).sum(axis=1)
        worst = int(np.argmax(dist))
        curve.append(float(dist[worst]))
        if dist[worst] <= epsilon:
            start = omega[worst] if omega is not None else worst
            return MixingReport(epsilon, t, start, curve)
        rows = rows @ P
    raise CapExceededError("mixing-time iterations", max_iterations)


def reachable_configurations(g: Graph, fug: Fugacities, dist: UpdateSetDistribution, start: int = 0,
                             cap: int = MATRIX_CAP) -> list[int]:
    """Configurations reachable from ``start`` along positive transitions."""
    tm = build_matrix(g, fug, dist, cap)
    idx = {s: i for i, s in enumerate(tm.omega)}
    seen = _reach(tm.P > 0, idx[start])
    return [s for s, hit in zip(tm.omega, seen) if hit]


def support_condition(g: Graph, dist: UpdateSetDistribution) -> bool:
    """Every vertex has positive update probability."""
    return validate(dist, g).covers_all
