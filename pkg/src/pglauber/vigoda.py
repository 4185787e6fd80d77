"""Path metric on all configurations with blocking-dependent edge lengths.

Works on every configuration in ``{0,1}^n``, feasible or not. Flipping ``v``
in a configuration ``tau`` that lacks ``v`` costs ``1 + sum(lambda_w)/2`` over
the unblocked neighbors ``w`` of ``v``; the distance between two
configurations is the cheapest flip path between them.

Moves follow the single-site heat-bath rule on the whole cube: removing a
vertex always succeeds, adding ``y`` succeeds only when no neighbor of ``y``
is occupied and otherwise leaves the configuration unchanged.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from . import _bits
from .dynamics import Fugacities
from .errors import CapExceededError, ValidationError
from .graph import Graph, members

METRIC_MAX_N = 16
LEMMA_MAX_N = 12


def blocked_neighbors(g: Graph, sigma: int, v: int) -> tuple[int, int]:
    """Split ``N_v`` into blocked and unblocked neighbors (as bit vectors).

    ``w`` is blocked when it is occupied or has an occupied neighbor.
    """
    blocked = 0
    for w in members(g.adjacency[v]):
        if sigma >> w & 1 or g.adjacency[w] & sigma:
            blocked |= 1 << w
    return blocked, g.adjacency[v] & ~blocked


def edge_length(g: Graph, fug: Fugacities, sigma: int, v: int) -> float:
    """Length of the edge between ``sigma`` and ``sigma + v`` (``v`` not in ``sigma``)."""
    if sigma >> v & 1:
        raise ValidationError(f"vertex {v} is in sigma; pass the endpoint without it")
    _, free = blocked_neighbors(g, sigma, v)
    return 1.0 + 0.5 * sum(fug.lam[w] for w in members(free))


class VigodaMetric:
    """Shortest-path distances on the configuration cube, cached per source."""

    def __init__(self, g: Graph, fug: Fugacities, max_n: int = METRIC_MAX_N):
        if g.n > max_n:
            raise CapExceededError("path metric (vertices)", max_n, g.n)
        if fug.n != g.n:
            raise ValidationError("fugacity vector length does not match the graph")
        self.g = g
        self.fug = fug
        n = g.n
        taus = np.arange(1 << n, dtype=np.uint64)
        one = np.uint64(1)
        # free[tau]: vertices that are empty with no occupied neighbor
        free = np.zeros(taus.shape, dtype=np.uint64)
        for w, nb in enumerate(g.adjacency):
            ok = ((taus >> np.uint64(w)) & one == 0) & ((taus & np.uint64(nb)) == 0)
            free[ok] |= one << np.uint64(w)
        weight = _bits.SubsetSum(fug.lam)
        lengths = np.empty((1 << n, n))
        for u, nb in enumerate(g.adjacency):
            lengths[:, u] = 1.0 + 0.5 * weight(free & np.uint64(nb))
        # lengths[tau, u] is only meaningful for u not in tau
        self._lengths = lengths.tolist()
        self._cache: dict[int, list[float]] = {}

    def length(self, tau: int, u: int) -> float:
        """Length of the edge flipping ``u`` at ``tau`` (either endpoint)."""
        return self._lengths[tau & ~(1 << u)][u]

    def distances_from(self, source: int) -> list[float]:
        cached = self._cache.get(source)
        if cached is not None:
            return cached
        n = self.g.n
        lengths = self._lengths
        dist = [float("inf")] * (1 << n)
        dist[source] = 0.0
        heap = [(0.0, source)]
        while heap:
            d, tau = heapq.heappop(heap)
            if d > dist[tau]:
                continue
            for u in range(n):
                bit = 1 << u
                nxt = tau ^ bit
                nd = d + lengths[tau & ~bit][u]
                if nd < dist[nxt]:
                    dist[nxt] = nd
                    heapq.heappush(heap, (nd, nxt))
        self._cache[source] = dist
        return dist

    def distance(self, sigma: int, eta: int) -> float:
        if sigma == eta:
            return 0.0
        return self.distances_from(sigma)[eta]


def vigoda_distance(g: Graph, fug: Fugacities, sigma: int, eta: int) -> float:
    """Cheapest flip-path length between two configurations (``n <= 16``)."""
    return VigodaMetric(g, fug).distance(sigma, eta)


def try_add(g: Graph, omega: int, y: int) -> int:
    return omega | 1 << y if not g.adjacency[y] & omega else omega


def try_remove(omega: int, y: int) -> int:
    return omega & ~(1 << y)


@dataclass
class Lemma5Result:
    """``lhs = 2 * sum_y (1 + lambda_y) E[change from a move on y]`` versus ``rhs``."""

    sigma: int
    v: int
    lhs: float
    rhs: float
    per_vertex: list[float]
    tol: float = 1e-9

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + self.tol

    def to_dict(self) -> dict:
        return {
            "context": f"lemma5 sigma={self.sigma} v={self.v}",
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
        }


def theorem5_a(g: Graph, fug: Fugacities) -> float:
    return max((sum(fug.lam[w] for w in members(nb)) for nb in g.adjacency), default=0.0)


def lemma5_check(
    g: Graph,
    fug: Fugacities,
    sigma: int,
    v: int,
    metric: VigodaMetric | None = None,
    tol: float = 1e-9,
) -> Lemma5Result:
    """Evaluate the weighted one-step drift of ``(sigma, sigma + v)`` exactly.

    For each vertex ``y`` both copies attempt the same move: add ``y`` with
    probability ``p_y`` or remove it with probability ``1 - p_y``. Each
    resulting pair is measured with the exact path metric.
    """
    if sigma >> v & 1:
        raise ValidationError(f"vertex {v} is already in sigma")
    if g.n > LEMMA_MAX_N:
        raise CapExceededError("move-enumeration check (vertices)", LEMMA_MAX_N, g.n)
    if sigma >> g.n:
        raise ValidationError("configuration wider than the graph")
    a = theorem5_a(g, fug)
    if not a < 2:
        raise ValidationError(f"needs max neighbor fugacity sum a < 2, got {a}")
    metric = metric or VigodaMetric(g, fug)
    eta = sigma | 1 << v
    base = metric.distance(sigma, eta)
    per_vertex = []
    lhs = 0.0
    for y in range(g.n):
        lam = fug.lam[y]
        up = metric.distance(try_add(g, sigma, y), try_add(g, eta, y)) - base
        down = metric.distance(try_remove(sigma, y), try_remove(eta, y)) - base
        e_y = (lam * up + down) / (1.0 + lam)
        per_vertex.append(e_y)
        lhs += 2.0 * (lam * up + down)
    rhs = -2.0 + sum(fug.lam[w] for w in members(g.adjacency[v]))
    return Lemma5Result(sigma, v, lhs, rhs, per_vertex, tol)
