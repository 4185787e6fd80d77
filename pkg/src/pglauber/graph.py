"""Graphs, configurations and independent sets.

Configurations are plain Python ints used as bit vectors: bit ``v`` is set iff
vertex ``v`` is occupied. Union, intersection, difference and symmetric
difference are ``|``, ``&``, ``& ~`` and ``^``, all exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

from .errors import CapExceededError, GraphFormatError, ValidationError

MAX_VERTICES = 64
DEFAULT_OMEGA_CAP = 1 << 20


def mask_of(vertices: Iterable[int]) -> int:
    """Bit vector with the given vertices set."""
    m = 0
    for v in vertices:
        m |= 1 << int(v)
    return m


def members(mask: int) -> list[int]:
    """Vertices set in ``mask``, ascending."""
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0..n-1``.

    ``adjacency[v]`` is the neighbor set of ``v`` as a bit vector.
    """

    n: int
    adjacency: tuple[int, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not 0 <= self.n <= MAX_VERTICES:
            raise GraphFormatError(f"vertex count {self.n} outside 0..{MAX_VERTICES}")
        if len(self.adjacency) != self.n:
            raise GraphFormatError("adjacency length does not match n")
        full = (1 << self.n) - 1
        for v, nb in enumerate(self.adjacency):
            if nb & ~full:
                raise GraphFormatError(f"vertex {v} has an out-of-range neighbor")
            if nb >> v & 1:
                raise GraphFormatError(f"self-loop at vertex {v}")
            for w in members(nb):
                if not self.adjacency[w] >> v & 1:
                    raise GraphFormatError(f"asymmetric adjacency between {v} and {w}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], name: str = "") -> Graph:
        if not 0 <= n <= MAX_VERTICES:
            raise GraphFormatError(f"vertex count {n} outside 0..{MAX_VERTICES}")
        adj = [0] * n
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj), name)

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((u, w) for u in range(self.n) for w in members(self.adjacency[u]) if u < w)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def neighbors(self, v: int) -> list[int]:
        return members(self.adjacency[v])

    def degree(self, v: int) -> int:
        return popcount(self.adjacency[v])

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(popcount(nb) for nb in self.adjacency)

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    @property
    def min_degree(self) -> int:
        return min(self.degrees, default=0)

    def neighborhood(self, mask: int) -> int:
        """Union of the neighbor sets of the vertices in ``mask``."""
        out = 0
        for v in members(mask):
            out |= self.adjacency[v]
        return out

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = frontier = 1
        while frontier:
            frontier = self.neighborhood(frontier) & ~seen
            seen |= frontier
        return seen == self.full_mask

    def to_edge_list(self) -> str:
        lines = [str(self.n)] + [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    def adjacency_array(self) -> np.ndarray:
        return np.array(self.adjacency, dtype=np.uint64)


def is_independent(g: Graph, s: int) -> bool:
    """True iff no edge of ``g`` has both endpoints in ``s``."""
    if s >> g.n:
        raise ValidationError("configuration wider than the graph")
    for v in members(s):
        if g.adjacency[v] & s:
            return False
    return True


def enumerate_independent_sets(g: Graph, cap: int = DEFAULT_OMEGA_CAP) -> list[int]:
    """All independent sets of ``g`` in ascending bit-vector order.

    The first element is always the empty set. Raises ``CapExceededError`` as
    soon as more than ``cap`` sets have been found.
    """
    if cap <= 0:
        raise ValidationError("cap must be positive")
    out: list[int] = []
    adj = g.adjacency
    # Deciding the highest vertex first, exclusion before inclusion, emits in
    # ascending numeric order.
    stack: list[tuple[int, int, int]] = [(g.n - 1, 0, 0)]
    while stack:
        v, cur, forbidden = stack.pop()
        if v < 0:
            out.append(cur)
            if len(out) > cap:
                raise CapExceededError("independent sets", cap, len(out))
            continue
        if not forbidden >> v & 1:
            stack.append((v - 1, cur | 1 << v, forbidden | adj[v]))
        stack.append((v - 1, cur, forbidden))
    return out


# -- generators ---------------------------------------------------------------


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], f"path({n})")


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValidationError("cycle needs n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], f"cycle({n})")


def star_graph(n: int) -> Graph:
    """Star on ``n`` vertices: center 0 joined to leaves ``1..n-1``."""
    if n < 1:
        raise ValidationError("star needs n >= 1")
    return Graph.from_edges(n, [(0, i) for i in range(1, n)], f"star({n})")


def grid_graph(rows: int, cols: int) -> Graph:
    if rows < 1 or cols < 1:
        raise ValidationError("grid needs rows, cols >= 1")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph.from_edges(rows * cols, edges, f"grid({rows},{cols})")


def band_graph(n: int, w: int) -> Graph:
    """Vertices ``i`` and ``j`` are adjacent iff ``0 < |i - j| <= w``."""
    if n < 1 or w < 1:
        raise ValidationError("band needs n >= 1 and w >= 1")
    edges = [(i, j) for i in range(n) for j in range(i + 1, min(n, i + w + 1))]
    return Graph.from_edges(n, edges, f"band({n},{w})")


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)], f"complete({n})")


def empty_graph(n: int) -> Graph:
    return Graph.from_edges(n, [], f"empty({n})")


def erdos_renyi_graph(n: int, p: float, seed: int) -> Graph:
    """G(n, p); pairs ``(i, j), i < j`` are drawn in lexicographic order."""
    if n < 0:
        raise ValidationError("n must be non-negative")
    if not 0.0 <= p <= 1.0:
        raise ValidationError("edge probability must lie in [0, 1]")
    if seed is None:
        raise ValidationError("erdos_renyi requires a seed")
    rng = np.random.default_rng(seed)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    draws = rng.random(len(pairs))
    edges = [pair for pair, u in zip(pairs, draws) if u < p]
    return Graph.from_edges(n, edges, f"erdos_renyi({n},{p},seed={seed})")


GENERATORS = {
    "path": (path_graph, ("n",)),
    "cycle": (cycle_graph, ("n",)),
    "star": (star_graph, ("n",)),
    "grid": (grid_graph, ("rows", "cols")),
    "band": (band_graph, ("n", "w")),
    "complete": (complete_graph, ("n",)),
    "empty": (empty_graph, ("n",)),
    "erdos_renyi": (erdos_renyi_graph, ("n", "p")),
}


def generate(kind: str, params: dict, seed: int | None = None) -> Graph:
    """Build a graph from a generator name and its parameters."""
    if kind not in GENERATORS:
        raise ValidationError(f"unknown generator {kind!r}; choose from {sorted(GENERATORS)}")
    fn, keys = GENERATORS[kind]
    missing = [k for k in keys if k not in params]
    if missing:
        raise ValidationError(f"{kind} needs parameters {missing}")
    extra = set(params) - set(keys) - {"seed"}
    if extra:
        raise ValidationError(f"{kind} got unexpected parameters {sorted(extra)}")
    args = []
    for k in keys:
        val = params[k]
        args.append(float(val) if k == "p" else int(val))
    if kind == "erdos_renyi":
        return fn(*args, seed=params.get("seed", seed))
    return fn(*args)


def load_edge_list(text: str) -> Graph:
    """Parse the edge-list format: a line with ``n``, then ``u v`` lines.

    Blank lines and lines starting with ``#`` are ignored.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if s and not s.startswith("#"):
            lines.append((lineno, s))
    if not lines:
        raise GraphFormatError("empty edge list: expected vertex count on the first line")
    lineno, head = lines[0]
    try:
        n = int(head)
    except ValueError:
        raise GraphFormatError(f"line {lineno}: expected vertex count, got {head!r}") from None
    if not 0 <= n <= MAX_VERTICES:
        raise GraphFormatError(f"line {lineno}: n={n} outside 0..{MAX_VERTICES}")
    edges = []
    for lineno, s in lines[1:]:
        parts = s.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {s!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer vertex in {s!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"line {lineno}: vertex out of range 0..{n - 1}")
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop at {u}")
        edges.append((u, v))
    return Graph.from_edges(n, edges)


def connected_graphs(max_n: int, min_n: int = 1) -> Iterator[Graph]:
    """Every connected graph on ``min_n..max_n`` vertices, one per isomorphism class.

    Backed by the networkx graph atlas, so ``max_n <= 7``.
    """
    import networkx as nx

    if max_n > 7:
        raise ValidationError("graph catalog only covers n <= 7")
    for idx, h in enumerate(nx.graph_atlas_g()):
        k = h.number_of_nodes()
        if k < min_n or k > max_n:
            continue
        if k > 0 and nx.is_connected(h):
            yield Graph.from_edges(k, h.edges(), f"atlas[{idx}]")


def all_graphs(max_n: int, min_n: int = 1) -> Iterator[Graph]:
    """Every graph (connected or not) on ``min_n..max_n`` vertices up to isomorphism."""
    import networkx as nx

    if max_n > 7:
        raise ValidationError("graph catalog only covers n <= 7")
    for idx, h in enumerate(nx.graph_atlas_g()):
        if min_n <= h.number_of_nodes() <= max_n:
            yield Graph.from_edges(h.number_of_nodes(), h.edges(), f"atlas[{idx}]")

