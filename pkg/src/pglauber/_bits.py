"""Vectorized per-vertex reductions over numpy arrays of bit vectors.

Each reduction splits a 64-bit mask into 8-bit chunks and combines one
precomputed 256-entry table per chunk, so a product or union over the set
bits costs eight lookups regardless of ``n``.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 8
_WIDTH = 1 << _CHUNK


def _chunks(n: int) -> int:
    return max(1, -(-n // _CHUNK))


def _byte_index(masks: np.ndarray, k: int) -> np.ndarray:
    return ((masks >> np.uint64(_CHUNK * k)) & np.uint64(_WIDTH - 1)).astype(np.intp)


class SubsetProduct:
    """``prod(masks)[i] == prod(values[v] for v in masks[i])``."""

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        self.n = len(values)
        self.tables = []
        for k in range(_chunks(self.n)):
            table = np.ones(_WIDTH)
            for b in range(_CHUNK):
                v = k * _CHUNK + b
                if v < self.n:
                    has = (np.arange(_WIDTH) >> b) & 1 == 1
                    table[has] *= values[v]
            self.tables.append(table)

    def __call__(self, masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.uint64)
        out = np.ones(masks.shape)
        for k, table in enumerate(self.tables):
            out *= table[_byte_index(masks, k)]
        return out


class SubsetSum:
    """``sums(masks)[i] == sum(values[v] for v in masks[i])``."""

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        self.n = len(values)
        self.tables = []
        for k in range(_chunks(self.n)):
            table = np.zeros(_WIDTH)
            for b in range(_CHUNK):
                v = k * _CHUNK + b
                if v < self.n:
                    has = (np.arange(_WIDTH) >> b) & 1 == 1
                    table[has] += values[v]
            self.tables.append(table)

    def __call__(self, masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.uint64)
        out = np.zeros(masks.shape)
        for k, table in enumerate(self.tables):
            out += table[_byte_index(masks, k)]
        return out


class NeighborUnion:
    """``union(masks)[i]`` is the union of ``adjacency[v]`` over ``v`` in ``masks[i]``."""

    def __init__(self, adjacency):
        self.n = len(adjacency)
        self.tables = []
        for k in range(_chunks(self.n)):
            table = np.zeros(_WIDTH, dtype=np.uint64)
            for b in range(_CHUNK):
                v = k * _CHUNK + b
                if v < self.n:
                    has = (np.arange(_WIDTH) >> b) & 1 == 1
                    table[has] |= np.uint64(adjacency[v])
            self.tables.append(table)

    def __call__(self, masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.uint64)
        out = np.zeros(masks.shape, dtype=np.uint64)
        for k, table in enumerate(self.tables):
            out |= table[_byte_index(masks, k)]
        return out


def bit_counts(masks: np.ndarray, n: int) -> np.ndarray:
    """Per-vertex occupancy counts summed over ``masks``."""
    masks = np.asarray(masks, dtype=np.uint64)
    return np.array([int(((masks >> np.uint64(v)) & np.uint64(1)).sum()) for v in range(n)], dtype=np.int64)
