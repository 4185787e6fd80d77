"""Invariant sweep for one instance, used by the ``verify`` command.

Each check records the worst observed left-hand side against its allowed
right-hand side. A sweep is exhaustive where the instance is small enough
and falls back to seeded random samples otherwise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .bounds import all_bounds
from .coupling import WeightFunction, exact_adjacent_drift, random_feasible, sequential_update
from .dynamics import (
    Fugacities,
    UpdateSetDistribution,
    _step_unchecked,
    as_explicit,
    marginals_of,
    sample_update_set,
    validate,
)
from .errors import CapExceededError
from .exact import build_matrix, check_detailed_balance, exact_mixing_time, is_aperiodic, is_irreducible, product_form
from .graph import Graph, enumerate_independent_sets, is_independent, members, popcount
from .vigoda import LEMMA_MAX_N, VigodaMetric, lemma5_check, theorem5_a

EXHAUSTIVE_OMEGA = 512
LEMMA3_MAX_SET = 4


@dataclass
class Check:
    context: str
    lhs: float
    rhs: float
    holds: bool

    def to_dict(self) -> dict:
        return {"context": self.context, "lhs": self.lhs, "rhs": self.rhs, "holds": self.holds}


def _le(context: str, lhs: float, rhs: float, tol: float = 0.0) -> Check:
    return Check(context, float(lhs), float(rhs), bool(lhs <= rhs + tol))


def _configs(g: Graph, rng: np.random.Generator, samples: int) -> tuple[list[int], bool]:
    try:
        return enumerate_independent_sets(g, EXHAUSTIVE_OMEGA), True
    except CapExceededError:
        return sorted(set(int(x) for x in random_feasible(g, rng, samples))), False


def _small_independent_sets(g: Graph, k: int) -> list[int]:
    out = []
    for size in range(1, k + 1):
        for combo in itertools.combinations(range(g.n), size):
            m = sum(1 << v for v in combo)
            if is_independent(g, m):
                out.append(m)
    return out


def run_verification(
    g: Graph,
    fug: Fugacities,
    dist: UpdateSetDistribution,
    seed: int = 0,
    epsilon: float = 0.01,
    inject_fault: bool = False,
    cap: int = 4096,
    samples: int = 2000,
) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks: list[Check] = []
    report = validate(dist, g)
    checks.append(_le("update sets independent and normalized",
                      0 if report.independent and report.normalized else 1, 0))
    if not (report.independent and report.normalized):
        return checks

    configs, exhaustive = _configs(g, rng, samples)
    scope = "exhaustive" if exhaustive else f"{len(configs)} sampled configurations"

    # feasibility is preserved by every slot
    bad = 0
    for _ in range(samples):
        sigma = configs[int(rng.integers(len(configs)))]
        m = sample_update_set(dist, g, rng)
        out = _step_unchecked(g.adjacency, fug.p, sigma, m, rng.random(popcount(m)).tolist())
        bad += not is_independent(g, out)
    checks.append(_le(f"feasibility preserved ({samples} random slots)", bad, 0))

    # simultaneous update of an independent set equals any sequential order
    small = _small_independent_sets(g, LEMMA3_MAX_SET) if g.n <= 12 else []
    mismatches = tried = 0
    for sigma in configs[:64]:
        for m in small:
            verts = members(m)
            coins = rng.random(len(verts)).tolist()
            together = _step_unchecked(g.adjacency, fug.p, sigma, m, coins)
            coin_of = dict(zip(verts, coins))
            for order in itertools.permutations(verts):
                tried += 1
                mismatches += sequential_update(g, fug, sigma, order, coin_of) != together
    checks.append(_le(f"simultaneous = sequential updates ({tried} orderings)", mismatches, 0))

    # adjacent-pair drift never exceeds the neighbor bound
    q = marginals_of(as_explicit(dist, g), g) if g.n <= 16 else marginals_of(dist, g)
    if (q > 0).all():
        f = WeightFunction(tuple(1.0 / q))
        worst, where = -math.inf, ""
        for sigma in configs:
            for v in range(g.n):
                if sigma >> v & 1 or g.adjacency[v] & sigma:
                    continue
                d = exact_adjacent_drift(g, fug, dist, f, sigma, v)
                if d.exact - d.rhs > worst:
                    worst, where = d.exact - d.rhs, f"sigma={sigma} v={v}"
        if worst > -math.inf:
            checks.append(_le(f"adjacent drift <= neighbor bound ({scope}; worst at {where})", worst, 0.0, 1e-9))

    # refined single-site drift with the blocked-neighbor metric
    if g.n <= LEMMA_MAX_N and theorem5_a(g, fug) < 2:
        metric = VigodaMetric(g, fug)
        cube = range(1 << g.n) if g.n <= 8 else [int(x) for x in rng.integers(0, 1 << g.n, 200)]
        worst, where = -math.inf, ""
        for sigma in cube:
            for v in range(g.n):
                if sigma >> v & 1:
                    continue
                r = lemma5_check(g, fug, sigma, v, metric)
                if r.lhs - r.rhs > worst:
                    worst, where = r.lhs - r.rhs, f"sigma={sigma} v={v}"
        if worst > -math.inf:
            checks.append(_le(f"blocked-neighbor drift inequality (worst at {where})", worst, 0.0, 1e-9))

    # exact matrix checks
    try:
        tm = build_matrix(g, fug, dist, cap)
    except CapExceededError:
        return checks
    sd = product_form(g, fug, cap)
    P = tm.P.copy()
    if inject_fault and P.shape[0] > 1:
        P[0, 1] += 1e-3
    checks.append(_le("row sums equal 1", float(np.abs(P.sum(axis=1) - 1).max()), 0.0, 1e-12))
    db = check_detailed_balance(P, sd.pi)
    checks.append(_le(f"detailed balance (worst pair {db.pair})", db.max_violation, 0.0, 1e-12))
    checks.append(_le("product form is stationary", float(np.abs(sd.pi @ P - sd.pi).max()), 0.0, 1e-10))

    if not inject_fault and report.covers_all and is_irreducible(P) and is_aperiodic(P):
        bounds = [b for b in all_bounds(g, fug, dist, epsilon) if b.applicable]
        if bounds:
            t_mix = exact_mixing_time(P, sd.pi, epsilon, tm.omega).t_mix
            for b in bounds:
                checks.append(_le(f"exact t_mix <= ceil({b.formula} bound)", t_mix, math.ceil(b.bound)))
    return checks
