"""Closed-form mixing-time bounds from path coupling.

Every calculator returns a ``BoundReport``. Logs are natural; bounds are real
numbers and only get rounded up when compared with an integer mixing time.
Applicability conditions are strict inequalities, so equality is reported as
inapplicable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coupling import WeightFunction
from .dynamics import Fugacities, SingleSiteDistribution, marginals_of
from .errors import ValidationError
from .graph import Graph, members


@dataclass
class BoundReport:
    formula: str
    applicable: bool
    epsilon: float
    bound: float = math.inf
    beta: float | None = None
    D: float | None = None
    params: dict = field(default_factory=dict)
    reason: str = ""
    extras: dict = field(default_factory=dict)

    def slots(self) -> int | None:
        """Bound rounded up to whole slots, or ``None`` if inapplicable."""
        return math.ceil(self.bound) if self.applicable else None

    def to_dict(self) -> dict:
        out = {"formula": self.formula, "applicable": self.applicable}
        if self.reason:
            out["reason"] = self.reason
        out.update(self.params)
        out["beta"] = self.beta
        out["D"] = self.D
        out["bound"] = self.bound if self.applicable else None
        out["epsilon"] = self.epsilon
        out.update(self.extras)
        return out


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise ValidationError(f"epsilon must lie in (0, 1), got {epsilon}")


def _occupation(fug: Fugacities) -> np.ndarray:
    lam = fug.array()
    return lam / (1.0 + lam)


def theta(g: Graph, fug: Fugacities, q, f: WeightFunction) -> float:
    """``min_v [q_v f(v) - sum_{w ~ v} q_w f(w) lambda_w / (1 + lambda_w)]``."""
    q = np.asarray(q, dtype=float)
    load = q * _occupation(fug) * f.array()
    return float(min((q[v] * f.f[v] - sum(load[w] for w in members(g.adjacency[v])) for v in range(g.n)),
                     default=math.inf))


def theorem4_bound(g: Graph, fug: Fugacities, dist, f: WeightFunction, epsilon: float,
                   formula: str = "theorem4") -> BoundReport:
    """``(M_f / theta) log(n xi / epsilon)`` for a weight function ``f`` when ``theta > 0``.

    ``dist`` may be an update-set distribution or a vector of marginals ``q_v``.
    """
    _check_epsilon(epsilon)
    q = marginals_of(dist, g)
    th = theta(g, fug, q, f)
    params = {"theta": th, "M": f.M_f, "m": f.m_f, "xi": f.xi}
    if not th > 0:
        return BoundReport(formula, False, epsilon, params=params, reason=f"theta = {th:.6g} is not > 0")
    D = g.n * f.xi
    bound = f.M_f / th * math.log(D / epsilon)
    return BoundReport(formula, True, epsilon, bound, 1.0 - th / f.M_f, D, params)


def _require_positive_q(q: np.ndarray, formula: str, epsilon: float) -> BoundReport | None:
    zero = [v for v in range(len(q)) if not q[v] > 0]
    if zero:
        return BoundReport(formula, False, epsilon, reason=f"q_v = 0 for vertices {zero}")
    return None


def corollary1_bound(g: Graph, fug: Fugacities, dist, epsilon: float) -> BoundReport:
    """Weights ``f(v) = (1 + lambda_v) / q_v``; needs ``1 + lambda_v > sum_{w ~ v} lambda_w``."""
    _check_epsilon(epsilon)
    q = marginals_of(dist, g)
    bad = _require_positive_q(q, "corollary1", epsilon)
    if bad:
        return bad
    lam = fug.array()
    report = theorem4_bound(g, fug, q, WeightFunction(tuple((1.0 + lam) / q)), epsilon, "corollary1")
    if not report.applicable:
        report.reason = f"min_v (1 + lambda_v - sum of neighbor fugacities) = {report.params['theta']:.6g} is not > 0"
    return report


def neighbor_occupation_max(g: Graph, fug: Fugacities) -> float:
    """``b = max_v sum_{w ~ v} lambda_w / (1 + lambda_w)``."""
    occ = _occupation(fug)
    return float(max((sum(occ[w] for w in members(nb)) for nb in g.adjacency), default=0.0))


def corollary2_bound(g: Graph, fug: Fugacities, dist, epsilon: float) -> BoundReport:
    """Weights ``f(v) = 1 / q_v``: ``log(n xi / eps) / (q_min (1 - b))`` when ``b < 1``."""
    _check_epsilon(epsilon)
    q = marginals_of(dist, g)
    b = neighbor_occupation_max(g, fug)
    bad = _require_positive_q(q, "corollary2", epsilon)
    if bad:
        bad.params["b"] = b
        return bad
    q_min, q_max = float(q.min()), float(q.max())
    params = {"b": b, "q_min": q_min, "q_max": q_max, "xi": q_max / q_min}
    if not b < 1:
        return BoundReport("corollary2", False, epsilon, params=params, reason=f"b = {b:.6g} is not < 1")
    D = g.n * q_max / q_min
    bound = math.log(D / epsilon) / (q_min * (1.0 - b))
    return BoundReport("corollary2", True, epsilon, bound, 1.0 - q_min * (1.0 - b), D, params)


def remark2_bound(g: Graph, fug: Fugacities, epsilon: float) -> float:
    """Degree-only form ``(Delta+1)/(1-b) log((Delta+1)/(delta+1) n / eps)`` for ``q_v = 1/(d_v+1)``."""
    _check_epsilon(epsilon)
    b = neighbor_occupation_max(g, fug)
    if not b < 1:
        return math.inf
    hi, lo = g.max_degree + 1, g.min_degree + 1
    return hi / (1.0 - b) * math.log(hi / lo * g.n / epsilon)


def degree_marginals(g: Graph) -> np.ndarray:
    return np.array([1.0 / (d + 1) for d in g.degrees])


def corollary3_bound(g: Graph, fug: Fugacities, dist, epsilon: float) -> BoundReport:
    """Weights ``f(v) = d_v / q_v``; sufficient condition ``lambda_v < 1/(d_v - 1)``.

    Graphs with an isolated vertex are rejected (the weight would be zero);
    use ``corollary2_bound`` there. Degree-one vertices carry no constraint.
    """
    _check_epsilon(epsilon)
    isolated = [v for v, d in enumerate(g.degrees) if d == 0]
    if isolated:
        return BoundReport("corollary3", False, epsilon,
                           reason=f"isolated vertices {isolated} make f(v) = d_v/q_v zero; use corollary2")
    q = marginals_of(dist, g)
    bad = _require_positive_q(q, "corollary3", epsilon)
    if bad:
        return bad
    d = np.array(g.degrees, dtype=float)
    lam = fug.array()
    limits = [math.inf if dv == 1 else 1.0 / (dv - 1) for dv in g.degrees]
    per_vertex = [bool(lam[v] < limits[v]) for v in range(g.n)]
    report = theorem4_bound(g, fug, q, WeightFunction(tuple(d / q)), epsilon, "corollary3")
    report.extras = {
        "sufficient_condition": all(per_vertex),
        "sufficient_per_vertex": per_vertex,
    }
    if not report.applicable:
        report.reason = f"min_v (d_v - sum_w d_w lambda_w/(1+lambda_w)) = {report.params['theta']:.6g} is not > 0"
    return report


@dataclass
class Theorem5Params:
    a: float
    gamma: float
    q: np.ndarray
    neighbor_sums: list[float]


def theorem5_params(g: Graph, fug: Fugacities) -> Theorem5Params:
    """``a`` = largest neighbor fugacity sum, ``gamma = sum_y (1 + lambda_y)``, ``q_y = (1 + lambda_y)/gamma``."""
    sums = [float(sum(fug.lam[w] for w in members(nb))) for nb in g.adjacency]
    lam = fug.array()
    gamma = float((1.0 + lam).sum())
    return Theorem5Params(max(sums, default=0.0), gamma, (1.0 + lam) / gamma, sums)


def theorem5_distribution(fug: Fugacities) -> SingleSiteDistribution:
    return SingleSiteDistribution.fugacity_weighted(fug)


def _is_fugacity_weighted(dist, g: Graph, tp: Theorem5Params) -> bool:
    if not isinstance(dist, SingleSiteDistribution):
        return False
    return bool(np.allclose(dist.weights, tp.q, rtol=0, atol=1e-12))


def theorem5_bound(g: Graph, fug: Fugacities, epsilon: float, dist=None) -> BoundReport:
    """Single-site bound ``gamma/(1 - a/2) log(n (1 + a/2) / eps)`` when ``a < 2``.

    Holds for the chain that selects vertex ``y`` with probability
    ``(1 + lambda_y)/gamma``; if ``dist`` is given and is any other schedule
    the report is inapplicable. The coarser ``3n/(1 - a/2) log(2n/eps)`` is
    added when ``gamma <= 3n``.
    """
    _check_epsilon(epsilon)
    tp = theorem5_params(g, fug)
    a, gamma = tp.a, tp.gamma
    params = {"a": a, "gamma": gamma}
    if dist is not None and not _is_fugacity_weighted(dist, g, tp):
        return BoundReport("theorem5", False, epsilon, params=params,
                           reason="schedule is not single-site with q_y = (1 + lambda_y)/gamma")
    if not a < 2:
        worst = [v for v, s in enumerate(tp.neighbor_sums) if not s < 2]
        return BoundReport("theorem5", False, epsilon, params=params,
                           reason=f"a = {a:.6g} is not < 2 (vertices {worst})")
    n = g.n
    D = n * (1.0 + a / 2.0)
    bound = gamma / (1.0 - a / 2.0) * math.log(D / epsilon)
    report = BoundReport("theorem5", True, epsilon, bound, 1.0 + (-1.0 + a / 2.0) / gamma, D, params)
    if gamma <= 3 * n:
        report.extras["loose_bound"] = 3 * n / (1.0 - a / 2.0) * math.log(2.0 * n / epsilon)
    return report


def all_bounds(g: Graph, fug: Fugacities, dist, epsilon: float, f: WeightFunction | None = None) -> list[BoundReport]:
    """Every calculator on one instance; ``f`` defaults to unit weights for the general form."""
    f = f or WeightFunction.uniform(g.n)
    return [
        theorem4_bound(g, fug, dist, f, epsilon),
        corollary1_bound(g, fug, dist, epsilon),
        corollary2_bound(g, fug, dist, epsilon),
        corollary3_bound(g, fug, dist, epsilon),
        theorem5_bound(g, fug, epsilon, dist),
    ]
