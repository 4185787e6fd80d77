"""Text formats: fugacity files, update-set distribution documents, reports."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .dynamics import (
    ChainSummary,
    ExplicitDistribution,
    Fugacities,
    RandomGreedyDistribution,
    SingleSiteDistribution,
    UpdateSetDistribution,
)
from .errors import GraphFormatError, ValidationError
from .graph import Graph, mask_of, members


def load_fugacities(text: str, n: int, default: float | None = None) -> Fugacities:
    """Parse ``v lambda_v`` lines; vertices not listed get ``default``."""
    lam: list[float | None] = [default] * n
    for lineno, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split()
        if len(parts) != 2:
            raise GraphFormatError(f"fugacity line {lineno}: expected 'v lambda', got {s!r}")
        try:
            v, x = int(parts[0]), float(parts[1])
        except ValueError:
            raise GraphFormatError(f"fugacity line {lineno}: cannot parse {s!r}") from None
        if not 0 <= v < n:
            raise GraphFormatError(f"fugacity line {lineno}: vertex {v} out of range")
        if not (math.isfinite(x) and x > 0):
            raise ValidationError(f"fugacity line {lineno}: lambda must be positive, got {x}")
        lam[v] = x
    missing = [v for v, x in enumerate(lam) if x is None]
    if missing:
        raise ValidationError(f"no fugacity for vertices {missing} and no default given")
    return Fugacities(tuple(lam))


def distribution_from_dict(doc: dict, g: Graph) -> UpdateSetDistribution:
    """Build a distribution from its JSON document form."""
    variant = doc.get("variant")
    if variant == "explicit":
        sets, probs = [], []
        for entry in doc.get("sets", []):
            verts = entry["vertices"]
            if any(not 0 <= int(v) < g.n for v in verts):
                raise ValidationError(f"update set {verts} has a vertex out of range")
            sets.append(mask_of(verts))
            probs.append(float(entry["q"]))
        return ExplicitDistribution(tuple(sets), tuple(probs))
    if variant == "single_site":
        weights = doc.get("weights")
        return SingleSiteDistribution(tuple(weights)) if weights else SingleSiteDistribution.uniform(g.n)
    if variant == "random_greedy":
        act = doc.get("activation")
        if act is None:
            raise ValidationError("random_greedy needs an activation list")
        if isinstance(act, (int, float)):
            act = [act] * g.n
        return RandomGreedyDistribution(tuple(act))
    raise ValidationError(f"unknown distribution variant {variant!r}")


def distribution_to_dict(dist: UpdateSetDistribution) -> dict:
    if isinstance(dist, ExplicitDistribution):
        return {"variant": "explicit",
                "sets": [{"vertices": members(s), "q": q} for s, q in dist.pairs()]}
    if isinstance(dist, SingleSiteDistribution):
        return {"variant": "single_site", "weights": list(dist.weights)}
    return {"variant": "random_greedy", "activation": list(dist.activation)}


def load_distribution(path: str | Path, g: Graph) -> UpdateSetDistribution:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    return distribution_from_dict(doc, g)


def dumps(obj) -> str:
    """JSON with shortest round-trip float repr and a trailing newline."""
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def summary_to_dict(summary: ChainSummary) -> dict:
    out = {
        "n": summary.n,
        "slots": summary.slots,
        "burn_in": summary.burn_in,
        "seed": summary.seed,
        "recorded": summary.recorded,
        "final": summary.final,
        "occupancy": [int(x) for x in summary.occupancy],
        "occupancy_fraction": [float(x) for x in summary.occupancy_fraction()],
    }
    if summary.counts is not None:
        out["counts"] = {str(s): c for s, c in summary.counts.items()}
        out["empirical"] = {str(s): p for s, p in summary.empirical().items()}
    return out


def rows_to_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()
