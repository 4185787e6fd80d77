"""Command-line front end: ``pglauber <command> [options]``.

Every command is a pure function of its ``RunConfig``; the config is echoed
into JSON outputs so a run can be replayed with ``--config``.

Exit codes: 0 ok, 1 usage, 2 validation, 3 cap exceeded, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import io as pio
from .bounds import all_bounds
from .coupling import WeightFunction, coalescence_experiment
from .dynamics import (
    Fugacities,
    RandomGreedyDistribution,
    SingleSiteDistribution,
    local_minimum_schedule,
    require_valid,
    run_chain,
)
from .errors import CapExceededError, PGlauberError, ReducibleChainError
from .exact import MATRIX_CAP, build_matrix, check_detailed_balance, exact_mixing_time, product_form, tv_distance
from .graph import Graph, generate, load_edge_list
from .verify import run_verification

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_CAP, EXIT_VERIFY = 0, 1, 2, 3, 4
COMMANDS = ("simulate", "exact", "bounds", "couple", "verify", "generate")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    graph: str
    lam: str = "1.0"
    lam_default: float | None = None
    dist: str = "single-site"
    seed: int = 0
    epsilon: float = 0.01
    slots: int = 100_000
    burn_in: int = 0
    pairs: int = 1000
    cap: int = MATRIX_CAP
    weights: str | None = None
    trace: bool = False
    inject_fault: bool = False
    out: str | None = None
    format: str = "json"
    tv_csv: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> RunConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise UsageError(f"unknown config keys {sorted(unknown)}")
        return cls(**doc)


# -- config resolution --------------------------------------------------------


def _parse_scalar(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def resolve_graph(source: str, seed: int) -> Graph:
    """``gen:kind:k=v,...`` builds a generated graph; anything else is an edge-list path."""
    if source.startswith("gen:"):
        parts = source.split(":", 2)
        kind = parts[1]
        params = {}
        if len(parts) == 3 and parts[2]:
            for item in parts[2].split(","):
                key, sep, val = item.partition("=")
                if not sep:
                    raise UsageError(f"generator parameter {item!r} is not key=value")
                params[key.strip()] = _parse_scalar(val.strip())
        g = generate(kind, params, seed)
        return Graph(g.n, g.adjacency, source)
    path = Path(source)
    if not path.is_file():
        raise UsageError(f"graph file {source!r} not found (use gen:kind:k=v,... for generators)")
    g = load_edge_list(path.read_text(encoding="utf-8"))
    return Graph(g.n, g.adjacency, source)


def resolve_fugacities(source: str, g: Graph, default: float | None) -> Fugacities:
    try:
        value = float(source)
    except ValueError:
        path = Path(source)
        if not path.is_file():
            raise UsageError(f"--lambda {source!r} is neither a number nor a file") from None
        return pio.load_fugacities(path.read_text(encoding="utf-8"), g.n, default)
    return Fugacities.uniform(g.n, value)


def resolve_distribution(source: str, g: Graph, fug: Fugacities):
    if source == "single-site":
        return SingleSiteDistribution.uniform(g.n)
    if source == "fugacity-weighted":
        return SingleSiteDistribution.fugacity_weighted(fug)
    if source == "local-min":
        return local_minimum_schedule(g)
    if source.startswith("greedy:"):
        try:
            a = float(source.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad activation in {source!r}") from None
        return RandomGreedyDistribution.uniform(g.n, a)
    if Path(source).is_file():
        return pio.load_distribution(source, g)
    raise UsageError(f"--dist {source!r}: expected single-site, fugacity-weighted, local-min, greedy:a or a file")


def resolve_weights(source: str | None, n: int) -> WeightFunction | None:
    if source is None:
        return None
    path = Path(source)
    text = path.read_text(encoding="utf-8") if path.is_file() else source.replace(",", " ")
    values = [float(x) for x in text.split()]
    if len(values) != n:
        raise UsageError(f"--weights needs {n} values, got {len(values)}")
    return WeightFunction(tuple(values))


def build_instance(cfg: RunConfig):
    g = resolve_graph(cfg.graph, cfg.seed)
    fug = resolve_fugacities(cfg.lam, g, cfg.lam_default)
    dist = resolve_distribution(cfg.dist, g, fug)
    require_valid(dist, g)
    return g, fug, dist


# -- commands -----------------------------------------------------------------


def _envelope(cfg: RunConfig, g: Graph, result) -> dict:
    return {"config": cfg.to_dict(), "graph": {"n": g.n, "edges": [list(e) for e in g.edges]}, "result": result}


def cmd_simulate(cfg: RunConfig) -> tuple[str, int]:
    g, fug, dist = build_instance(cfg)
    trace = cfg.trace or cfg.format == "csv"
    summary = run_chain(g, fug, dist, cfg.slots, cfg.seed, cfg.burn_in, trace=trace, cap=cfg.cap)
    if cfg.format == "csv":
        return pio.rows_to_csv(["slot", "bitmask"], summary.trace), EXIT_OK
    result = pio.summary_to_dict(summary)
    if summary.counts is not None and summary.recorded > 0:
        sd = product_form(g, fug, cfg.cap)
        emp = summary.empirical()
        result["tv_to_product_form"] = tv_distance([emp.get(s, 0.0) for s in sd.omega], sd.pi)
    return pio.dumps(_envelope(cfg, g, result)), EXIT_OK


def cmd_exact(cfg: RunConfig) -> tuple[str, int]:
    g, fug, dist = build_instance(cfg)
    sd = product_form(g, fug, cfg.cap)
    tm = build_matrix(g, fug, dist, cfg.cap)
    db = check_detailed_balance(tm.P, sd.pi)
    result = {"omega": sd.omega, "Z": sd.Z, "pi": sd.pi.tolist(), "detailed_balance": db.to_dict()}
    try:
        mix = exact_mixing_time(tm.P, sd.pi, cfg.epsilon, tm.omega)
        result.update(mix.to_dict())
    except ReducibleChainError as exc:
        result.update({"epsilon": cfg.epsilon, "t_mix": None, "reason": str(exc)})
        mix = None
    if cfg.tv_csv and mix is not None:
        Path(cfg.tv_csv).write_text(pio.rows_to_csv(["t", "tv"], enumerate(mix.tv_curve)), encoding="utf-8")
    return pio.dumps(_envelope(cfg, g, result)), EXIT_OK


def cmd_bounds(cfg: RunConfig) -> tuple[str, int]:
    g, fug, dist = build_instance(cfg)
    f = resolve_weights(cfg.weights, g.n)
    reports = [r.to_dict() for r in all_bounds(g, fug, dist, cfg.epsilon, f)]
    if cfg.format == "csv":
        rows = [(r["formula"], r["applicable"], r["bound"], r["beta"], r["D"], r.get("reason", "")) for r in reports]
        return pio.rows_to_csv(["formula", "applicable", "bound", "beta", "D", "reason"], rows), EXIT_OK
    return pio.dumps(_envelope(cfg, g, reports)), EXIT_OK


def cmd_couple(cfg: RunConfig) -> tuple[str, int]:
    g, fug, dist = build_instance(cfg)
    f = resolve_weights(cfg.weights, g.n)
    res = coalescence_experiment(g, fug, dist, cfg.pairs, cfg.slots, cfg.seed, f)
    if cfg.format == "csv":
        return pio.rows_to_csv(["slot", "coalesced_fraction", "mean_phi"], res.rows()), EXIT_OK
    result = {
        "pairs": res.pairs,
        "coalesced_fraction": res.coalesced_fraction,
        "mean_phi": res.mean_phi,
        "coalescence_times": res.coalescence_times.tolist(),
    }
    return pio.dumps(_envelope(cfg, g, result)), EXIT_OK


def cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    g, fug, dist = build_instance(cfg)
    checks = run_verification(g, fug, dist, cfg.seed, cfg.epsilon, cfg.inject_fault, cfg.cap)
    code = EXIT_OK if all(c.holds for c in checks) else EXIT_VERIFY
    return pio.dumps([c.to_dict() for c in checks]), code


def cmd_generate(cfg: RunConfig) -> tuple[str, int]:
    g = resolve_graph(cfg.graph, cfg.seed)
    return g.to_edge_list(), EXIT_OK


HANDLERS = {
    "simulate": cmd_simulate,
    "exact": cmd_exact,
    "bounds": cmd_bounds,
    "couple": cmd_couple,
    "verify": cmd_verify,
    "generate": cmd_generate,
}


def run(cfg: RunConfig) -> tuple[str, int]:
    """Execute a config and return (output text, exit code)."""
    if cfg.command not in HANDLERS:
        raise UsageError(f"unknown command {cfg.command!r}")
    if not 0.0 < cfg.epsilon < 1.0:
        raise UsageError(f"epsilon must lie in (0, 1), got {cfg.epsilon}")
    if cfg.format not in ("json", "csv"):
        raise UsageError(f"format must be json or csv, got {cfg.format!r}")
    if min(cfg.slots, cfg.burn_in) < 0 or cfg.pairs < 1 or cfg.cap < 1:
        raise UsageError("slots, burn-in must be >= 0; pairs, cap must be >= 1")
    return HANDLERS[cfg.command](cfg)


# -- argument parsing ---------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _epsilon(text: str) -> float:
    x = float(text)
    if not (math.isfinite(x) and 0.0 < x < 1.0):
        raise argparse.ArgumentTypeError(f"epsilon must lie in (0, 1), got {text}")
    return x


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pglauber", description="Parallel Glauber dynamics on weighted independent sets.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "simulate": "run the chain and summarize visits",
        "exact": "stationary law, transition matrix and exact mixing time",
        "bounds": "evaluate every closed-form mixing bound",
        "couple": "coupled-chain coalescence experiment",
        "verify": "invariant sweep; exit 4 on any violation",
        "generate": "print a generated graph as an edge list",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", help="replay a RunConfig JSON (other flags are ignored)")
        p.add_argument("--graph", help="edge-list file or gen:kind:k=v,...")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write output here instead of stdout")
        if name == "generate":
            continue
        p.add_argument("--lambda", dest="lam", default="1.0", help="uniform fugacity or a 'v lambda' file")
        p.add_argument("--lambda-default", dest="lam_default", type=float, help="fugacity for vertices missing from the file")
        p.add_argument("--dist", default="single-site",
                       help="single-site | fugacity-weighted | local-min | greedy:a | JSON file")
        p.add_argument("--eps", dest="epsilon", type=_epsilon, default=0.01)
        p.add_argument("--cap", type=int, default=MATRIX_CAP, help="state-space cap for exact work")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        if name in ("simulate", "couple"):
            p.add_argument("--slots", type=int, default=100_000 if name == "simulate" else 200)
        if name == "simulate":
            p.add_argument("--burn-in", type=int, default=0)
            p.add_argument("--trace", action="store_true", help="include the full (slot, bitmask) trace")
        if name in ("bounds", "couple"):
            p.add_argument("--weights", help="per-vertex weights f (comma list or file)")
        if name == "couple":
            p.add_argument("--pairs", type=int, default=1000)
        if name == "exact":
            p.add_argument("--tv-csv", help="also write the TV curve as CSV (t, tv)")
        if name == "verify":
            p.add_argument("--inject-fault", action="store_true", help="perturb one matrix entry by 1e-3")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.config:
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        doc = doc.get("config", doc)
        cfg = RunConfig.from_dict(doc)
        if cfg.command != args.command:
            raise UsageError(f"config is for {cfg.command!r}, not {args.command!r}")
        return cfg
    if not args.graph:
        raise UsageError("--graph is required")
    known = {f.name for f in fields(RunConfig)}
    values = {k: v for k, v in vars(args).items() if k in known and v is not None}
    return RunConfig(**values)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        cfg = config_from_args(args)
        text, code = run(cfg)
    except UsageError as exc:
        print(f"pglauber: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceededError as exc:
        print(f"pglauber: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (PGlauberError, ValueError, OSError) as exc:
        print(f"pglauber: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
