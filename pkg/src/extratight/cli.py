"""Command-line front end.

    extratight verify SEQ [--host GRAPH]
    extratight search {tour,trail,johnson,diameter} ...
    extratight construct --n N --d D
    extratight plan --n N --d D
    extratight sample {walk,paths,decomp,fractional} ...

Exit codes: 0 success, 1 negative result, 2 input error, 3 budget exceeded.
Every report echoes the run configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

from .complex import certify_extremal, hs_bound
from .divisibility import tour_feasible
from .hypergraph import DGraph, GraphFormatError, ParameterError, complete, load_graph
from .trails import SequenceFormatError, facets_of, load_sequence, validate

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("extratight")


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    budget_secs: Optional[float] = None
    budget_nodes: Optional[int] = None
    mode: str = "exhaustive"
    format: str = "json"
    threads: int = 1
    params: dict = field(default_factory=dict)

    def budget(self):
        from .search import SearchBudget

        return SearchBudget(self.budget_secs, self.budget_nodes, self.mode)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget-secs", type=float, default=None, help="wall-clock cap for searches")
    p.add_argument("--budget-nodes", type=int, default=None, help="expansion cap for searches")
    p.add_argument("--mode", choices=("exhaustive", "first"), default="exhaustive")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.add_argument("--threads", type=int, default=1, help="worker cap (searches are single-threaded)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="extratight", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="validate a vertex sequence")
    p.add_argument("path", help="sequence file: 'd k open|closed' then k labels")
    p.add_argument("--host", default=None, help="host graph JSON (default: K_n, n = largest label)")

    p = sub.add_parser("search", help="exact searches")
    ss = p.add_subparsers(dest="kind", required=True)
    q = ss.add_parser("tour", parents=[common])
    q.add_argument("--n", type=int)
    q.add_argument("--d", type=int, default=2)
    q.add_argument("--host", default=None)
    q.add_argument("--no-precheck", action="store_true")
    q = ss.add_parser("trail", parents=[common])
    q.add_argument("--n", type=int)
    q.add_argument("--d", type=int, default=2)
    q.add_argument("--host", default=None)
    q.add_argument("--start", required=True, help="comma-separated first d labels")
    q.add_argument("--finish", required=True, help="comma-separated last d labels, in trail order")
    q = ss.add_parser("johnson", parents=[common])
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--k", type=int, required=True)
    q = ss.add_parser("diameter", parents=[common])
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--d", type=int, default=2)

    p = sub.add_parser("construct", parents=[common], help="build and certify a large-diameter complex")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=2)

    p = sub.add_parser("plan", parents=[common], help="turn plan: short complex plus residual graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--method", choices=("direct", "sweep"), default="direct")

    p = sub.add_parser("sample", help="random walk experiments")
    ss = p.add_subparsers(dest="kind", required=True)
    q = ss.add_parser("walk", parents=[common])
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--d", type=int, default=2)
    q.add_argument("--steps", type=int, default=1_000_000)
    q.add_argument("--offsets", default=None, help="comma-separated window offsets, e.g. 0,2")
    q = ss.add_parser("paths", parents=[common])
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--d", type=int, default=2)
    q.add_argument("--t", type=int, required=True)
    q.add_argument("--size", type=int, default=10_000)
    q = ss.add_parser("decomp", parents=[common])
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--d", type=int, default=2)
    q.add_argument("--t", type=int, required=True)
    q.add_argument("--gamma", type=float, default=0.25)
    q = ss.add_parser("fractional", parents=[common])
    q.add_argument("--n", type=int)
    q.add_argument("--d", type=int, default=2)
    q.add_argument("--host", default=None)
    q.add_argument("--mu", type=float, default=0.9)
    return parser


# --------------------------------------------------------------------------


def _host(args) -> DGraph:
    if getattr(args, "host", None):
        return load_graph(args.host)
    if args.n is None:
        raise ParameterError("give --n or --host")
    return complete(args.n, args.d)


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ParameterError(f"bad label list {text!r}") from exc


def _search_code(status: str) -> int:
    return {"found": EXIT_OK, "none": EXIT_NEGATIVE, "timeout": EXIT_BUDGET}[status]


def cmd_verify(args, cfg: RunConfig) -> tuple[int, dict]:
    seq = load_sequence(args.path)
    if args.host:
        host = load_graph(args.host)
    else:
        host = complete(max(max(seq.entries, default=seq.d), seq.d), seq.d)
    report = validate(seq, host)
    out = report.to_json()
    if report.valid:
        out["covers_host"] = len(report.edges) == len(host)
    return (EXIT_OK if report.valid else EXIT_NEGATIVE), out


def cmd_search(args, cfg: RunConfig) -> tuple[int, dict]:
    from . import search

    budget = cfg.budget()
    if args.kind == "tour":
        res = search.find_euler_tour(_host(args), budget, use_precheck=not args.no_precheck)
    elif args.kind == "trail":
        res = search.find_euler_trail(_host(args), _ints(args.start), _ints(args.finish), budget)
    elif args.kind == "johnson":
        res = search.johnson_longest_induced_path(args.n, args.k, budget)
    else:
        res = search.max_diameter_complex(args.n, args.d, budget)
    out = res.to_json()
    out["length"] = res.value
    return _search_code(res.status), out


def cmd_construct(args, cfg: RunConfig) -> tuple[int, dict]:
    """Tour route when the degrees allow it, Johnson route otherwise."""
    from . import search

    n, d = args.n, args.d
    budget = cfg.budget()
    route, notes = "johnson", []
    G = complete(n, d)
    if tour_feasible(G).feasible and (len(G) % d == 0):
        res = search.find_euler_tour(G, budget)
        notes.append(f"tour search: {res.status} {res.reason}".strip())
        if res.status == "found":
            C = facets_of(res.witness)
            facet = C.sorted_facets()[0]
            F = C.without(facet)
            cert = certify_extremal(F)
            return EXIT_OK, {"route": "tour", "tour": list(res.witness.entries), "deleted": list(facet),
                             "complex": F.to_json(), "certificate": cert.to_json(), "notes": notes}
    res = search.max_diameter_complex(n, d, budget)
    cert = certify_extremal(res.witness)
    out = {"route": route, "complex": res.witness.to_json(), "certificate": cert.to_json(),
           "status": res.status, "length": res.value, "bound": hs_bound(n, d), "notes": notes}
    return (EXIT_BUDGET if res.status == "timeout" else EXIT_OK), out


def cmd_plan(args, cfg: RunConfig) -> tuple[int, dict]:
    from .surgery import InfeasibleError, plan_turn_sequence

    try:
        plan = plan_turn_sequence(args.n, args.d, method=args.method)
    except InfeasibleError as exc:
        return EXIT_NEGATIVE, {"status": "infeasible", "reason": str(exc)}
    out = plan.to_json()
    out["status"] = "ok" if plan.residues.feasible else "residues-fail"
    return (EXIT_OK if plan.residues.feasible else EXIT_NEGATIVE), out


def cmd_sample(args, cfg: RunConfig) -> tuple[int, dict]:
    from . import randwalk

    if args.kind == "fractional":
        x = randwalk.fractional_decomposition(_host(args), mu=args.mu)
        return EXIT_OK, x.to_json()
    G = complete(args.n, args.d)
    if args.kind == "decomp":
        pack = randwalk.greedy_approx_decomposition(G, args.t, args.gamma, cfg.seed)
        out = pack.to_json()
        out["target"] = args.gamma * args.n
        out["ok"] = pack.max_codegree() <= args.gamma * args.n
        return (EXIT_OK if out["ok"] else EXIT_NEGATIVE), out
    x = randwalk.fractional_decomposition(G)
    if args.kind == "walk":
        offsets = _ints(args.offsets) if args.offsets else None
        rep = randwalk.stationarity_check(G, x, args.steps, cfg.seed, offsets)
        return (EXIT_OK if rep.ok else EXIT_NEGATIVE), rep.to_json()
    got = randwalk.sample_paths(G, x, args.t, args.size, cfg.seed)
    return EXIT_OK, {"tried": got.tried, "accepted": len(got.paths), "acceptance": got.acceptance,
                     "first": [int(v) for v in got.paths[0]] if len(got.paths) else None}


COMMANDS = {"verify": cmd_verify, "search": cmd_search, "construct": cmd_construct,
            "plan": cmd_plan, "sample": cmd_sample}


def _text(obj, indent: str = "") -> str:
    lines = []
    for k, v in obj.items():
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines.append(_text(v, indent + "  "))
        else:
            lines.append(f"{indent}{k}: {json.dumps(v)}")
    return "\n".join(lines)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    params = {k: v for k, v in vars(args).items()
              if k not in ("seed", "budget_secs", "budget_nodes", "mode", "format", "out", "threads", "verbose")}
    name = args.command + (f" {args.kind}" if getattr(args, "kind", None) else "")
    cfg = RunConfig(name, args.seed, args.budget_secs, args.budget_nodes, args.mode, args.format,
                    args.threads, params)
    try:
        code, report = COMMANDS[args.command](args, cfg)
    except (ParameterError, GraphFormatError, SequenceFormatError, OSError, json.JSONDecodeError) as exc:
        code, report = EXIT_INPUT, {"error": f"{type(exc).__name__}: {exc}"}
    report = {"config": asdict(cfg), **report}
    text = json.dumps(report, sort_keys=True) if args.format == "json" else _text(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
