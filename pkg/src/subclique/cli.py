"""Command-line front end: generate instances, count exactly, estimate, search, benchmark."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

from . import __version__
from .baseline import EnumerationBudgetExceeded, claim_bound, count_cliques_exact, gen_gnm, gen_path_plus_clique
from .estimator import ENGINES, approximate_cliques
from .graph import EdgeListError, Graph, QueryOracle, load_edge_list, write_edge_list
from .params import Constants, ParameterError, derive_params
from .search import AUTO_FLOOR, approximate_cliques_auto, make_search_config

SCHEMA_VERSION = 1
THREADS_ENV = "SUBCLIQUE_THREADS"


class UsageError(Exception):
    """Bad flags or inputs; exit code 2."""


@dataclass
class RunConfig:
    command: str
    graph: str | None = None
    k: int = 3
    eps: float = 0.5
    delta: float = 0.1
    mbar: str = "exact"
    ckbar: float | None = None
    trials: int = 1
    seed: int = 0
    engine: str = "auto"
    with_exact: bool = False
    deterministic: bool = False
    constants: Constants = field(default_factory=Constants)

    def check(self) -> None:
        if self.command == "estimate" and self.ckbar is None:
            raise UsageError("estimate requires --ckbar")
        if self.command == "auto" and self.ckbar is not None:
            raise UsageError("auto does not take --ckbar (the search supplies it)")
        if self.trials < 1:
            raise UsageError("--trials must be at least 1")
        if not 0 < self.eps < 1:
            raise ParameterError("epsilon must be in (0,1)")
        if not 0 < self.delta < 1:
            raise ParameterError("delta must be in (0,1)")
        if self.mbar != "exact":
            try:
                float(self.mbar)
            except ValueError:
                raise UsageError(f"--mbar must be 'exact' or a number, got {self.mbar!r}") from None

    def as_dict(self) -> dict:
        out = asdict(self)
        out["constants"] = asdict(self.constants)
        return out


def resolve_mbar(mode: str, graph: Graph, eps: float) -> float:
    """``exact`` reads m off the loaded graph and deflates it by ``1 - eps/5``."""
    if mode == "exact":
        return (1 - eps / 5) * graph.m
    return float(mode)


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def _trial(job: tuple) -> dict:
    cfg, graph, i = job
    oracle = QueryOracle(graph)
    seed = cfg.seed + i
    if cfg.command == "estimate":
        mbar = resolve_mbar(cfg.mbar, graph, cfg.eps)
        params = derive_params(graph.n, cfg.k, mbar, cfg.ckbar, cfg.eps, cfg.delta, seed=seed,
                               constants=cfg.constants)
        rep = approximate_cliques(oracle, params, seed, engine=cfg.engine)
        row = {"estimate": rep.estimate, "outcome": rep.outcome, "chi_sum": rep.chi_sum,
               "q": rep.q_used, "engine": rep.engine, "flags": rep.flags}
    else:
        mbar = "exact" if cfg.mbar == "exact" else float(cfg.mbar)
        rep = approximate_cliques_auto(oracle, cfg.k, cfg.eps, mbar=mbar, seed=seed,
                                       constants=cfg.constants, engine=cfg.engine)
        row = {"estimate": rep.estimate, "outcome": rep.outcome,
               "chi_sum": None, "invocations": rep.invocations,
               "flags": rep.flags, "raw_fail": rep.raw_fail,
               "trajectory": rep.as_dict()["trajectory"]}
    row["queries"] = rep.query_counts.as_dict()
    row["wallclock_ms"] = None if cfg.deterministic else round(rep.wallclock * 1e3, 3)
    return row


def run_trials(cfg: RunConfig, graph: Graph) -> list[dict]:
    """Trials in index order, whatever order the workers finish in."""
    jobs = [(cfg, graph, i) for i in range(cfg.trials)]
    workers = min(worker_count(), cfg.trials)
    if workers <= 1:
        return [_trial(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_trial, jobs))


def summarize(rows: list[dict], exact: int | None, eps: float) -> dict:
    good = [r["estimate"] for r in rows if r["outcome"] == "ok" and r["estimate"] is not None]
    out = {
        "mean": statistics.fmean(good) if good else None,
        "stdev": statistics.stdev(good) if len(good) > 1 else 0.0 if good else None,
        "success_rate": len(good) / len(rows),
    }
    if exact is not None:
        out["exact"] = exact
        errs = [r["rel_error"] for r in rows if r.get("rel_error") is not None]
        out["mean_rel_error"] = statistics.fmean(errs) if errs else None
        out["within_eps_rate"] = sum(e <= eps for e in errs) / len(rows)
    return out


def attach_errors(rows: list[dict], exact: int) -> None:
    for r in rows:
        est = r["estimate"]
        if est is None:
            r["rel_error"] = None
        elif exact == 0:
            # undefined; counted as outside the tolerance
            r["rel_error"] = 0.0 if est == 0 else None
        else:
            r["rel_error"] = abs(est - exact) / exact


def load_graph(path: str | None) -> Graph:
    if path is None:
        raise UsageError("--graph is required")
    try:
        if path == "-":
            return load_edge_list(sys.stdin)
        with open(path) as fh:
            return load_edge_list(fh)
    except OSError as exc:
        raise UsageError(f"cannot read graph: {exc}") from None


def params_for_report(cfg: RunConfig, graph: Graph) -> dict:
    mbar = resolve_mbar(cfg.mbar, graph, cfg.eps)
    if cfg.command == "estimate":
        p = derive_params(graph.n, cfg.k, mbar, cfg.ckbar, cfg.eps, cfg.delta, seed=cfg.seed,
                          constants=cfg.constants)
        out = p.as_dict()
        out["q_if_S_is_V"] = p.q_for(graph.m, graph.n) if p.s >= graph.n else None
        return out
    sc = make_search_config(min(float(graph.n) ** cfg.k, mbar ** (cfg.k / 2)), cfg.eps, floor=AUTO_FLOOR)
    return {"n": graph.n, "k": cfg.k, "mbar": mbar, "eps": cfg.eps, "B": sc.B,
            "search_eps": sc.eps, "ell": sc.ell, "floor": sc.floor, "delta_prime": sc.delta_prime,
            "r_search": sc.r_search, "delta_inner": sc.delta_inner,
            "constants": asdict(cfg.constants)}


def build_report(cfg: RunConfig, graph: Graph, dry_run: bool = False) -> tuple[dict, int]:
    """The JSON report and the exit code it implies."""
    cfg.check()
    report = {
        "version": SCHEMA_VERSION,
        "package_version": __version__,
        "config": cfg.as_dict(),
        "graph": {"n": graph.n, "m": graph.m},
        "params": params_for_report(cfg, graph),
    }
    if dry_run:
        report["trials"] = []
        report["summary"] = None
        return report, 0
    rows = run_trials(cfg, graph)
    exact = None
    if cfg.with_exact:
        exact = count_cliques_exact(graph, cfg.k).total
        attach_errors(rows, exact)
    report["trials"] = rows
    report["summary"] = summarize(rows, exact, cfg.eps)
    code = 0 if any(r["outcome"] == "ok" for r in rows) else 1
    return report, code


def dump_json(obj, path: str | None) -> None:
    text = json.dumps(obj, indent=2, allow_nan=False) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def constants_from(args) -> Constants:
    base = Constants()
    over = {
        "s": args.s_const, "q": args.q_const, "t": args.t_const,
        "tau_c": args.tau_c_const, "tau_d": args.tau_d_const, "r": args.r_const,
    }
    return replace(base, **{k: v for k, v in over.items() if v is not None})


def config_from(args) -> RunConfig:
    return RunConfig(
        command=args.command, graph=args.graph, k=args.k, eps=args.eps, delta=args.delta,
        mbar=args.mbar, ckbar=getattr(args, "ckbar", None), trials=args.trials, seed=args.seed,
        engine=args.engine, with_exact=args.with_exact, deterministic=args.deterministic,
        constants=constants_from(args),
    )


# --- subcommands -------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.family == "path-clique":
        if args.t is None:
            raise UsageError("path-clique needs --t")
        try:
            g = gen_path_plus_clique(args.n, args.t)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        if args.m_edges is None:
            raise UsageError("gnm needs --m-edges")
        try:
            g = gen_gnm(args.n, args.m_edges, args.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if args.out is None or args.out == "-":
        write_edge_list(g, sys.stdout)
    else:
        with open(args.out, "w") as fh:
            write_edge_list(g, fh)
    return 0


def cmd_exact(args) -> int:
    g = load_graph(args.graph)
    census = count_cliques_exact(g, args.k)
    out = {
        "version": SCHEMA_VERSION,
        "graph": {"n": g.n, "m": g.m},
        "k": args.k,
        "total": census.total,
        "claim_bound": claim_bound(g.m, args.k),
    }
    if args.per_vertex:
        out["per_vertex"] = census.per_vertex.tolist()
    dump_json(out, args.json_out)
    return 0


def cmd_run(args) -> int:
    cfg = config_from(args)
    g = load_graph(args.graph)
    report, code = build_report(cfg, g, dry_run=args.dry_run)
    dump_json(report, args.json_out)
    return code


BENCH_FIELDS = ["family", "n", "m", "t", "k", "C_k", "trials", "mean_queries",
                "mean_rel_error", "success_rate", "within_eps_rate", "bound"]


def bench_instances(args) -> list[tuple[str, Graph, int | None]]:
    if args.family == "path-clique":
        return [(f"path{args.n - t}+K{t}", gen_path_plus_clique(args.n, t), t) for t in args.ts]
    return [(f"gnm{args.n}_{me}", gen_gnm(args.n, me, args.seed), None) for me in args.m_edges_list]


def query_bound(n: int, m: int, c: int, k: int) -> float:
    """``n / C^(1/k) + m^(k/2) / C``, the shape the query count should track."""
    if c == 0:
        return math.inf
    return n / c ** (1 / k) + m ** (k / 2) / c


def cmd_bench(args) -> int:
    try:
        instances = bench_instances(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not instances:
        raise UsageError("no instances")
    base = config_from(args)
    base.command = args.mode
    rows, reports = [], []
    for label, g, t in instances:
        c = count_cliques_exact(g, args.k).total
        cfg = replace(base, graph=label, with_exact=True)
        if args.mode == "estimate":
            if c == 0:
                raise UsageError(f"{label} has no {args.k}-cliques; estimate mode needs a positive guess")
            cfg.ckbar = args.ckbar_frac * c
        report, _ = build_report(cfg, g, dry_run=args.dry_run)
        reports.append(report)
        if args.dry_run:
            continue
        trials = report["trials"]
        row = {
            "family": args.family, "n": g.n, "m": g.m, "t": t, "k": args.k, "C_k": c,
            "trials": len(trials),
            "mean_queries": statistics.fmean(sum(r["queries"].values()) for r in trials),
            "mean_rel_error": report["summary"]["mean_rel_error"],
            "success_rate": report["summary"]["success_rate"],
            "within_eps_rate": report["summary"]["within_eps_rate"],
            "bound": query_bound(g.n, g.m, c, args.k),
        }
        rows.append(row)
    if args.json_out is not None or args.dry_run:
        dump_json({"version": SCHEMA_VERSION, "instances": reports}, args.json_out)
    if not args.dry_run:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=BENCH_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        if args.csv_out is None or args.csv_out == "-":
            sys.stdout.write(buf.getvalue())
        else:
            with open(args.csv_out, "w") as fh:
                fh.write(buf.getvalue())
    return 0


# --- parser ------------------------------------------------------------------

def _int_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_run_flags(p: argparse.ArgumentParser, graph: bool = True) -> None:
    if graph:
        p.add_argument("--graph", help="edge-list file ('-' for stdin)")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--mbar", default="exact", help="'exact' or a number")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--engine", choices=ENGINES, default="auto")
    p.add_argument("--with-exact", action="store_true", help="also count exactly and report errors")
    p.add_argument("--json-out", help="write the JSON report here instead of stdout")
    p.add_argument("--dry-run", action="store_true", help="print derived parameters only; no queries")
    p.add_argument("--deterministic", action="store_true", help="null out wall-clock fields")
    for name in ("s", "q", "t", "tau-c", "tau-d", "r"):
        p.add_argument(f"--{name}-const", type=float, default=None)


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="subclique", description=__doc__)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a synthetic instance as an edge list")
    g.add_argument("family", choices=["path-clique", "gnm"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--t", type=int)
    g.add_argument("--m-edges", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    x = sub.add_parser("exact", help="count k-cliques exactly")
    x.add_argument("--graph")
    x.add_argument("--k", type=int, default=3)
    x.add_argument("--per-vertex", action="store_true")
    x.add_argument("--json-out")
    x.set_defaults(func=cmd_exact)

    e = sub.add_parser("estimate", help="estimate with a supplied scale guess")
    _add_run_flags(e)
    e.add_argument("--ckbar", type=float, required=True)
    e.set_defaults(func=cmd_run)

    a = sub.add_parser("auto", help="estimate with no guess (halving search)")
    _add_run_flags(a)
    a.add_argument("--ckbar", type=float, default=None, help=argparse.SUPPRESS)
    a.set_defaults(func=cmd_run)

    b = sub.add_parser("bench", help="accuracy and query counts over an instance sweep")
    _add_run_flags(b, graph=False)
    b.add_argument("--family", choices=["path-clique", "gnm"], default="path-clique")
    b.add_argument("--mode", choices=["estimate", "auto"], default="estimate")
    b.add_argument("--n", type=int, default=2000)
    b.add_argument("--ts", type=_int_list, default=[6, 8, 10], help="clique sizes, e.g. 6,8,10")
    b.add_argument("--m-edges-list", type=_int_list, default=[4000])
    b.add_argument("--ckbar-frac", type=float, default=0.5, help="guess as a fraction of the exact count")
    b.add_argument("--csv-out")
    b.set_defaults(func=cmd_bench, graph=None)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParameterError, EdgeListError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EnumerationBudgetExceeded as exc:
        print(f"error: exact count too large: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
