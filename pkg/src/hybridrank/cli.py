"""Command-line entry point.

Exit codes:
  0  success
  1  unexpected internal error
  2  bad command line (unknown flag, missing argument)
  3  input file not found
  4  malformed or empty input data
  5  infeasible time window for the dataset
  6  PageRank did not converge
  7  invalid parameter value

Errors print a single line to stderr:  ``hybridrank: error: code=<n> kind=<kind>: <message>``
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .experiment import (CSV_COLUMNS, ExperimentConfig, InfeasibleWindowError, format_value,
                         load_config, run_once, write_sweep)
from .ingest import (TIME_UNITS, ColumnMap, IngestConfig, IngestError, SyntheticConfig,
                     atomic_write_text, generate_synthetic, parse_interactions, read_edge_file,
                     write_edge_file)
from .metrics import TAU_VARIANTS
from .pagerank import ConvergenceError, PageRankConfig, pagerank
from .predictors import VARIANTS, PredictorSpec, TimePoint, predict, rank
from .temporal_graph import build_graph, snapshot_at

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_NOT_FOUND, EXIT_DATA, EXIT_WINDOW, EXIT_CONVERGENCE, EXIT_VALUE = range(8)

_VARIANT_ALIASES = {"pr": "pagerank"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: code={EXIT_USAGE} kind=usage: {message}\n")


def _delimiter(text: str) -> str | None:
    return {"tab": "\t", "\\t": "\t", "whitespace": None, "ws": None}.get(text, text)


def _columns(text: str) -> ColumnMap:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) not in (3, 4):
        raise ValueError("--columns takes source,target,timestamp or source,target,value,timestamp")
    conv = [int(p) if p.lstrip("-").isdigit() else (None if p in ("", "-") else p) for p in parts]
    if len(conv) == 3:
        return ColumnMap(conv[0], conv[1], None, conv[2])
    return ColumnMap(*conv)


def _load_graph(path):
    return build_graph(read_edge_file(path))


def _write(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        atomic_write_text(path, text)


def _spec(args) -> PredictorSpec:
    variant = _VARIANT_ALIASES.get(args.variant, args.variant)
    pr = PageRankConfig(args.alpha, args.tolerance, args.max_iterations)
    return PredictorSpec(variant, gamma=args.gamma, delta=args.delta, lam=args.lam, pagerank=pr)


def cmd_ingest(args) -> int:
    config = IngestConfig(args.rating_threshold, args.min_activity, args.time_unit,
                          exclude_self_links=not args.keep_self_links)
    edges = parse_interactions(args.input, config, _columns(args.columns),
                               _delimiter(args.delimiter), args.header)
    write_edge_file(args.output, edges)
    return EXIT_OK


def cmd_generate(args) -> int:
    config = SyntheticConfig(args.nodes_per_day, args.events_per_day, args.horizon,
                             args.recency_weight, args.aging_rate, args.seed, args.initial_nodes)
    write_edge_file(args.output, generate_synthetic(config))
    return EXIT_OK


def cmd_pagerank(args) -> int:
    graph = _load_graph(args.edges)
    snap = snapshot_at(graph, args.at)
    pr = pagerank(snap, PageRankConfig(args.alpha, args.tolerance, args.max_iterations))
    values = pr.tolist()
    _write(args.output, "".join(f"{graph.labels[i]}\t{values[i]!r}\n" for i in rank(pr).tolist()))
    return EXIT_OK


def cmd_predict(args) -> int:
    graph = _load_graph(args.edges)
    point = TimePoint(graph, args.t)
    scores = predict(point, args.tp, _spec(args))
    order = rank(scores, args.top_n)
    values = scores.values.tolist()
    _write(args.output, "".join(f"{graph.labels[i]}\t{values[i]!r}\t{r}\n"
                                for r, i in enumerate(order.tolist(), start=1)))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    graph = _load_graph(args.edges)
    tf = args.tf if args.tf is not None else args.tp
    if args.t - args.tp < graph.start or args.t + tf > graph.end:
        raise InfeasibleWindowError(args.tp, tf, graph.end - graph.start)
    spec = _spec(args)
    rep = run_once(graph, args.t, args.tp, tf, spec, args.top_n, args.tau, args.novelty_reference)
    row = {"t": float(args.t), "T_P": float(args.tp), "T_F": float(tf), "predictor": spec.variant,
           "params": spec.label(), **rep.as_dict(), "flags": "|".join(rep.flags)}
    _write(args.output, ",".join(CSV_COLUMNS) + "\n" + ",".join(format_value(row[c]) for c in CSV_COLUMNS) + "\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = load_config(args.config) if args.config else ExperimentConfig()
    if args.edges:
        config.edges = args.edges
    if config.edges is None:
        raise ValueError("sweep needs an edge file (config key 'edges' or --edges)")
    graph = _load_graph(config.edges)
    out = args.output or config.output
    write_sweep(config, graph, threads=max(1, args.threads), output=out)
    return EXIT_OK


def _add_pagerank_flags(p, alpha_help="link-following probability alpha in [0, 1]"):
    p.add_argument("--alpha", type=float, default=0.1, help=f"{alpha_help} (default: %(default)s)")
    p.add_argument("--tolerance", type=float, default=1e-10,
                   help="L1 convergence threshold for power iteration (default: %(default)s)")
    p.add_argument("--max-iterations", type=int, default=1000,
                   help="power iteration cap (default: %(default)s)")


def _add_predictor_flags(p):
    p.add_argument("edges", help="canonical edge file (source<TAB>target<TAB>day)")
    p.add_argument("--variant", required=True, choices=list(VARIANTS) + list(_VARIANT_ALIASES),
                   help="predictor: m1, m2, m3, pbp, pagerank (alias pr) or recent")
    p.add_argument("--t", type=float, required=True, help="reference time in days")
    p.add_argument("--tp", type=float, default=30.0, help="past window T_P in days (default: %(default)s)")
    p.add_argument("--gamma", type=float, default=0.1, help="activity decay rate per day (default: %(default)s)")
    p.add_argument("--delta", type=float, default=0.5, help="m3 weight on PageRank (default: %(default)s)")
    p.add_argument("--lambda", dest="lam", type=float, default=0.5,
                   help="pbp weight on degree at t - T_P; 0 total, 1 recent popularity (default: %(default)s)")
    _add_pagerank_flags(p)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hybridrank", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="clean an interaction log into a canonical edge file")
    p.add_argument("input", help="delimiter-separated interaction file")
    p.add_argument("-o", "--output", required=True, help="canonical edge file to write")
    p.add_argument("--delimiter", default="whitespace",
                   help="field separator; 'tab', 'whitespace' or any literal string (default: %(default)s)")
    p.add_argument("--columns", default="0,1,2",
                   help="source,target[,value],timestamp as 0-based indices or header names; "
                        "use '-' for no value column (default: %(default)s)")
    p.add_argument("--header", action="store_true", help="first non-blank line is a header")
    p.add_argument("--rating-threshold", type=float, default=2.0,
                   help="keep records whose value is strictly greater (default: %(default)s)")
    p.add_argument("--min-activity", type=int, default=20,
                   help="drop actors with fewer surviving records (default: %(default)s)")
    p.add_argument("--time-unit", choices=TIME_UNITS, default="epoch-seconds",
                   help="unit of the timestamp column (default: %(default)s)")
    p.add_argument("--keep-self-links", action="store_true", help="keep actor == object records")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("generate", help="write a synthetic evolving network")
    p.add_argument("-o", "--output", required=True, help="canonical edge file to write")
    p.add_argument("--nodes-per-day", type=float, default=10.0, help="node arrival rate (default: %(default)s)")
    p.add_argument("--events-per-day", type=float, default=100.0, help="link rate (default: %(default)s)")
    p.add_argument("--horizon", type=float, default=300.0, help="days to simulate (default: %(default)s)")
    p.add_argument("--recency-weight", type=float, default=0.5,
                   help="weight rho on total degree vs. decayed recent degree (default: %(default)s)")
    p.add_argument("--aging-rate", type=float, default=0.1,
                   help="per-day decay theta of recent degree (default: %(default)s)")
    p.add_argument("--initial-nodes", type=int, default=2, help="nodes present on day 0 (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="PCG64 seed (default: %(default)s)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("pagerank", help="PageRank of the snapshot before a time")
    p.add_argument("edges", help="canonical edge file")
    p.add_argument("--at", type=float, required=True, help="snapshot time in days (links with time < at)")
    p.add_argument("-o", "--output", default="-", help="score dump path, '-' for stdout (default: %(default)s)")
    _add_pagerank_flags(p)
    p.set_defaults(func=cmd_pagerank)

    p = sub.add_parser("predict", help="rank nodes with one predictor")
    _add_predictor_flags(p)
    p.add_argument("--top-n", type=int, default=None, help="truncate the list (default: all nodes)")
    p.add_argument("-o", "--output", default="-", help="ranked list path (default: stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score one prediction against the future window")
    _add_predictor_flags(p)
    p.add_argument("--tf", type=float, default=None, help="future window T_F in days (default: same as --tp)")
    p.add_argument("--top-n", type=int, default=100, help="list size n (default: %(default)s)")
    p.add_argument("--tau", choices=TAU_VARIANTS, default="gamma",
                   help="'gamma' = (C-D)/(C+D) ignoring ties, 'b' = tau-b (default: %(default)s)")
    p.add_argument("--novelty-reference", choices=("degree", "window"), default="degree",
                   help="past popularity for novelty: in-degree at t - T_P, or gain over "
                        "[t - T_P, t) (default: %(default)s)")
    p.add_argument("-o", "--output", default="-", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="run the full protocol over parameter grids")
    p.add_argument("--config", help="flat key = value config file (see README)")
    p.add_argument("--edges", help="override the config's edge file")
    p.add_argument("--output", help="override the config's CSV path")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads; results do not depend on it (default: %(default)s)")
    p.set_defaults(func=cmd_sweep)
    return parser


def _fail(code: int, kind: str, message: str) -> int:
    message = " ".join(str(message).split())
    print(f"hybridrank: error: code={code} kind={kind}: {message}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        return _fail(EXIT_NOT_FOUND, "not_found", f"{exc.filename or exc}: no such file")
    except IngestError as exc:
        return _fail(EXIT_DATA, "data", exc)
    except InfeasibleWindowError as exc:
        return _fail(EXIT_WINDOW, "infeasible_window", exc)
    except ConvergenceError as exc:
        return _fail(EXIT_CONVERGENCE, "convergence", exc)
    except ValueError as exc:
        return _fail(EXIT_VALUE, "value", exc)
    except Exception as exc:  # pragma: no cover
        return _fail(EXIT_INTERNAL, "internal", f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    sys.exit(main())
