"""Evaluation protocol: random reference times, paired predictor runs, grids.

For each window length ``W`` (used as both ``T_P`` and ``T_F``) the sweep draws
``num_samples`` reference times, builds each snapshot once and evaluates every
predictor cell on it.  Output rows are sorted by a fixed key, so results do
not depend on how many worker threads ran them.
"""

from __future__ import annotations

import configparser
import hashlib
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .ingest import atomic_write_text, read_edge_file
from .metrics import TAU_VARIANTS, MetricsReport, evaluate
from .pagerank import PageRankConfig
from .predictors import USES_GAMMA, USES_PAGERANK, VARIANTS, PredictorSpec, TimePoint, predict
from .temporal_graph import TemporalGraph, build_graph

CSV_COLUMNS = ("t", "T_P", "T_F", "predictor", "params", "precision", "novelty", "auc", "tau", "flags")
METRICS = ("precision", "novelty", "auc", "tau")
NOVELTY_REFERENCES = ("degree", "window")


class InfeasibleWindowError(ValueError):
    def __init__(self, past_window: float, future_window: float, span: float):
        super().__init__(
            f"window T_P={past_window:g}, T_F={future_window:g} does not fit a dataset spanning "
            f"{span:g} days; largest feasible T_P = T_F is {span / 2:g}")
        self.max_window = span / 2


def sample_times(graph: TemporalGraph, past_window: float, future_window: float,
                 num_samples: int = 10, seed: int = 0) -> list[float]:
    """Uniform reference times in ``[start + T_P, end - T_F]``, sorted."""
    lo = graph.start + past_window
    hi = graph.end - future_window
    if hi < lo:
        raise InfeasibleWindowError(past_window, future_window, graph.end - graph.start)
    rng = np.random.Generator(np.random.PCG64(seed))
    return sorted((lo + (hi - lo) * rng.random(num_samples)).tolist())


def evaluate_point(point: TimePoint, past_window: float, future_window: float, spec: PredictorSpec,
                   top_n: int = 100, tau_variant: str = "gamma",
                   novelty_reference: str = "degree") -> MetricsReport:
    scores = predict(point, past_window, spec)
    summary = point.summary(0.0, past_window)
    if novelty_reference == "degree":
        reference = summary.degree_before
    elif novelty_reference == "window":
        reference = summary.window_count
    else:
        raise ValueError(f"novelty_reference must be one of {NOVELTY_REFERENCES}")
    return evaluate(scores.raw, point.future_gain(future_window), reference, top_n,
                    tau_variant, degenerate=scores.degenerate)


def run_once(graph: TemporalGraph, t: float, past_window: float, future_window: float,
             spec: PredictorSpec, top_n: int = 100, tau_variant: str = "gamma",
             novelty_reference: str = "degree") -> MetricsReport:
    """Predict at ``t`` from the snapshot and past window, score against ``[t, t + T_F)``.

    Args:
        graph: the full temporal graph.
        t: reference time; predictors only see links with time < t.
        past_window, future_window: ``T_P`` and ``T_F`` in days.
        spec: predictor and its parameters.
        top_n: list size for precision, novelty and AUC.
        tau_variant: ``"gamma"`` for (C-D)/(C+D), ``"b"`` for tau-b.
        novelty_reference: what counts as already popular when scoring
            novelty; ``"degree"`` ranks by in-degree at ``t - T_P``,
            ``"window"`` by links gained in ``[t - T_P, t)``.
    """
    return evaluate_point(TimePoint(graph, t), past_window, future_window, spec, top_n,
                          tau_variant, novelty_reference)


@dataclass
class ExperimentConfig:
    edges: str | None = None
    num_samples: int = 10
    seed: int = 0
    windows: list[float] = field(default_factory=lambda: [30.0])
    top_n: int = 100
    predictors: list[str] = field(default_factory=lambda: ["m1", "m2", "m3", "pbp", "pagerank"])
    gamma: list[float] = field(default_factory=lambda: [0.1])
    alpha: list[float] = field(default_factory=lambda: [0.1])
    delta: list[float] = field(default_factory=lambda: [0.5])
    lam: list[float] = field(default_factory=lambda: [0.5])
    tolerance: float = 1e-10
    max_iterations: int = 1000
    tau: str = "gamma"
    novelty_reference: str = "degree"
    output: str = "sweep.csv"

    def __post_init__(self):
        for v in self.predictors:
            if v not in VARIANTS:
                raise ValueError(f"unknown predictor {v!r}; choose from {VARIANTS}")
        if self.num_samples < 1 or self.top_n < 1:
            raise ValueError("num_samples and top_n must be >= 1")
        if not (self.gamma and self.alpha and self.delta and self.lam):
            raise ValueError("parameter grids must be non-empty")
        self.windows = list(dict.fromkeys(float(w) for w in self.windows))
        if not self.windows or any(not w > 0 for w in self.windows):
            raise ValueError("windows must be a non-empty list of positive day counts")
        if self.tau not in TAU_VARIANTS:
            raise ValueError(f"tau must be one of {TAU_VARIANTS}")
        if self.novelty_reference not in NOVELTY_REFERENCES:
            raise ValueError(f"novelty_reference must be one of {NOVELTY_REFERENCES}")

    def cells(self) -> list[PredictorSpec]:
        """One spec per predictor and combination of the parameters it uses."""
        def grid(values, used):
            return list(dict.fromkeys(values)) if used else values[:1]

        out = []
        for v in dict.fromkeys(self.predictors):
            alphas = grid(self.alpha, v in USES_PAGERANK)
            gammas = grid(self.gamma, v in USES_GAMMA)
            deltas = grid(self.delta, v == "m3")
            lams = grid(self.lam, v == "pbp")
            for a, g, d, lam in itertools.product(alphas, gammas, deltas, lams):
                pr = PageRankConfig(a, self.tolerance, self.max_iterations)
                out.append(PredictorSpec(v, gamma=g, delta=d, lam=lam, pagerank=pr))
        return out


_LIST_KEYS = {"windows": float, "predictors": str, "gamma": float, "alpha": float,
              "delta": float, "lambda": float}
_SCALAR_KEYS = {"edges": str, "num_samples": int, "seed": int, "top_n": int, "tolerance": float,
                "max_iterations": int, "tau": str, "novelty_reference": str, "output": str}


def parse_config_text(text: str, base_dir=None) -> ExperimentConfig:
    """Parse the flat ``key = value`` sweep format; lists are comma separated.

    Relative ``edges``/``output`` paths resolve against ``base_dir``.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    parser.optionxform = str
    parser.read_string("[sweep]\n" + text)
    kwargs = {}
    for key, raw in parser["sweep"].items():
        if key in _LIST_KEYS:
            items = [x.strip() for x in raw.split(",") if x.strip()]
            kwargs["lam" if key == "lambda" else key] = [_LIST_KEYS[key](x) for x in items]
        elif key in _SCALAR_KEYS:
            kwargs[key] = _SCALAR_KEYS[key](raw.strip())
        else:
            raise ValueError(f"unknown sweep config key {key!r}")
    if base_dir is not None:
        for key in ("edges", "output"):
            if key in kwargs and not Path(kwargs[key]).is_absolute():
                kwargs[key] = str(Path(base_dir) / kwargs[key])
    return ExperimentConfig(**kwargs)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    return parse_config_text(path.read_text(encoding="utf-8"), base_dir=path.parent)


def format_value(x) -> str:
    """CSV cell text: shortest round-trip repr for floats, empty for None."""
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(float(x))
    return str(x)


@dataclass
class SweepResult:
    rows: list[dict]
    aggregates: list[dict]
    times: dict[float, list[float]]

    def to_csv(self) -> str:
        """Per-run rows, each cell followed by its aggregate row."""
        lines = [",".join(CSV_COLUMNS)]
        aggs = iter(self.aggregates)
        for _, group in itertools.groupby(self.rows, key=_cell_key):
            lines.extend(_csv_line(r) for r in group)
            lines.append(_csv_line(next(aggs)))
        return "\n".join(lines) + "\n"


def _cell_key(row: dict) -> tuple:
    return row["T_P"], row["predictor"], row["params"]


def _csv_line(row: dict) -> str:
    return ",".join(format_value(row[c]) for c in CSV_COLUMNS)


def _aggregate(rows: list[dict]) -> dict:
    """Mean of each metric over a cell's runs; population std goes in the flags.

    Null values are left out of that metric's mean and counted as ``null_<metric>``.
    """
    out = {k: rows[0][k] for k in ("T_P", "T_F", "predictor", "params")}
    out["t"] = None
    notes = ["agg=mean", f"runs={len(rows)}"]
    for m in METRICS:
        vals = [r[m] for r in rows if r[m] is not None]
        if len(vals) < len(rows):
            notes.append(f"null_{m}={len(rows) - len(vals)}")
        if not vals:
            out[m] = out[f"std_{m}"] = None
            continue
        mean = math.fsum(vals) / len(vals)
        out[m] = mean
        out[f"std_{m}"] = math.sqrt(math.fsum((v - mean) ** 2 for v in vals) / len(vals))
        notes.append(f"std_{m}={format_value(out[f'std_{m}'])}")
    out["flags"] = ";".join(notes)
    return out


def _run_point(graph, t, window, cells, config) -> list[dict]:
    point = TimePoint(graph, t)
    rows = []
    for spec in cells:
        row = {"t": t, "T_P": window, "T_F": window, "predictor": spec.variant, "params": spec.label()}
        try:
            rep = evaluate_point(point, window, window, spec, config.top_n, config.tau,
                                 config.novelty_reference)
            row.update(rep.as_dict(), flags="|".join(rep.flags))
        except Exception as exc:  # recorded per row; the sweep goes on
            row.update(dict.fromkeys(METRICS), flags=f"error:{type(exc).__name__}")
        rows.append(row)
    return rows


def sweep(config: ExperimentConfig, graph: TemporalGraph | None = None, threads: int = 1) -> SweepResult:
    """Run every predictor cell on the same sampled times for every window."""
    if graph is None:
        if config.edges is None:
            raise ValueError("sweep needs either a graph or config.edges")
        graph = build_graph(read_edge_file(config.edges))
    cells = config.cells()
    times = {w: sample_times(graph, w, w, config.num_samples, config.seed) for w in config.windows}
    tasks = [(w, i, t) for wi, w in enumerate(config.windows) for i, t in enumerate(times[w])]

    def work(task):
        w, i, t = task
        return task, _run_point(graph, t, w, cells, config)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, tasks))
    else:
        results = [work(task) for task in tasks]

    window_pos = {w: k for k, w in enumerate(config.windows)}
    keyed = []
    for (w, i, _), rows in results:
        for c, row in enumerate(rows):
            keyed.append(((window_pos[w], c, i), row))
    keyed.sort(key=lambda kv: kv[0])
    rows = [row for _, row in keyed]

    aggregates = []
    for (wp, c), group in itertools.groupby(keyed, key=lambda kv: kv[0][:2]):
        aggregates.append(_aggregate([row for _, row in group]))
    return SweepResult(rows, aggregates, times)


def dataset_fingerprint(graph: TemporalGraph) -> dict:
    h = hashlib.sha256()
    labels = graph.labels
    for s, d, t in zip(graph.src.tolist(), graph.dst.tolist(), graph.time.tolist()):
        h.update(f"{labels[s]}\t{labels[d]}\t{t!r}\n".encode())
    return {"edges": graph.num_edges, "nodes": graph.num_nodes, "start": graph.start,
            "end": graph.end, "sha256": h.hexdigest()}


def manifest(config: ExperimentConfig, graph: TemporalGraph, result: SweepResult) -> dict:
    return {
        "hybridrank_version": __version__,
        "config": asdict(config),
        "seed": config.seed,
        "dataset": dataset_fingerprint(graph),
        "sample_times": {repr(w): ts for w, ts in result.times.items()},
        "cells": [{"predictor": s.variant, "params": s.label()} for s in config.cells()],
    }


def write_sweep(config: ExperimentConfig, graph: TemporalGraph | None = None, threads: int = 1,
                output: str | None = None) -> SweepResult:
    """Run :func:`sweep` and write the CSV plus a ``<output>.manifest.json``."""
    if graph is None:
        graph = build_graph(read_edge_file(config.edges))
    result = sweep(config, graph, threads)
    out = Path(output or config.output)
    atomic_write_text(out, result.to_csv())
    atomic_write_text(out.with_name(out.name + ".manifest.json"),
                      json.dumps(manifest(config, graph, result), indent=2, sort_keys=True) + "\n")
    return result
