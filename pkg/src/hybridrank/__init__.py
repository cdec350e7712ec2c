"""Emerging-influence prediction on temporal networks.

Hybrid scores combine a node's PageRank in the snapshot at ``t`` with its
exponentially decayed in-link activity over the past window.
"""

__version__ = "0.1.0"

from .temporal_graph import (Snapshot, TemporalEdge, TemporalGraph, WindowConfig, build_graph,
                             graph_from_arrays, snapshot_at, window_in_events)
from .pagerank import ConvergenceError, PageRankConfig, pagerank, transition_column
from .predictors import (ActivitySummary, PredictorSpec, ScoreVector, TimePoint, activity_summary,
                         predict, rank, score_m1, score_m2, score_m3, score_pbp)
from .metrics import MetricsReport, auc, evaluate, kendall_tau, novelty, precision
from .ingest import (IngestConfig, SyntheticConfig, generate_synthetic, parse_interactions,
                     read_edge_file, synthetic_graph, write_edge_file)
from .experiment import ExperimentConfig, run_once, sample_times, sweep

__all__ = [
    "ActivitySummary", "ConvergenceError", "ExperimentConfig", "IngestConfig", "MetricsReport",
    "PageRankConfig", "PredictorSpec", "ScoreVector", "Snapshot", "SyntheticConfig", "TemporalEdge",
    "TemporalGraph", "TimePoint", "WindowConfig", "activity_summary", "auc", "build_graph",
    "evaluate", "generate_synthetic", "graph_from_arrays", "kendall_tau", "novelty", "pagerank",
    "parse_interactions", "precision", "predict", "rank", "read_edge_file", "run_once",
    "sample_times", "score_m1", "score_m2", "score_m3", "score_pbp", "snapshot_at", "sweep",
    "synthetic_graph",
    "transition_column", "window_in_events", "write_edge_file",
]
