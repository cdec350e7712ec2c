"""Node scoring: hybrid PageRank x recent-activity models and baselines.

Every predictor maps a snapshot at ``t`` plus the past window ``[t - T_P, t)``
to one score per snapshot node.  Recent activity of node ``n`` is

    a_n = sum over in-links at t_n in [t - T_P, t) of exp(gamma * (t_n - t))

so with ``gamma >= 0`` every weight lies in ``(0, 1]`` and older links count
less.

Variants:

* ``m1``        PR_n * a_n, normalised to sum 1
* ``m2``        PR_n * (1 + P_n), P_n = a_n / sum(a), normalised
* ``m3``        delta * PR_n + (1 - delta) * P_n, normalised
* ``pbp``       k_n(t) - lambda * k_n(t - T_P), raw
* ``pagerank``  PR_n, normalised
* ``recent``    window gain k_n(t) - k_n(t - T_P), raw
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pagerank import LinkStructure, PageRankConfig, pagerank
from .temporal_graph import (Snapshot, TemporalGraph, WindowConfig, snapshot_at,
                             window_counts)

VARIANTS = ("m1", "m2", "m3", "pbp", "pagerank", "recent")
USES_PAGERANK = frozenset({"m1", "m2", "m3", "pagerank"})
USES_GAMMA = frozenset({"m1", "m2", "m3"})


@dataclass(frozen=True)
class PredictorSpec:
    variant: str
    gamma: float = 0.1
    delta: float = 0.5
    lam: float = 0.5
    pagerank: PageRankConfig = field(default_factory=PageRankConfig)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown predictor variant {self.variant!r}; choose from {VARIANTS}")
        if not self.gamma >= 0:
            raise ValueError("gamma must be >= 0")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError("delta must lie in [0, 1]")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lambda must lie in [0, 1]")

    @property
    def params(self) -> dict[str, float]:
        """Parameters that actually influence this variant's scores."""
        p: dict[str, float] = {}
        if self.variant in USES_PAGERANK:
            p["alpha"] = self.pagerank.alpha
        if self.variant in USES_GAMMA:
            p["gamma"] = self.gamma
        if self.variant == "m3":
            p["delta"] = self.delta
        if self.variant == "pbp":
            p["lambda"] = self.lam
        return p

    def label(self) -> str:
        return ";".join(f"{k}={v!r}" for k, v in self.params.items())


@dataclass(frozen=True, eq=False)
class ScoreVector:
    """Per-node scores.

    ``raw`` is the unnormalised score and is what rankings are computed from;
    ``values`` is ``raw`` divided by its sum for normalised variants, and equal
    to ``raw`` otherwise.  ``degenerate`` marks an all-zero normalised vector.
    """

    values: np.ndarray
    raw: np.ndarray
    normalizer: float | None = None
    degenerate: bool = False

    def __len__(self):
        return self.values.size


@dataclass(frozen=True, eq=False)
class ActivitySummary:
    decayed: np.ndarray
    window_count: np.ndarray
    degree: np.ndarray
    degree_before: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.decayed.size


def activity_summary(graph: TemporalGraph, window: WindowConfig, gamma: float,
                     n_nodes: int | None = None) -> ActivitySummary:
    """Decayed activity and degree counts for the nodes existing at ``window.t``."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    t = window.t
    if n_nodes is None:
        n_nodes = graph.nodes_before(t)
    lo = np.searchsorted(graph.time, t - window.past_window, side="left")
    hi = np.searchsorted(graph.time, t, side="left")
    dst = graph.dst[lo:hi]
    weights = np.exp(gamma * (graph.time[lo:hi] - t))
    decayed = np.bincount(dst, weights=weights, minlength=n_nodes)
    count = np.bincount(dst, minlength=n_nodes).astype(np.int64)
    degree = np.bincount(graph.dst[:hi], minlength=n_nodes).astype(np.int64)
    return ActivitySummary(decayed, count, degree, degree - count)


def _normalized(raw: np.ndarray) -> ScoreVector:
    total = raw.sum()
    if total > 0:
        return ScoreVector(raw / total, raw, 1.0 / total)
    return ScoreVector(np.zeros_like(raw), raw, None, degenerate=True)


def activity_probability(summary: ActivitySummary) -> np.ndarray:
    """Recent activity as a distribution over nodes; all zeros without activity."""
    total = summary.decayed.sum()
    if total > 0:
        return summary.decayed / total
    return np.zeros_like(summary.decayed)


def score_m1(summary: ActivitySummary, pr: np.ndarray) -> ScoreVector:
    return _normalized(pr * summary.decayed)


def score_m2(summary: ActivitySummary, pr: np.ndarray) -> ScoreVector:
    """PageRank boosted by recent activity; inactive nodes keep their PageRank."""
    return _normalized(pr * (1.0 + activity_probability(summary)))


def score_m3(summary: ActivitySummary, pr: np.ndarray, delta: float) -> ScoreVector:
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    return _normalized(delta * pr + (1.0 - delta) * activity_probability(summary))


def score_pbp(summary: ActivitySummary, lam: float) -> ScoreVector:
    """Popularity baseline ``k(t) - lam * k(t - T_P)``; lam=0 total, lam=1 recent."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    raw = summary.degree - lam * summary.degree_before
    return ScoreVector(raw, raw)


def score_pagerank(pr: np.ndarray) -> ScoreVector:
    return _normalized(np.asarray(pr, dtype=float))


def score_recent(summary: ActivitySummary) -> ScoreVector:
    raw = summary.window_count.astype(float)
    return ScoreVector(raw, raw)


def rank(scores, n: int | None = None) -> np.ndarray:
    """Node indices by descending score, ties to the lower index, truncated to ``n``."""
    raw = scores.raw if isinstance(scores, ScoreVector) else np.asarray(scores, dtype=float)
    if n is not None and n < 1:
        raise ValueError("list size must be >= 1")
    order = np.argsort(-raw, kind="stable")
    return order if n is None else order[:n]


class TimePoint:
    """Cached inputs for predictions at one reference time.

    The snapshot is built once; PageRank vectors are cached per config and
    activity summaries per ``(gamma, T_P)``.  Only edges before ``t`` are ever
    read, apart from :meth:`future_gain`, which predictors never call.
    """

    def __init__(self, graph: TemporalGraph, t: float):
        self.graph = graph
        self.t = float(t)
        self.snapshot: Snapshot = snapshot_at(graph, self.t)
        self._links = None
        self._pagerank: dict = {}
        self._summary: dict = {}

    @property
    def n_nodes(self) -> int:
        return self.snapshot.n_nodes

    def pagerank(self, config: PageRankConfig) -> np.ndarray:
        if config not in self._pagerank:
            if self._links is None:
                self._links = LinkStructure.from_snapshot(self.snapshot)
            self._pagerank[config] = pagerank(self._links, config)
        return self._pagerank[config]

    def summary(self, gamma: float, past_window: float) -> ActivitySummary:
        key = (gamma, past_window)
        if key not in self._summary:
            window = WindowConfig(self.t, past_window, past_window)
            self._summary[key] = activity_summary(self.graph, window, gamma, self.n_nodes)
        return self._summary[key]

    def future_gain(self, future_window: float) -> np.ndarray:
        return window_counts(self.graph, self.t, self.t + future_window, self.n_nodes)


def predict(point: TimePoint, past_window: float, spec: PredictorSpec) -> ScoreVector:
    """Score every node existing at ``point.t`` with predictor ``spec``."""
    v = spec.variant
    gamma = spec.gamma if v in USES_GAMMA else 0.0
    summary = point.summary(gamma, past_window)
    if v == "pbp":
        return score_pbp(summary, spec.lam)
    if v == "recent":
        return score_recent(summary)
    pr = point.pagerank(spec.pagerank)
    if v == "pagerank":
        return score_pagerank(pr)
    if v == "m1":
        return score_m1(summary, pr)
    if v == "m2":
        return score_m2(summary, pr)
    return score_m3(summary, pr, spec.delta)
