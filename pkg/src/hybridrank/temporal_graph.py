"""Time-sorted edge store and strict-before snapshots.

Node indices are assigned in order of first appearance in the time-sorted
edge stream, so the nodes that exist at any time ``t`` always form the index
prefix ``0 .. N(t) - 1``.  Snapshots and window queries rely on that.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, NamedTuple, Sequence

import numpy as np


class TemporalEdge(NamedTuple):
    """One directed link event ``source -> target`` at ``time`` (days)."""

    source: Hashable
    target: Hashable
    time: float


@dataclass(frozen=True)
class WindowConfig:
    t: float
    past_window: float
    future_window: float

    def __post_init__(self):
        if not self.past_window > 0 or not self.future_window > 0:
            raise ValueError("window lengths must be positive")

    @property
    def past(self) -> tuple[float, float]:
        return self.t - self.past_window, self.t

    @property
    def future(self) -> tuple[float, float]:
        return self.t, self.t + self.future_window


class TemporalGraph:
    """Immutable temporal multigraph.

    Attributes:
        labels: original node ids, indexed by dense node index.
        src, dst, time: edge arrays sorted by ``(time, src, dst)``.
        first_seen: time each node first appears as an endpoint (non-decreasing).
        in_ptr, in_times: CSR layout of each node's sorted in-edge times.
    """

    def __init__(self, labels, src, dst, time):
        self.labels: list = list(labels)
        self.index: dict = {lab: i for i, lab in enumerate(self.labels)}
        self.src = np.ascontiguousarray(src, dtype=np.int64)
        self.dst = np.ascontiguousarray(dst, dtype=np.int64)
        self.time = np.ascontiguousarray(time, dtype=np.float64)
        n = len(self.labels)

        first = np.full(n, np.inf)
        np.minimum.at(first, self.src, self.time)
        np.minimum.at(first, self.dst, self.time)
        self.first_seen = first

        order = np.lexsort((self.time, self.dst))
        counts = np.bincount(self.dst, minlength=n)
        self.in_ptr = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
        self.in_times = self.time[order]
        for arr in (self.src, self.dst, self.time, self.first_seen, self.in_ptr, self.in_times):
            arr.flags.writeable = False

    @property
    def num_nodes(self) -> int:
        return len(self.labels)

    @property
    def num_edges(self) -> int:
        return int(self.time.size)

    @property
    def start(self) -> float:
        return float(self.time[0])

    @property
    def end(self) -> float:
        return float(self.time[-1])

    def edge_count_before(self, t: float) -> int:
        return int(np.searchsorted(self.time, t, side="left"))

    def nodes_before(self, t: float) -> int:
        """Number of nodes that are an endpoint of some edge with time < t."""
        return int(np.searchsorted(self.first_seen, t, side="left"))

    def in_times_of(self, node: int) -> np.ndarray:
        return self.in_times[self.in_ptr[node]:self.in_ptr[node + 1]]

    def edges(self) -> list[TemporalEdge]:
        labels = self.labels
        return [TemporalEdge(labels[s], labels[d], float(t))
                for s, d, t in zip(self.src.tolist(), self.dst.tolist(), self.time.tolist())]

    def __repr__(self):
        return f"TemporalGraph(nodes={self.num_nodes}, edges={self.num_edges})"


def build_graph(edges: Sequence[TemporalEdge], id_map: Sequence | None = None) -> TemporalGraph:
    """Build a :class:`TemporalGraph` from link events.

    Endpoints are treated as node labels.  When ``id_map`` is given, endpoints
    must be integer positions into it and ``id_map[i]`` is the label of ``i``.
    The input is re-sorted by ``(time, source, target)``; nodes are registered
    in order of first appearance in that order.
    """
    if len(edges) == 0:
        raise ValueError("cannot build a graph from an empty edge list")
    ordered = sorted(edges, key=lambda e: (e[2], e[0], e[1]))
    index: dict = {}
    labels: list = []
    src = np.empty(len(ordered), dtype=np.int64)
    dst = np.empty(len(ordered), dtype=np.int64)
    time = np.empty(len(ordered), dtype=np.float64)
    for k, (s, d, t) in enumerate(ordered):
        if not (np.isfinite(t) and t >= 0):
            raise ValueError(f"edge time must be finite and non-negative, got {t!r}")
        for end in (s, d):
            if end not in index:
                index[end] = len(labels)
                labels.append(id_map[end] if id_map is not None else end)
        src[k] = index[s]
        dst[k] = index[d]
        time[k] = t
    return TemporalGraph(labels, src, dst, time)


def graph_from_arrays(src, dst, time) -> TemporalGraph:
    """Vectorised :func:`build_graph` for integer-labelled edge arrays."""
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    time = np.asarray(time, dtype=np.float64)
    if time.size == 0:
        raise ValueError("cannot build a graph from an empty edge list")
    if not (np.all(np.isfinite(time)) and time.min() >= 0):
        raise ValueError("edge times must be finite and non-negative")
    order = np.lexsort((dst, src, time))
    src, dst, time = src[order], dst[order], time[order]
    ends = np.column_stack((src, dst)).ravel()
    uniq, first, inverse = np.unique(ends, return_index=True, return_inverse=True)
    by_appearance = np.argsort(first, kind="stable")
    new_id = np.empty(uniq.size, dtype=np.int64)
    new_id[by_appearance] = np.arange(uniq.size)
    remapped = new_id[inverse.ravel()].reshape(-1, 2)
    return TemporalGraph(uniq[by_appearance].tolist(), remapped[:, 0], remapped[:, 1], time)


@dataclass(frozen=True, eq=False)
class Snapshot:
    """Network state from all edges strictly before ``reference_time``.

    ``src``/``dst`` keep multi-edges.  ``out_ptr``/``out_targets`` give the
    out-adjacency (with multiplicity) in CSR form.
    """

    reference_time: float
    n_nodes: int
    src: np.ndarray
    dst: np.ndarray
    in_degree: np.ndarray = field(init=False)
    out_ptr: np.ndarray = field(init=False)
    out_targets: np.ndarray = field(init=False)

    def __post_init__(self):
        n = self.n_nodes
        src = np.asarray(self.src, dtype=np.int64)
        dst = np.asarray(self.dst, dtype=np.int64)
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise ValueError("edge endpoint outside snapshot node range")
        order = np.argsort(src, kind="stable")
        ptr = np.concatenate(([0], np.cumsum(np.bincount(src, minlength=n)))).astype(np.int64)
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)
        object.__setattr__(self, "in_degree", np.bincount(dst, minlength=n).astype(np.int64))
        object.__setattr__(self, "out_ptr", ptr)
        object.__setattr__(self, "out_targets", dst[order])

    @classmethod
    def from_edges(cls, n_nodes: int, pairs, reference_time: float = float("inf")) -> "Snapshot":
        """Construct a snapshot directly from ``(source, target)`` index pairs."""
        arr = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        return cls(reference_time, n_nodes, arr[:, 0], arr[:, 1])

    @property
    def num_edges(self) -> int:
        return int(self.src.size)

    def out_neighbors(self, node: int) -> np.ndarray:
        return self.out_targets[self.out_ptr[node]:self.out_ptr[node + 1]]


def snapshot_at(graph: TemporalGraph, t: float) -> Snapshot:
    """All edges with time < t, over the nodes that exist before t."""
    m = graph.edge_count_before(t)
    return Snapshot(float(t), graph.nodes_before(t), graph.src[:m], graph.dst[:m])


def window_in_events(graph: TemporalGraph, node: int, start: float, stop: float) -> list[float]:
    """Sorted in-link times ``t_n`` of ``node`` with ``start <= t_n < stop``."""
    if start > stop:
        raise ValueError("window start after window stop")
    if not (isinstance(node, (int, np.integer)) and 0 <= node < graph.num_nodes):
        return []
    times = graph.in_times_of(int(node))
    lo = np.searchsorted(times, start, side="left")
    hi = np.searchsorted(times, stop, side="left")
    return times[lo:hi].tolist()


def window_counts(graph: TemporalGraph, start: float, stop: float, n_nodes: int) -> np.ndarray:
    """In-link counts per node over ``[start, stop)`` for the first ``n_nodes`` nodes.

    Links to nodes with index >= ``n_nodes`` are dropped.
    """
    lo = np.searchsorted(graph.time, start, side="left")
    hi = np.searchsorted(graph.time, stop, side="left")
    dst = graph.dst[lo:hi]
    if n_nodes < graph.num_nodes:
        dst = dst[dst < n_nodes]
    return np.bincount(dst, minlength=n_nodes).astype(np.int64)
