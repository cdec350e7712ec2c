"""Loading interaction logs and generating synthetic evolving networks.

Canonical edge file: one link per line, ``source<TAB>target<TAB>day`` with the
day printed to 6 decimals, sorted by time.
"""

from __future__ import annotations

import math
import os
import tempfile
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .temporal_graph import TemporalEdge, TemporalGraph, graph_from_arrays

SECONDS_PER_DAY = 86400.0
TIME_UNITS = ("days", "epoch-seconds")


class IngestError(ValueError):
    """Base class for dataset loading problems."""


class ParseError(IngestError):
    def __init__(self, path, line_no: int, reason: str):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.line_no = line_no


class EmptyDatasetError(IngestError):
    pass


@dataclass(frozen=True)
class RawInteraction:
    actor_id: str
    object_id: str
    value: float | None
    timestamp: float

    def __post_init__(self):
        if not self.actor_id or not self.object_id:
            raise ValueError("actor and object ids must be non-empty")
        if not (math.isfinite(self.timestamp) and self.timestamp >= 0):
            raise ValueError("timestamp must be finite and non-negative")


@dataclass(frozen=True)
class ColumnMap:
    """Column positions (ints) or header names (strs) for each field."""

    source: int | str = 0
    target: int | str = 1
    value: int | str | None = None
    timestamp: int | str = 2


@dataclass(frozen=True)
class IngestConfig:
    rating_threshold: float = 2
    min_actor_activity: int = 20
    time_unit: str = "epoch-seconds"
    exclude_self_links: bool = True

    def __post_init__(self):
        if self.min_actor_activity < 0:
            raise ValueError("min_actor_activity must be >= 0")
        if self.time_unit not in TIME_UNITS:
            raise ValueError(f"time_unit must be one of {TIME_UNITS}")


def _split(line: str, delimiter: str | None) -> list[str]:
    parts = line.split(delimiter) if delimiter else line.split()
    return [p.strip() for p in parts]


def read_interactions(path, columns: ColumnMap = ColumnMap(), delimiter: str | None = None,
                      header: bool = False) -> list[RawInteraction]:
    """Read raw records from a delimiter-separated file.

    ``delimiter=None`` splits on runs of whitespace.  Blank lines and lines
    starting with ``#`` are skipped.
    """
    path = Path(path)
    records = []
    with path.open("r", encoding="utf-8") as fh:
        lines = enumerate(fh, start=1)
        positions = None
        if header:
            for line_no, line in lines:
                if line.strip():
                    names = _split(line, delimiter)
                    break
            else:
                raise EmptyDatasetError(f"{path}: empty file")
            positions = {}
            for fld in ("source", "target", "value", "timestamp"):
                col = getattr(columns, fld)
                if isinstance(col, str):
                    if col not in names:
                        raise ParseError(path, line_no, f"header has no column {col!r}")
                    col = names.index(col)
                positions[fld] = col
        else:
            positions = {f: getattr(columns, f) for f in ("source", "target", "value", "timestamp")}
            if any(isinstance(c, str) for c in positions.values()):
                raise IngestError("named columns require header=True")

        need = max(c for c in positions.values() if c is not None)
        for line_no, line in lines:
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = _split(line, delimiter)
            if len(parts) <= need:
                raise ParseError(path, line_no, f"expected at least {need + 1} fields, got {len(parts)}")
            actor = parts[positions["source"]]
            obj = parts[positions["target"]]
            if not actor or not obj:
                raise ParseError(path, line_no, "empty node id")
            value = None
            if positions["value"] is not None and parts[positions["value"]] != "":
                try:
                    value = float(parts[positions["value"]])
                except ValueError:
                    raise ParseError(path, line_no, f"non-numeric value {parts[positions['value']]!r}") from None
            try:
                ts = float(parts[positions["timestamp"]])
            except ValueError:
                raise ParseError(path, line_no, f"bad timestamp {parts[positions['timestamp']]!r}") from None
            if not (math.isfinite(ts) and ts >= 0):
                raise ParseError(path, line_no, f"timestamp must be finite and non-negative, got {ts}")
            records.append(RawInteraction(actor, obj, value, ts))
    return records


def preprocess(records: Iterable[RawInteraction], config: IngestConfig = IngestConfig()) -> list[TemporalEdge]:
    """Apply the filtering rules and convert to dataset-relative days.

    Order: rating filter (value must be strictly above the threshold), self-link
    removal, then the per-actor activity floor on what survives.  Days are
    counted from the earliest surviving record.
    """
    kept = [r for r in records
            if (r.value is None or r.value > config.rating_threshold)
            and not (config.exclude_self_links and r.actor_id == r.object_id)]
    activity = Counter(r.actor_id for r in kept)
    kept = [r for r in kept if activity[r.actor_id] >= config.min_actor_activity]
    if not kept:
        raise EmptyDatasetError("empty dataset: no interactions survive filtering")
    scale = SECONDS_PER_DAY if config.time_unit == "epoch-seconds" else 1.0
    origin = min(r.timestamp for r in kept)
    edges = [TemporalEdge(r.actor_id, r.object_id, (r.timestamp - origin) / scale) for r in kept]
    edges.sort(key=lambda e: (e.time, e.source, e.target))
    return edges


def parse_interactions(path, config: IngestConfig = IngestConfig(), columns: ColumnMap = ColumnMap(),
                       delimiter: str | None = None, header: bool = False) -> list[TemporalEdge]:
    """Read an interaction log and return cleaned ``actor -> object`` link events."""
    return preprocess(read_interactions(path, columns, delimiter, header), config)


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temp file in the same directory."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_edges(edges: Iterable[TemporalEdge]) -> str:
    return "".join(f"{e.source}\t{e.target}\t{e.time:.6f}\n" for e in edges)


def write_edge_file(path, edges: Iterable[TemporalEdge]) -> None:
    atomic_write_text(path, format_edges(edges))


def read_edge_file(path) -> list[TemporalEdge]:
    """Read a canonical ``source<TAB>target<TAB>day`` file; ids stay strings."""
    path = Path(path)
    edges = []
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3:
                raise ParseError(path, line_no, f"expected 3 tab-separated fields, got {len(parts)}")
            try:
                day = float(parts[2])
            except ValueError:
                raise ParseError(path, line_no, f"bad day {parts[2]!r}") from None
            if not (math.isfinite(day) and day >= 0):
                raise ParseError(path, line_no, f"day must be finite and non-negative, got {day}")
            edges.append(TemporalEdge(parts[0], parts[1], day))
    if not edges:
        raise EmptyDatasetError(f"{path}: no edges")
    return edges


@dataclass(frozen=True)
class SyntheticConfig:
    """Growing directed network with mixed total-degree / recent-degree attachment.

    Each day ``Poisson(node_arrival_rate)`` nodes arrive and
    ``Poisson(event_rate)`` links are created.  A link's source is uniform over
    the other existing nodes; its target ``i`` is drawn with weight

        recency_weight * (k_i + 1) + (1 - recency_weight) * (R_i + 1)

    where ``k_i`` is the in-degree and ``R_i`` the sum of
    ``exp(-aging_rate * age)`` over ``i``'s in-links, ages in whole days.
    All links created on day ``d`` carry time ``d``.
    """

    node_arrival_rate: float = 10.0
    event_rate: float = 100.0
    horizon: float = 300.0
    recency_weight: float = 0.5
    aging_rate: float = 0.1
    seed: int = 0
    initial_nodes: int = 2

    def __post_init__(self):
        if not 0.0 <= self.recency_weight <= 1.0:
            raise ValueError("recency_weight must lie in [0, 1]")
        if not self.aging_rate >= 0:
            raise ValueError("aging_rate must be >= 0")
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if not (self.node_arrival_rate >= 0 and self.event_rate >= 0):
            raise ValueError("rates must be non-negative")
        if self.initial_nodes < 0:
            raise ValueError("initial_nodes must be >= 0")


def attachment_weights(config: SyntheticConfig, in_degree: np.ndarray, recent: np.ndarray) -> np.ndarray:
    rho = config.recency_weight
    return rho * (in_degree + 1.0) + (1.0 - rho) * (recent + 1.0)


def synthetic_arrays(config: SyntheticConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Generate ``(src, dst, day)`` arrays in creation order (time non-decreasing).

    Randomness comes only from a PCG64 generator seeded with ``config.seed``.
    """
    rng = np.random.Generator(np.random.PCG64(config.seed))
    days = int(math.ceil(config.horizon))
    decay = math.exp(-config.aging_rate)
    cap = max(16, config.initial_nodes + int(config.node_arrival_rate * days * 1.5) + 16)
    in_degree = np.zeros(cap)
    recent = np.zeros(cap)
    n = config.initial_nodes
    chunks_src, chunks_dst, chunks_day = [], [], []
    for day in range(days):
        n += int(rng.poisson(config.node_arrival_rate))
        m = int(rng.poisson(config.event_rate))
        if n > cap:
            grow = n + cap
            in_degree = np.concatenate((in_degree, np.zeros(grow - cap)))
            recent = np.concatenate((recent, np.zeros(grow - cap)))
            cap = grow
        if n >= 2 and m > 0:
            cdf = np.cumsum(attachment_weights(config, in_degree[:n], recent[:n]))
            dst = np.searchsorted(cdf, rng.random(m) * cdf[-1], side="right")
            np.minimum(dst, n - 1, out=dst)
            src = rng.integers(0, n - 1, size=m)
            src += src >= dst
            chunks_src.append(src)
            chunks_dst.append(dst)
            chunks_day.append(np.full(m, day, dtype=np.int64))
            gained = np.bincount(dst, minlength=n)
            in_degree[:n] += gained
            recent[:n] += gained
        recent *= decay
    if not chunks_src:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, empty.astype(float)
    return (np.concatenate(chunks_src), np.concatenate(chunks_dst),
            np.concatenate(chunks_day).astype(float))


def generate_synthetic(config: SyntheticConfig) -> list[TemporalEdge]:
    """Synthetic link events sorted by ``(time, source, target)``."""
    src, dst, day = synthetic_arrays(config)
    order = np.lexsort((dst, src, day))
    return [TemporalEdge(s, d, t) for s, d, t in
            zip(src[order].tolist(), dst[order].tolist(), day[order].tolist())]


def synthetic_graph(config: SyntheticConfig) -> TemporalGraph:
    src, dst, day = synthetic_arrays(config)
    return graph_from_arrays(src, dst, day)
