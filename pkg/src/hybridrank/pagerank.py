"""Matrix-free PageRank on a snapshot.

Convention: ``alpha`` is the probability of following a link and ``1 - alpha``
the teleport probability, i.e. the iteration is

    PR <- alpha * S @ PR + (1 - alpha) / N

where ``S`` is the column-stochastic transition matrix with dangling columns
replaced by ``1/N``.  Note many texts use the damping factor the other way
around; ``alpha=0.85`` here is the classic setting, ``alpha=0.1`` is mostly
teleportation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .temporal_graph import Snapshot


class ConvergenceError(RuntimeError):
    def __init__(self, iterations: int, residual: float):
        super().__init__(f"PageRank did not converge in {iterations} iterations "
                         f"(last L1 residual {residual:.3e})")
        self.iterations = iterations
        self.residual = residual


@dataclass(frozen=True)
class PageRankConfig:
    alpha: float = 0.1
    tolerance: float = 1e-10
    max_iterations: int = 1000

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True, eq=False)
class LinkStructure:
    """Deduplicated link set of a snapshot, the binary adjacency behind ``S``."""

    n_nodes: int
    src: np.ndarray
    dst: np.ndarray
    out_degree: np.ndarray

    @classmethod
    def from_snapshot(cls, snapshot: Snapshot) -> "LinkStructure":
        n = snapshot.n_nodes
        if snapshot.num_edges:
            keys = np.unique(snapshot.src * np.int64(n) + snapshot.dst)
            src, dst = np.divmod(keys, np.int64(n))
        else:
            src = dst = np.empty(0, dtype=np.int64)
        return cls(n, src, dst, np.bincount(src, minlength=n).astype(np.int64))

    @property
    def dangling(self) -> np.ndarray:
        return self.out_degree == 0


def transition_column(snapshot: Snapshot, node: int) -> dict[int, float]:
    """Column ``node`` of ``S`` as a sparse ``{row: weight}`` mapping."""
    n = snapshot.n_nodes
    if not 0 <= node < n:
        raise IndexError(f"node {node} not in snapshot of {n} nodes")
    targets = np.unique(snapshot.out_neighbors(node))
    if targets.size == 0:
        return {i: 1.0 / n for i in range(n)}
    w = 1.0 / targets.size
    return {int(i): w for i in targets}


def pagerank(snapshot: Snapshot | LinkStructure, config: PageRankConfig = PageRankConfig()) -> np.ndarray:
    """Power iteration for the PageRank vector of ``snapshot``.

    Dangling mass is redistributed uniformly inside each step instead of
    materialising the dangling correction matrix.  Iteration starts from the
    uniform vector and stops once the L1 change drops below
    ``config.tolerance``.  Raises :class:`ConvergenceError` otherwise.
    """
    links = snapshot if isinstance(snapshot, LinkStructure) else LinkStructure.from_snapshot(snapshot)
    n = links.n_nodes
    if n < 1:
        raise ValueError("PageRank needs at least one node")
    if links.src.size == 0:
        # every column is the uniform dangling column, so uniform is the fixed point
        return np.full(n, 1.0 / n)
    alpha = config.alpha
    src, dst = links.src, links.dst
    has_out = links.out_degree > 0
    inv_out = np.zeros(n)
    inv_out[has_out] = 1.0 / links.out_degree[has_out]
    dangling = ~has_out
    teleport = (1.0 - alpha) / n

    x = np.full(n, 1.0 / n)
    residual = np.inf
    for _ in range(config.max_iterations):
        share = x * inv_out
        # bincount accumulates in edge order, so the sum is reproducible
        y = np.bincount(dst, weights=share[src], minlength=n)
        dangling_mass = x[dangling].sum()
        new = alpha * (y + dangling_mass / n) + teleport
        residual = np.abs(new - x).sum()
        x = new
        if residual < config.tolerance:
            return x / x.sum()
    raise ConvergenceError(config.max_iterations, float(residual))
