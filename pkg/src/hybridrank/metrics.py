"""Evaluation of a predicted ranking against future link gain.

Top lists for ground truth (future gain) and for the past window only admit
nodes with a strictly positive gain; a node that received no link is never
"top" however short the list is.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .predictors import rank

TAU_VARIANTS = ("gamma", "b")
_BIN_LIMIT = 4_000_000


@dataclass(frozen=True)
class MetricsReport:
    precision: float | None
    novelty: float | None
    auc: float | None
    tau: float | None
    flags: tuple[str, ...] = field(default=())

    def as_dict(self) -> dict:
        return {"precision": self.precision, "novelty": self.novelty,
                "auc": self.auc, "tau": self.tau}


def top_by_gain(gain, n: int) -> np.ndarray:
    """Top ``n`` nodes by gain, descending, ties to the lower index, zero gain excluded."""
    gain = np.asarray(gain)
    order = np.argsort(-gain, kind="stable")
    order = order[gain[order] > 0]
    return order[:n]


def precision(predicted_top, true_top, n: int) -> float:
    return len(set(np.asarray(predicted_top).tolist()) & set(np.asarray(true_top).tolist())) / n


def novelty(predicted_top, true_top, past_top) -> float | None:
    """Share of truly novel top nodes (not in the past top) that the prediction finds.

    Returns None when the true top list holds no novel node.
    """
    novel = set(np.asarray(true_top).tolist()) - set(np.asarray(past_top).tolist())
    if not novel:
        return None
    return len(novel & set(np.asarray(predicted_top).tolist())) / len(novel)


def auc(scores, true_top) -> float | None:
    """Probability that a true-top node outscores a non-top node (ties count 1/2).

    Computed from ranks in O(N log N).  None if either class is empty.
    """
    s = np.asarray(scores, dtype=float)
    pos = np.zeros(s.size, dtype=bool)
    pos[np.asarray(true_top, dtype=np.int64)] = True
    n_pos = int(pos.sum())
    n_neg = s.size - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    neg_sorted = np.sort(s[~pos])
    p = s[pos]
    below = np.searchsorted(neg_sorted, p, side="left")
    not_above = np.searchsorted(neg_sorted, p, side="right")
    # twice the credit: 2 per beaten negative, 1 per tie
    twice = int(below.sum()) + int(not_above.sum())
    return (twice / 2) / (n_pos * n_neg)


def _discordant_pairs(y: np.ndarray) -> int:
    """Pairs i < j with y[i] > y[j], for non-negative integer ``y``.

    Bottom-up merge counting, vectorised per level.
    """
    n = y.size
    cur = y.astype(np.int64)
    span = np.int64(cur.max() + 1) if n else np.int64(1)
    idx = np.arange(n, dtype=np.int64)
    total = 0
    width = 1
    while width < n:
        block = idx // (2 * width)
        in_right = (idx // width) % 2 == 1
        # cur is sorted inside each width-block; offsetting by block id keeps
        # the concatenated left halves globally sorted
        keys = block * span + cur
        left_keys = keys[~in_right]
        block_end = np.searchsorted(left_keys, (block[in_right] + 1) * span, side="left")
        not_greater = np.searchsorted(left_keys, keys[in_right], side="right")
        total += int((block_end - not_greater).sum())
        # merge: sort each 2*width block
        cur = cur[np.lexsort((cur, block))]
        width *= 2
    return total


def _discordant_by_bins(a: np.ndarray, b: np.ndarray, k: int) -> int:
    """Pairs with a_i < a_j and b_i > b_j, for integer ranks ``b`` in ``[0, k)``.

    Prefix histograms over the a-sorted order; cost O(N k), used for small k.
    """
    n = a.size
    order = np.lexsort((b, a))
    a, b = a[order], b[order]
    # first position of each a-tie group; only strictly smaller a counts
    starts = np.flatnonzero(np.concatenate(([True], a[1:] != a[:-1])))
    group_start = np.repeat(starts, np.diff(np.append(starts, n)))
    hist = np.zeros((n + 1, k), dtype=np.int64)
    hist[np.arange(1, n + 1), b] = 1
    np.cumsum(hist, axis=0, out=hist)
    np.cumsum(hist, axis=1, out=hist)
    not_greater = hist[group_start, b]
    return int((group_start - not_greater).sum())


def _tied_pairs(values: np.ndarray) -> int:
    _, counts = np.unique(values, return_counts=True)
    return int((counts * (counts - 1) // 2).sum())


def concordance(x, y) -> tuple[int, int, int, int, int]:
    """Return ``(C, D, pairs, ties_x, ties_y)``; pairs tied in x or y are in neither C nor D."""
    x = np.asarray(x)
    y = np.asarray(y)
    n = x.size
    if y.size != n:
        raise ValueError("score vectors differ in length")
    pairs = n * (n - 1) // 2
    if n < 2:
        return 0, 0, pairs, 0, 0
    xr = np.unique(x, return_inverse=True)[1].ravel()
    yr = np.unique(y, return_inverse=True)[1].ravel()
    kx, ky = int(xr.max()) + 1, int(yr.max()) + 1
    if min(kx, ky) * n <= _BIN_LIMIT:
        disc = _discordant_by_bins(xr, yr, ky) if ky <= kx else _discordant_by_bins(yr, xr, kx)
    else:
        disc = _discordant_pairs(yr[np.lexsort((yr, xr))])
    tx = _tied_pairs(xr)
    ty = _tied_pairs(yr)
    txy = _tied_pairs(xr * np.int64(yr.max() + 1) + yr)
    conc = pairs - tx - ty + txy - disc
    return conc, disc, pairs, tx, ty


def kendall_tau(scores, truth, variant: str = "gamma") -> float | None:
    """Rank correlation ``(C - D) / (C + D)``.

    ``variant="b"`` gives tau-b, ``(C - D) / sqrt((P - Tx)(P - Ty))``.
    Returns None when the denominator is zero.
    """
    if variant not in TAU_VARIANTS:
        raise ValueError(f"unknown tau variant {variant!r}")
    c, d, pairs, tx, ty = concordance(scores, truth)
    if variant == "gamma":
        return (c - d) / (c + d) if c + d else None
    denom = float(pairs - tx) * float(pairs - ty)
    return float((c - d) / np.sqrt(denom)) if denom > 0 else None


def evaluate(scores, future_gain, past_gain, n: int = 100, tau_variant: str = "gamma",
             degenerate: bool = False) -> MetricsReport:
    """All four metrics for one prediction.

    ``scores`` orders nodes (higher is better); ``future_gain`` and
    ``past_gain`` are link counts over the future and past windows, all over
    the same node set.
    """
    scores = np.asarray(scores, dtype=float)
    if not (scores.size == np.size(future_gain) == np.size(past_gain)):
        raise ValueError("score and gain vectors must cover the same nodes")
    flags = ["degenerate_scores"] if degenerate else []
    predicted_top = rank(scores, n)
    true_top = top_by_gain(future_gain, n)
    past_top = top_by_gain(past_gain, n)

    p = precision(predicted_top, true_top, n)
    q = novelty(predicted_top, true_top, past_top)
    if q is None:
        flags.append("novelty:no_novel_items")
    a = auc(scores, true_top)
    if a is None:
        flags.append("auc:single_class")
    tau = kendall_tau(scores, future_gain, tau_variant) if scores.size >= 2 else None
    if tau is None:
        flags.append("tau:no_comparable_pairs")
    return MetricsReport(p, q, a, tau, tuple(flags))
