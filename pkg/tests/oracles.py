"""Slow reference implementations used only by the tests.

Nothing here imports from hybridrank; each function recomputes its quantity
from first principles (dense matrices, exact fractions, all-pairs loops).
"""

from fractions import Fraction
from itertools import combinations
import math

import numpy as np


def dense_google_matrix(n, pairs, alpha):
    """M = alpha * S + (1 - alpha)/n * ones, S with uniform dangling columns."""
    targets = {j: set() for j in range(n)}
    for s, d in pairs:
        targets[s].add(d)
    S = np.zeros((n, n))
    for j in range(n):
        if targets[j]:
            for i in targets[j]:
                S[i, j] = 1.0 / len(targets[j])
        else:
            S[:, j] = 1.0 / n
    return alpha * S + (1.0 - alpha) / n * np.ones((n, n)), S


def dense_pagerank(n, pairs, alpha):
    """Solve (I - alpha S) x = (1 - alpha)/n * 1 and normalise."""
    _, S = dense_google_matrix(n, pairs, alpha)
    x = np.linalg.solve(np.eye(n) - alpha * S, np.full(n, (1.0 - alpha) / n))
    return x / x.sum()


def exact_pagerank(n, pairs, alpha):
    """PageRank in exact rational arithmetic (Gauss-Jordan on Fractions)."""
    alpha = Fraction(alpha).limit_denominator(10**6)
    targets = {j: set() for j in range(n)}
    for s, d in pairs:
        targets[s].add(d)
    A = [[Fraction(int(i == j)) for j in range(n)] + [(1 - alpha) / n] for i in range(n)]
    for j in range(n):
        col = [(i, Fraction(1, len(targets[j]))) for i in targets[j]] if targets[j] \
            else [(i, Fraction(1, n)) for i in range(n)]
        for i, w in col:
            A[i][j] -= alpha * w
    for c in range(n):
        p = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [v / piv for v in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    x = [A[i][n] for i in range(n)]
    total = sum(x)
    return [v / total for v in x]


def top_list(gain, n):
    """Top n indices by positive gain, ties to the lower index."""
    items = sorted((i for i in range(len(gain)) if gain[i] > 0), key=lambda i: (-gain[i], i))
    return items[:n]


def ranked(scores, n):
    return sorted(range(len(scores)), key=lambda i: (-scores[i], i))[:n]


def brute_precision(pred, true, n):
    return sum(1 for p in pred if p in set(true)) / n


def brute_novelty(pred, true, past):
    novel = [x for x in true if x not in set(past)]
    if not novel:
        return None
    return sum(1 for x in novel if x in set(pred)) / len(novel)


def brute_auc(scores, true_top):
    pos = set(true_top)
    neg = [q for q in range(len(scores)) if q not in pos]
    if not pos or not neg:
        return None
    total = 0.0
    for p in pos:
        for q in neg:
            total += 1.0 if scores[p] > scores[q] else 0.5 if scores[p] == scores[q] else 0.0
    return total / (len(pos) * len(neg))


def brute_counts(x, y):
    c = d = 0
    for i, j in combinations(range(len(x)), 2):
        s = (x[i] > x[j]) - (x[i] < x[j])
        t = (y[i] > y[j]) - (y[i] < y[j])
        if s * t > 0:
            c += 1
        elif s * t < 0:
            d += 1
    return c, d


def brute_tau(x, y):
    c, d = brute_counts(x, y)
    return (c - d) / (c + d) if c + d else None


def brute_pipeline(edges, t, tp, tf, variant, n, gamma=0.1, alpha=0.1, delta=0.5, lam=0.5):
    """Full prediction + evaluation for integer-labelled ``(src, dst, time)`` edges.

    Node indices follow first appearance in (time, src, dst) order, which only
    matters for tie-breaking.  Novelty's past reference is in-degree at t - tp.
    """
    edges = sorted(edges, key=lambda e: (e[2], e[0], e[1]))
    index = {}
    for s, d, _ in edges:
        for v in (s, d):
            index.setdefault(v, len(index))
    first = {}
    for s, d, when in edges:
        for v in (s, d):
            first.setdefault(index[v], when)
    nodes = [i for i in range(len(index)) if first[i] < t]
    N = len(nodes)
    before = [(index[s], index[d], w) for s, d, w in edges if w < t]
    k_now = [sum(1 for _, d, _ in before if d == i) for i in range(N)]
    k_then = [sum(1 for _, d, w in before if d == i and w < t - tp) for i in range(N)]
    window = [k_now[i] - k_then[i] for i in range(N)]
    decayed = [sum(math.exp(gamma * (w - t)) for _, d, w in before if d == i and w >= t - tp)
               for i in range(N)]
    future = [sum(1 for s, d, w in edges if index[d] == i and t <= w < t + tf) for i in range(N)]

    pr = [float(v) for v in exact_pagerank(N, [(s, d) for s, d, _ in before], alpha)]
    total_a = sum(decayed)
    prob = [a / total_a if total_a > 0 else 0.0 for a in decayed]
    if variant == "m1":
        scores = [pr[i] * decayed[i] for i in range(N)]
    elif variant == "m2":
        scores = [pr[i] * (1 + prob[i]) for i in range(N)]
    elif variant == "m3":
        scores = [delta * pr[i] + (1 - delta) * prob[i] for i in range(N)]
    elif variant == "pagerank":
        scores = pr
    elif variant == "pbp":
        scores = [k_now[i] - lam * k_then[i] for i in range(N)]
    elif variant == "recent":
        scores = [float(w) for w in window]
    else:
        raise ValueError(variant)

    pred = ranked(scores, n)
    true = top_list(future, n)
    past = top_list(k_then, n)
    return {
        "precision": brute_precision(pred, true, n),
        "novelty": brute_novelty(pred, true, past),
        "auc": brute_auc(scores, true),
        "tau": brute_tau(scores, future),
        "scores": scores,
    }
