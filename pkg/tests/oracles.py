"""Reference implementations that share no code path with the package.

Walk counts are enumerated walk by walk with a depth-limited DFS over plain
adjacency lists; PageRank is a dense power iteration on the full Google
matrix; ranks are enumerated by sorting Python lists.
"""
import math

import numpy as np


def adjacency_lists(n, edges):
    out = [[] for _ in range(n)]
    for cited, citing in edges:
        out[cited].append(citing)
    return out


def count_walks(adj, start, length):
    """Number of distinct walks with exactly ``length`` edges leaving ``start``."""
    if length == 0:
        return 1
    return sum(count_walks(adj, nxt, length - 1) for nxt in adj[start])


def brute_sindex(n, edges, decay, walk_length):
    adj = adjacency_lists(n, edges)
    return [
        sum(decay**i * count_walks(adj, p, i) for i in range(1, walk_length + 1))
        for p in range(n)
    ]


def dense_pagerank(n, edges, damping, tol=1e-15, max_iter=100_000):
    refs = np.zeros(n)
    for _cited, citing in edges:
        refs[citing] += 1
    google = np.zeros((n, n))
    for cited, citing in edges:
        google[cited, citing] += damping / refs[citing]
    for q in range(n):
        if refs[q] == 0:
            google[:, q] += damping / n
    google += (1 - damping) / n
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = google @ x
        if np.abs(nxt - x).sum() < tol:
            return nxt
        x = nxt
    return x


def formula_spearman(x, y):
    """1 - 6 sum d^2 / (n (n^2 - 1)) with ranks by enumeration; no ties allowed."""
    n = len(x)
    rx = {i: r for r, i in enumerate(sorted(range(n), key=lambda i: x[i]), start=1)}
    ry = {i: r for r, i in enumerate(sorted(range(n), key=lambda i: y[i]), start=1)}
    d2 = sum((rx[i] - ry[i]) ** 2 for i in range(n))
    return 1 - 6 * d2 / (n * (n * n - 1))


def enumerate_recall(keys, values, labels, fraction):
    order = sorted(range(len(keys)), key=lambda i: (-values[i], keys[i]))
    cutoff = math.ceil(fraction * len(keys))
    top = {keys[i] for i in order[:cutoff]}
    labels = [k for k in labels if k in set(keys)]
    return sum(1 for k in labels if k in top) / len(labels)
