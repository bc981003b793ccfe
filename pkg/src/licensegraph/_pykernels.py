"""Pure-Python implementations of the hot graph kernels.

Same signatures and results as the compiled ``_kernels`` module; used when
the extension is not built or ``LICENSEGRAPH_PURE`` is set.
"""

from __future__ import annotations

import numpy as np


def reverse_reach(indptr, indices, sources):
    """Per-source strict ancestor counts plus the union of all ancestor sets.

    ``indptr``/``indices`` is the CSR of the *reverse* adjacency (dependency
    -> dependents). Returns ``(counts, mask)`` where ``counts[k]`` is the
    number of nodes that reach ``sources[k]`` and ``mask`` flags every node
    that reaches some source other than itself.
    """
    n = len(indptr) - 1
    ptr = indptr.tolist()
    adj = indices.tolist()
    stamp = [-1] * n
    mask = np.zeros(n, dtype=np.uint8)
    counts = np.zeros(len(sources), dtype=np.int64)
    for k, src in enumerate(sources.tolist()):
        stamp[src] = k
        stack = [src]
        found = 0
        while stack:
            u = stack.pop()
            for j in range(ptr[u], ptr[u + 1]):
                v = adj[j]
                if stamp[v] != k:
                    stamp[v] = k
                    mask[v] = 1
                    found += 1
                    stack.append(v)
        counts[k] = found
    return counts, mask


def pagerank(indptr, indices, damping, max_iter, tol):
    """Power iteration over the forward CSR; dangling mass spreads uniformly.

    Returns ``(scores, iterations, converged)``.
    """
    n = len(indptr) - 1
    if n == 0:
        return np.zeros(0), 0, True
    outdeg = np.diff(indptr)
    dangling = outdeg == 0
    src = np.repeat(np.arange(n), outdeg)
    weight = np.zeros(n)
    weight[~dangling] = 1.0 / outdeg[~dangling]
    x = np.full(n, 1.0 / n)
    for it in range(1, max_iter + 1):
        new = np.bincount(indices, weights=(x * weight)[src], minlength=n)
        new = damping * new + (damping * x[dangling].sum() + (1.0 - damping)) / n
        err = np.abs(new - x).sum()
        x = new
        if err < tol:
            return x, it, True
    return x, max_iter, False
