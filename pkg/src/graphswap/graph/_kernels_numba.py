"""Numba-compiled graph kernels over CSR adjacency arrays.

All kernels take ``indptr``/``indices`` (int64, symmetric CSR) and are
written as plain loops so the numpy fallback can mirror them statement for
statement — both backends must produce the same numbers.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def connected_components(indptr, indices):
    n = indptr.shape[0] - 1
    labels = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    comp = 0
    for s in range(n):
        if labels[s] >= 0:
            continue
        labels[s] = comp
        queue[0] = s
        head, tail = 0, 1
        while head < tail:
            v = queue[head]
            head += 1
            for ei in range(indptr[v], indptr[v + 1]):
                w = indices[ei]
                if labels[w] < 0:
                    labels[w] = comp
                    queue[tail] = w
                    tail += 1
        comp += 1
    return labels


@njit(cache=True)
def closeness_sums(indptr, indices):
    """Per-node sum of BFS distances to reachable nodes, and reach counts."""
    n = indptr.shape[0] - 1
    sums = np.zeros(n, np.int64)
    counts = np.zeros(n, np.int64)
    dist = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    for s in range(n):
        for i in range(n):
            dist[i] = -1
        dist[s] = 0
        queue[0] = s
        head, tail = 0, 1
        total = 0
        reached = 0
        while head < tail:
            v = queue[head]
            head += 1
            dv = dist[v]
            if v != s:
                total += dv
                reached += 1
            for ei in range(indptr[v], indptr[v + 1]):
                w = indices[ei]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    queue[tail] = w
                    tail += 1
        sums[s] = total
        counts[s] = reached
    return sums, counts


@njit(cache=True)
def betweenness(indptr, indices):
    """Exact betweenness (Brandes accumulation), halved for undirectedness."""
    n = indptr.shape[0] - 1
    cb = np.zeros(n, np.float64)
    dist = np.empty(n, np.int64)
    sigma = np.zeros(n, np.float64)
    delta = np.zeros(n, np.float64)
    order = np.empty(n, np.int64)
    preds = np.empty(indices.shape[0], np.int64)
    pred_cnt = np.zeros(n, np.int64)
    for s in range(n):
        for i in range(n):
            dist[i] = -1
            sigma[i] = 0.0
            pred_cnt[i] = 0
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        head, tail = 0, 1
        while head < tail:
            v = order[head]
            head += 1
            dv = dist[v]
            for ei in range(indptr[v], indptr[v + 1]):
                w = indices[ei]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    order[tail] = w
                    tail += 1
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
                    preds[indptr[w] + pred_cnt[w]] = v
                    pred_cnt[w] += 1
        for i in range(tail - 1, -1, -1):
            w = order[i]
            coeff = (1.0 + delta[w]) / sigma[w]
            for j in range(pred_cnt[w]):
                v = preds[indptr[w] + j]
                delta[v] += sigma[v] * coeff
            if w != s:
                cb[w] += delta[w]
        for i in range(tail):
            delta[order[i]] = 0.0
    for i in range(n):
        cb[i] *= 0.5
    return cb


@njit(cache=True)
def power_iteration(indptr, indices, weights, tol, max_iter):
    """Leading eigenpair of the (non-negative) adjacency matrix.

    Iterates with A + I so graphs with symmetric spectra (stars, bipartite
    components) cannot trap the iterate in a two-cycle; the reported residual
    is ||A u - lambda u|| for the unshifted matrix.
    """
    n = indptr.shape[0] - 1
    x = np.full(n, 1.0 / np.sqrt(n), np.float64)
    lam = 0.0
    resid = np.inf
    y = np.empty(n, np.float64)
    for it in range(1, max_iter + 1):
        for v in range(n):
            acc = x[v]
            for ei in range(indptr[v], indptr[v + 1]):
                acc += weights[ei] * x[indices[ei]]
            y[v] = acc
        mu = 0.0
        for v in range(n):
            mu += x[v] * y[v]
        rr = 0.0
        for v in range(n):
            d = y[v] - mu * x[v]
            rr += d * d
        lam = mu - 1.0
        resid = np.sqrt(rr)
        if resid <= tol:
            return lam, x, it, resid, True
        norm = 0.0
        for v in range(n):
            norm += y[v] * y[v]
        norm = np.sqrt(norm)
        if norm == 0.0:
            return 0.0, x, it, 0.0, True
        for v in range(n):
            x[v] = y[v] / norm
    return lam, x, max_iter, resid, False


@njit(cache=True)
def within_k_hops(indptr, indices, src, dst, k):
    """True when dst is reachable from src in at most k hops."""
    if src == dst:
        return True
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    dist[src] = 0
    queue[0] = src
    head, tail = 0, 1
    while head < tail:
        v = queue[head]
        head += 1
        dv = dist[v]
        if dv >= k:
            continue
        for ei in range(indptr[v], indptr[v + 1]):
            w = indices[ei]
            if w == dst:
                return True
            if dist[w] < 0:
                dist[w] = dv + 1
                queue[tail] = w
                tail += 1
    return False
