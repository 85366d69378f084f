"""Pure numpy/python fallback kernels.

Mirrors the numba backend statement for statement (bar the vectorized
matvec in power iteration) so both backends agree numerically. Selected via
GRAPHSWAP_BACKEND=numpy or automatically when numba is unavailable.
"""
import numpy as np


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


def closeness_sums(indptr, indices):
    n = indptr.shape[0] - 1
    sums = np.zeros(n, np.int64)
    counts = np.zeros(n, np.int64)
    ind = [indices[indptr[v] : indptr[v + 1]].tolist() for v in range(n)]
    for s in range(n):
        dist = [-1] * n
        dist[s] = 0
        queue = [s]
        head = 0
        total = 0
        reached = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            dv = dist[v]
            if v != s:
                total += dv
                reached += 1
            for w in ind[v]:
                if dist[w] < 0:
                    dist[w] = dv + 1
                    queue.append(w)
        sums[s] = total
        counts[s] = reached
    return sums, counts


def betweenness(indptr, indices):
    n = indptr.shape[0] - 1
    cb = np.zeros(n, np.float64)
    ind = [indices[indptr[v] : indptr[v + 1]].tolist() for v in range(n)]
    base = indptr.tolist()
    preds = [0] * int(indices.shape[0])
    for s in range(n):
        dist = [-1] * n
        sigma = [0.0] * n
        pred_cnt = [0] * n
        delta = [0.0] * n
        dist[s] = 0
        sigma[s] = 1.0
        order = [s]
        head = 0
        while head < len(order):
            v = order[head]
            head += 1
            dv = dist[v]
            for w in ind[v]:
                if dist[w] < 0:
                    dist[w] = dv + 1
                    order.append(w)
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
                    preds[base[w] + pred_cnt[w]] = v
                    pred_cnt[w] += 1
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for j in range(pred_cnt[w]):
                v = preds[base[w] + j]
                delta[v] += sigma[v] * coeff
            if w != s:
                cb[w] += delta[w]
    return cb * 0.5


def power_iteration(indptr, indices, weights, tol, max_iter):
    n = indptr.shape[0] - 1
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    x = np.full(n, 1.0 / np.sqrt(n), np.float64)
    lam = 0.0
    resid = np.inf
    for it in range(1, max_iter + 1):
        y = x + np.bincount(rows, weights=weights * x[indices], minlength=n)
        mu = float(x @ y)
        resid = float(np.linalg.norm(y - mu * x))
        lam = mu - 1.0
        if resid <= tol:
            return lam, x, it, resid, True
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            return 0.0, x, it, 0.0, True
        x = y / norm
    return lam, x, max_iter, resid, False


def within_k_hops(indptr, indices, src, dst, k):
    if src == dst:
        return True
    n = indptr.shape[0] - 1
    dist = [-1] * n
    dist[src] = 0
    queue = [src]
    head = 0
    while head < len(queue):
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
                queue.append(w)
    return False
