"""Compiled inner loops shared by the clustering and KNN-graph modules.

Every kernel accumulates in float64 and expects C-contiguous arrays:
samples ``(n, d)`` float64, labels ``(n,)`` int64, composite vectors
``(k, d)`` float64, sizes ``(k,)`` int64, neighbor ids ``(n, kappa)`` int64.
Neighbor rows are kept sorted by ``(distance, id)``.
"""

import numba
import numpy as np


@numba.njit(cache=True)
def sq_dist(a, b):
    s = 0.0
    for j in range(a.shape[0]):
        t = a[j] - b[j]
        s += t * t
    return s


@numba.njit(cache=True)
def move_gain(x, comp_u, n_u, comp_v, n_v):
    """Objective change of moving x from cluster u (n_u >= 2) to cluster v."""
    before_u = 0.0
    before_v = 0.0
    after_u = 0.0
    after_v = 0.0
    for j in range(x.shape[0]):
        du = comp_u[j]
        dv = comp_v[j]
        before_u += du * du
        before_v += dv * dv
        t = du - x[j]
        after_u += t * t
        t = dv + x[j]
        after_v += t * t
    return (after_v / (n_v + 1) - before_v / n_v) + (after_u / (n_u - 1) - before_u / n_u)


@numba.njit(cache=True)
def centroid_sq_dist(x, comp, size):
    s = 0.0
    for j in range(x.shape[0]):
        t = x[j] - comp[j] / size
        s += t * t
    return s


@numba.njit(cache=True)
def apply_move_stats(x, labels, composite, sizes, i, u, v):
    for j in range(x.shape[0]):
        composite[u, j] -= x[j]
        composite[v, j] += x[j]
    sizes[u] -= 1
    sizes[v] += 1
    labels[i] = v


@numba.njit(cache=True)
def accumulate(X, labels, k):
    n, d = X.shape
    composite = np.zeros((k, d))
    sizes = np.zeros(k, np.int64)
    for i in range(n):
        c = labels[i]
        sizes[c] += 1
        for j in range(d):
            composite[c, j] += X[i, j]
    return composite, sizes


@numba.njit(cache=True)
def best_target(x, u, cands, ncand, composite, sizes, boost):
    """Pick the move target among cands[:ncand]; returns (-1, 0.0) when none improves.

    Boost mode maximizes the objective gain (must be > 0). Traditional mode takes
    the nearest centroid when strictly nearer than u's; the returned score is the
    squared-distance reduction. Ties go to the lowest cluster id.
    """
    best_v = -1
    if boost:
        best = 0.0
        for c in range(ncand):
            v = cands[c]
            g = move_gain(x, composite[u], sizes[u], composite[v], sizes[v])
            if g > best or (best_v >= 0 and g == best and v < best_v):
                best = g
                best_v = v
        return best_v, best

    own = centroid_sq_dist(x, composite[u], sizes[u])
    best = own
    for c in range(ncand):
        v = cands[c]
        dd = centroid_sq_dist(x, composite[v], sizes[v])
        if dd < best or (best_v >= 0 and dd == best and v < best_v):
            best = dd
            best_v = v
    if best_v < 0:
        return -1, 0.0
    return best_v, own - best


@numba.njit(cache=True)
def gk_pass(X, labels, composite, sizes, neighbors, order, boost):
    """One pass over `order`, each sample compared with its neighbors' clusters.

    Returns (moves accepted, gain evaluations, smallest accepted score).
    """
    k = sizes.shape[0]
    kappa = neighbors.shape[1]
    mark = np.zeros(k, np.bool_)
    cands = np.empty(kappa, np.int64)
    moves = 0
    evals = 0
    min_gain = np.inf
    for p in range(order.shape[0]):
        i = order[p]
        u = labels[i]
        if sizes[u] < 2:
            continue
        ncand = 0
        for jj in range(kappa):
            c = labels[neighbors[i, jj]]
            if c != u and not mark[c]:
                mark[c] = True
                cands[ncand] = c
                ncand += 1
        for c in range(ncand):
            mark[cands[c]] = False
        if ncand == 0:
            continue
        evals += ncand
        v, g = best_target(X[i], u, cands, ncand, composite, sizes, boost)
        if v >= 0:
            apply_move_stats(X[i], labels, composite, sizes, i, u, v)
            moves += 1
            if g < min_gain:
                min_gain = g
    return moves, evals, min_gain


@numba.njit(cache=True)
def exhaustive_pass(X, labels, composite, sizes, order, boost):
    """Like gk_pass but every other cluster is a candidate (full boost k-means)."""
    k = sizes.shape[0]
    cands = np.empty(max(k - 1, 1), np.int64)
    moves = 0
    evals = 0
    min_gain = np.inf
    for p in range(order.shape[0]):
        i = order[p]
        u = labels[i]
        if sizes[u] < 2 or k < 2:
            continue
        ncand = 0
        for v in range(k):
            if v != u:
                cands[ncand] = v
                ncand += 1
        evals += ncand
        v, g = best_target(X[i], u, cands, ncand, composite, sizes, boost)
        if v >= 0:
            apply_move_stats(X[i], labels, composite, sizes, i, u, v)
            moves += 1
            if g < min_gain:
                min_gain = g
    return moves, evals, min_gain


@numba.njit(cache=True)
def bisect_boost(Xs, side, orders):
    """Two-cluster boost k-means over the rows of Xs; `side` (0/1) is updated in place.

    orders[p] is the visit order of pass p; stops early after a pass without moves.
    """
    m, d = Xs.shape
    composite, sizes = accumulate(Xs, side, 2)
    passes = 0
    for p in range(orders.shape[0]):
        passes += 1
        moved = 0
        for q in range(m):
            a = orders[p, q]
            u = side[a]
            v = 1 - u
            if sizes[u] < 2:
                continue
            if move_gain(Xs[a], composite[u], sizes[u], composite[v], sizes[v]) > 0.0:
                apply_move_stats(Xs[a], side, composite, sizes, a, u, v)
                moved += 1
        if moved == 0:
            break
    return passes


@numba.njit(cache=True)
def try_insert(ids, dists, j, d):
    """Insert (j, d) into a row sorted by (distance, id), evicting its last entry.

    Returns False when j is already present or (d, j) does not beat the last entry.
    """
    last = ids.shape[0] - 1
    if d > dists[last] or (d == dists[last] and j >= ids[last]):
        return False
    for p in range(last + 1):
        if ids[p] == j:
            return False
    p = last
    while p > 0 and (dists[p - 1] > d or (dists[p - 1] == d and ids[p - 1] > j)):
        ids[p] = ids[p - 1]
        dists[p] = dists[p - 1]
        p -= 1
    ids[p] = j
    dists[p] = d
    return True


@numba.njit(cache=True)
def fill_sorted_rows(X, ids):
    """Compute the distances of every (i, ids[i, p]) pair and sort each row in place."""
    n, kappa = ids.shape
    dists = np.empty((n, kappa))
    for i in range(n):
        for p in range(kappa):
            dists[i, p] = sq_dist(X[i], X[ids[i, p]])
        # insertion sort on (distance, id)
        for p in range(1, kappa):
            dj = dists[i, p]
            jj = ids[i, p]
            q = p
            while q > 0 and (
                dists[i, q - 1] > dj or (dists[i, q - 1] == dj and ids[i, q - 1] > jj)
            ):
                dists[i, q] = dists[i, q - 1]
                ids[i, q] = ids[i, q - 1]
                q -= 1
            dists[i, q] = dj
            ids[i, q] = jj
    return dists


@numba.njit(cache=True)
def refine_clusters(X, members, starts, ids, dists):
    """Compare every pair inside each cluster and update both neighbor rows.

    members[starts[c]:starts[c + 1]] lists cluster c in ascending id order.
    Returns (row mutations, distance evaluations).
    """
    updates = 0
    evals = 0
    for c in range(starts.shape[0] - 1):
        lo = starts[c]
        hi = starts[c + 1]
        for a in range(lo, hi):
            i = members[a]
            for b in range(a + 1, hi):
                j = members[b]
                d = sq_dist(X[i], X[j])
                evals += 1
                if try_insert(ids[i], dists[i], j, d):
                    updates += 1
                if try_insert(ids[j], dists[j], i, d):
                    updates += 1
    return updates, evals


@numba.njit(parallel=True, cache=True)
def brute_force_rows(X, kappa):
    n = X.shape[0]
    ids = np.empty((n, kappa), np.int64)
    dists = np.empty((n, kappa))
    for i in numba.prange(n):
        for p in range(kappa):
            ids[i, p] = n
            dists[i, p] = np.inf
        for j in range(n):
            if j != i:
                try_insert(ids[i], dists[i], j, sq_dist(X[i], X[j]))
    return ids, dists


@numba.njit(cache=True)
def rows_match_distances(X, ids, dists, rtol):
    """True when every stored distance equals its recomputed value within rtol."""
    n, kappa = ids.shape
    for i in range(n):
        for p in range(kappa):
            d = sq_dist(X[i], X[ids[i, p]])
            if abs(d - dists[i, p]) > rtol * abs(d):
                return False
    return True
