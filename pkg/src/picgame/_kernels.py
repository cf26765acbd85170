"""Compiled inner loops for large graphs.

All distances are integer live-path lengths with arc length equal to the
arc's rank in its source's attempt order.  ``UNREACHED`` stands in for an
infinite distance.  Labelled searches settle nodes in ``(distance, label)``
order, where a smaller label means a higher cascade priority, so a node's
label is that of the highest-priority cascade among its earliest arrivals.

Heaps hold packed int64 keys: ``dist << 36 | label << 28 | node``.  A
distance never exceeds the arc count, so callers must keep node count below
2**28, labels below 2**8 and arc count below 2**27 (see ``check_limits``).
"""

import math

import numpy as np
from numba import njit

UNREACHED = np.int64(2**62)
NODE_BITS = 28
LABEL_BITS = 8
DIST_SHIFT = NODE_BITS + LABEL_BITS
NODE_MASK = (1 << NODE_BITS) - 1
LABEL_MASK = (1 << LABEL_BITS) - 1


def check_limits(node_count, arc_count, n_labels=1):
    if node_count >= 2**NODE_BITS or arc_count >= 2**27 or n_labels > 2**LABEL_BITS:
        raise ValueError("network too large for the compiled kernels")


def node_probs(indptr, probs):
    """Per node, its common out-arc probability, or -1 when they differ."""
    n = len(indptr) - 1
    out = np.full(n, -1.0)
    for u in range(n):
        p = probs[indptr[u]:indptr[u + 1]]
        if len(p) and np.all(p == p[0]):
            out[u] = p[0]
    return out


@njit(cache=True)
def _trial_seed(seed, t):
    # splitmix64 finaliser over (seed, trial)
    z = (np.uint64(seed) + np.uint64(t + 1) * np.uint64(0x9E3779B97F4A7C15))
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return np.int64(z >> np.uint64(33))


@njit(cache=True)
def _push(h, size, key):
    i = size
    while i > 0:
        p = (i - 1) >> 1
        if h[p] <= key:
            break
        h[i] = h[p]
        i = p
    h[i] = key
    return size + 1


@njit(cache=True)
def _pop(h, size):
    """Remove the minimum; the caller reads ``h[0]`` first."""
    size -= 1
    last = h[size]
    i = 0
    while True:
        c = 2 * i + 1
        if c >= size:
            break
        if c + 1 < size and h[c + 1] < h[c]:
            c += 1
        if h[c] >= last:
            break
        h[i] = h[c]
        i = c
    if size > 0:
        h[i] = last
    return size


@njit(cache=True)
def _draw(lo, deg, probs, pu, mark, perm, out_a, out_r):
    """Live out-arcs of one node and their attempt ranks.

    Each arc is live independently; the live arcs get distinct ranks drawn
    uniformly from 1..deg, which is how they sit in a uniform attempt order.
    Writes arc ids to ``out_a`` and ranks to ``out_r``; returns their count.
    """
    L = 0
    if pu >= 1.0:
        for j in range(deg):
            out_a[L] = lo + j
            L += 1
    elif pu > 0.0:
        # geometric skips between live arcs
        lq = math.log1p(-pu)
        j = -1
        while True:
            j += 1 + int(math.floor(math.log(1.0 - np.random.random()) / lq))
            if j >= deg:
                break
            out_a[L] = lo + j
            L += 1
    elif pu < 0.0:
        for j in range(deg):
            if np.random.random() < probs[lo + j]:
                out_a[L] = lo + j
                L += 1
    if L == 0:
        return 0
    if 2 * L > deg:
        for j in range(deg):
            perm[j] = j
        for i in range(L):
            j = np.random.randint(i, deg)
            tmp = perm[i]
            perm[i] = perm[j]
            perm[j] = tmp
            out_r[i] = perm[i] + 1
    else:
        for i in range(L):
            r = np.random.randint(0, deg)
            while mark[r]:
                r = np.random.randint(0, deg)
            mark[r] = True
            out_r[i] = r + 1
        for i in range(L):
            mark[out_r[i] - 1] = False
    return L


@njit(cache=True)
def lazy_trials(indptr, targets, probs, pnode, seed_label, n_labels, trials, seed, max_round, round_label):
    """Monte Carlo over realizations sampled lazily as nodes settle.

    Returns per-trial counts for each label, plus the sum and sum of squares
    over trials of the cumulative ``round_label`` count after each step
    ``0..max_round``.
    """
    n = len(indptr) - 1
    m = len(targets)
    counts = np.zeros((trials, n_labels), dtype=np.int64)
    rsum = np.zeros(max_round + 1, dtype=np.float64)
    rsq = np.zeros(max_round + 1, dtype=np.float64)
    settled = np.zeros(n, dtype=np.bool_)
    touched = np.empty(n, dtype=np.int64)
    maxdeg = 0
    for u in range(n):
        maxdeg = max(maxdeg, indptr[u + 1] - indptr[u])
    mark = np.zeros(maxdeg, dtype=np.bool_)
    perm = np.empty(maxdeg, dtype=np.int64)
    la = np.empty(maxdeg, dtype=np.int64)
    lr = np.empty(maxdeg, dtype=np.int64)
    heap = np.empty(n + m + 1, dtype=np.int64)
    hist = np.zeros(max_round + 1, dtype=np.int64)
    for t in range(trials):
        np.random.seed(_trial_seed(seed, t))
        size = 0
        for u in range(n):
            if seed_label[u] >= 0:
                size = _push(heap, size, (seed_label[u] << NODE_BITS) | u)
        ntouched = 0
        hist[:] = 0
        while size > 0:
            key = heap[0]
            size = _pop(heap, size)
            u = key & NODE_MASK
            if settled[u]:
                continue
            lab = (key >> NODE_BITS) & LABEL_MASK
            d = key >> DIST_SHIFT
            settled[u] = True
            touched[ntouched] = u
            ntouched += 1
            counts[t, lab] += 1
            if lab == round_label and d <= max_round:
                hist[d] += 1
            lo = indptr[u]
            L = _draw(lo, indptr[u + 1] - lo, probs, pnode[u], mark, perm, la, lr)
            for i in range(L):
                v = targets[la[i]]
                if not settled[v]:
                    size = _push(heap, size, ((d + lr[i]) << DIST_SHIFT) | (lab << NODE_BITS) | v)
        for i in range(ntouched):
            settled[touched[i]] = False
        acc = 0
        for r in range(max_round + 1):
            acc += hist[r]
            rsum[r] += acc
            rsq[r] += acc * acc
    return counts, rsum, rsq


@njit(cache=True)
def sample_live(indptr, targets, probs, pnode, seed):
    """One realization, compacted to its live arcs: (indptr, targets, lengths)."""
    np.random.seed(seed)
    n = len(indptr) - 1
    m = len(targets)
    out_t = np.empty(m, dtype=np.int64)
    out_w = np.empty(m, dtype=np.int64)
    lptr = np.zeros(n + 1, dtype=np.int64)
    maxdeg = 0
    for u in range(n):
        maxdeg = max(maxdeg, indptr[u + 1] - indptr[u])
    mark = np.zeros(maxdeg, dtype=np.bool_)
    perm = np.empty(maxdeg, dtype=np.int64)
    la = np.empty(maxdeg, dtype=np.int64)
    lr = np.empty(maxdeg, dtype=np.int64)
    k = 0
    for u in range(n):
        lo = indptr[u]
        L = _draw(lo, indptr[u + 1] - lo, probs, pnode[u], mark, perm, la, lr)
        for i in range(L):
            out_t[k] = targets[la[i]]
            out_w[k] = lr[i]
            k += 1
        lptr[u + 1] = k
    return lptr, out_t[:k].copy(), out_w[:k].copy()


@njit(cache=True)
def _dijkstra(lptr, lt, lw, base, sources, dist, heap):
    dist[:] = UNREACHED
    size = 0
    for s in sources:
        dist[s] = 0
        size = _push(heap, size, s)
    while size > 0:
        key = heap[0]
        size = _pop(heap, size)
        u = key & NODE_MASK
        d = key >> DIST_SHIFT
        if d > dist[u]:
            continue
        for a in range(lptr[u], lptr[u + 1]):
            v = lt[base + a]
            nd = d + lw[base + a]
            if nd < dist[v]:
                dist[v] = nd
                size = _push(heap, size, (nd << DIST_SHIFT) | v)


@njit(cache=True)
def sample_rumor_counts(lptr, lt, lw, bases, rumor, union):
    """Rumor-active count in each stored realization for one positive union."""
    R = lptr.shape[0]
    n = lptr.shape[1] - 1
    out = np.zeros(R, dtype=np.int64)
    dr = np.empty(n, dtype=np.int64)
    dx = np.empty(n, dtype=np.int64)
    heap = np.empty(n + len(lt) + 1, dtype=np.int64)
    for s in range(R):
        _dijkstra(lptr[s], lt, lw, bases[s], rumor, dr, heap)
        _dijkstra(lptr[s], lt, lw, bases[s], union, dx, heap)
        c = 0
        for u in range(n):
            if dr[u] < UNREACHED and dr[u] <= dx[u]:
                c += 1
        out[s] = c
    return out


@njit(cache=True)
def sample_gains(lptr, lt, lw, bases, rumor, union, candidates):
    """Per-realization totals, for each candidate ``v``, of rumor-active nodes
    under ``union`` that ``union + {v}`` would save.

    A node is saved by ``v`` when its live distance from ``v`` is strictly
    below its distance from the rumor.  The search from ``v`` stops expanding
    at nodes it does not reach strictly first, since no saved node lies
    beyond them on a shortest path.
    """
    R = lptr.shape[0]
    n = lptr.shape[1] - 1
    gains = np.zeros(len(candidates), dtype=np.int64)
    dr = np.empty(n, dtype=np.int64)
    dx = np.empty(n, dtype=np.int64)
    bound = np.empty(n, dtype=np.int64)
    dv = np.full(n, UNREACHED, dtype=np.int64)
    touched = np.empty(n, dtype=np.int64)
    heap = np.empty(n + len(lt) + 1, dtype=np.int64)
    for s in range(R):
        ptr = lptr[s]
        base = bases[s]
        _dijkstra(ptr, lt, lw, base, rumor, dr, heap)
        _dijkstra(ptr, lt, lw, base, union, dx, heap)
        for u in range(n):
            bound[u] = min(dr[u], dx[u])
        for ci in range(len(candidates)):
            v = candidates[ci]
            if bound[v] == 0:
                continue
            size = _push(heap, 0, v)
            dv[v] = 0
            touched[0] = v
            nt = 1
            g = 0
            while size > 0:
                key = heap[0]
                size = _pop(heap, size)
                u = key & NODE_MASK
                d = key >> DIST_SHIFT
                if d > dv[u]:
                    continue
                if dr[u] < UNREACHED and dr[u] <= dx[u]:
                    g += 1
                for a in range(ptr[u], ptr[u + 1]):
                    w = lt[base + a]
                    nd = d + lw[base + a]
                    # only nodes v reaches strictly first are worth entering
                    if nd < dv[w] and nd < bound[w]:
                        if dv[w] == UNREACHED:
                            touched[nt] = w
                            nt += 1
                        dv[w] = nd
                        size = _push(heap, size, (nd << DIST_SHIFT) | w)
            for i in range(nt):
                dv[touched[i]] = UNREACHED
            gains[ci] += g
    return gains


@njit(cache=True)
def sample_label_counts(lptr, lt, lw, bases, seed_label, n_labels):
    """Per-realization node counts for each label under labelled settling."""
    R = lptr.shape[0]
    n = lptr.shape[1] - 1
    out = np.zeros((R, n_labels), dtype=np.int64)
    settled = np.zeros(n, dtype=np.bool_)
    heap = np.empty(n + len(lt) + 1, dtype=np.int64)
    for s in range(R):
        ptr = lptr[s]
        base = bases[s]
        settled[:] = False
        size = 0
        for u in range(n):
            if seed_label[u] >= 0:
                size = _push(heap, size, (seed_label[u] << NODE_BITS) | u)
        while size > 0:
            key = heap[0]
            size = _pop(heap, size)
            u = key & NODE_MASK
            if settled[u]:
                continue
            lab = (key >> NODE_BITS) & LABEL_MASK
            d = key >> DIST_SHIFT
            settled[u] = True
            out[s, lab] += 1
            for a in range(ptr[u], ptr[u + 1]):
                v = lt[base + a]
                if not settled[v]:
                    size = _push(heap, size, ((d + lw[base + a]) << DIST_SHIFT) | (lab << NODE_BITS) | v)
    return out
