"""Compiled inner loops for batch exploration and component labelling.

These mirror ``explore.explore_truncated`` and ``explore.components``; the
test suite checks the two routes agree.
"""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _absorb(c, partner, colour_of, first_ball, mark, stamp, uflag, ustamp):
    # returns (change in unpaired count, internal pairs revealed)
    du = 0
    internal = 0
    for b in range(first_ball[c], first_ball[c + 1]):
        p = partner[b]
        pc = colour_of[p]
        if mark[pc] == stamp:
            if pc == c:
                if b < p:
                    internal += 1
            else:
                uflag[p] = 0
                du -= 1
                internal += 1
        else:
            uflag[b] = ustamp
            du += 1
    return du, internal


@njit(cache=True, nogil=True)
def explore_batch(partner, colour_of, first_ball, vertices, ell):
    """Algorithm A from every root in ``vertices``.

    Returns ``colours`` (k x ell, padded with -1, exploration order),
    ``n_colours``, ``unpaired`` and ``internal`` (pairs with both balls in
    the explored colour set).
    """
    n = first_ball.shape[0] - 1
    m = partner.shape[0]
    k = vertices.shape[0]
    colours = np.full((k, ell), -1, dtype=np.int64)
    n_colours = np.zeros(k, dtype=np.int64)
    unpaired = np.zeros(k, dtype=np.int64)
    internal = np.zeros(k, dtype=np.int64)
    mark = np.zeros(n, dtype=np.int64)
    uflag = np.zeros(m, dtype=np.int64)
    order = np.empty(ell, dtype=np.int64)
    queue = np.empty(ell, dtype=np.int64)
    for i in range(k):
        v = vertices[i]
        stamp = i + 1
        order[0] = v
        queue[0] = v
        count = 1
        mark[v] = stamp
        du, inner = _absorb(v, partner, colour_of, first_ball, mark, stamp, uflag, stamp)
        ucount = du
        pairs = inner
        wave_start = 0
        wave_end = 1
        done = count >= ell or ucount == 0
        while not done:
            for j in range(wave_start, wave_end):
                c = queue[j]
                for b in range(first_ball[c], first_ball[c + 1]):
                    if count >= ell or ucount == 0:
                        done = True
                        break
                    if uflag[b] != stamp:
                        continue
                    w = colour_of[partner[b]]
                    order[count] = w
                    count += 1
                    mark[w] = stamp
                    du, inner = _absorb(w, partner, colour_of, first_ball, mark, stamp, uflag, stamp)
                    ucount += du
                    pairs += inner
                if done:
                    break
            if done or count == wave_end:
                break
            # next wave is processed in colour-label order
            queue[wave_end:count] = np.sort(order[wave_end:count])
            wave_start = wave_end
            wave_end = count
        n_colours[i] = count
        unpaired[i] = ucount
        internal[i] = pairs
        colours[i, :count] = order[:count]
    return colours, n_colours, unpaired, internal


@njit(cache=True, nogil=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True, nogil=True)
def component_labels(partner, colour_of, n):
    """Disjoint-set pass over the pairs; returns (labels, sizes)."""
    parent = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    for b in range(partner.shape[0]):
        p = partner[b]
        if p < b:
            continue
        a = _find(parent, colour_of[b])
        c = _find(parent, colour_of[p])
        if a == c:
            continue
        if size[a] < size[c]:
            a, c = c, a
        parent[c] = a
        size[a] += size[c]
    labels = np.empty(n, dtype=np.int64)
    ids = np.full(n, -1, dtype=np.int64)
    nxt = 0
    for v in range(n):
        r = _find(parent, v)
        if ids[r] < 0:
            ids[r] = nxt
            nxt += 1
        labels[v] = ids[r]
    sizes = np.zeros(nxt, dtype=np.int64)
    for v in range(n):
        sizes[labels[v]] += 1
    return labels, sizes
