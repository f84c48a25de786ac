"""Numba kernels for Vietoris-Rips persistence over Z/2.

Simplices are never materialized.  A k-simplex with sorted vertices
``w0 < w1 < ... < wk`` is identified by its combinatorial index
``sum_l C(w_l, l + 1)``, and its VR value is its largest edge.  Within a
dimension simplices are ordered by ``(value, index)``.

Dimension 0 is handled by Kruskal-style union-find.  Higher dimensions use
cohomology column reduction: columns are k-simplices taken in reverse
filtration order, the pivot of a column is its earliest coface, and
k-simplices that were pivots in dimension k-1 are cleared.  A column is only
expanded into a heap when its pivot collides with an earlier one.
"""

import heapq

import numpy as np
from numba import njit, types
from numba.typed import Dict, List


@njit(cache=True)
def binomial_table(n, k):
    b = np.zeros((n + 1, k + 1), dtype=np.int64)
    for i in range(n + 1):
        b[i, 0] = 1
        for j in range(1, min(i, k) + 1):
            b[i, j] = b[i - 1, j - 1] + (b[i - 1, j] if j <= i - 1 else 0)
    return b


@njit(cache=True)
def simplex_index(vs, binom):
    s = 0
    for l in range(vs.shape[0]):
        s += binom[vs[l], l + 1]
    return s


@njit(cache=True)
def simplex_value(vs, dist):
    mx = 0.0
    for a in range(vs.shape[0]):
        for b in range(a + 1, vs.shape[0]):
            d = dist[vs[a], vs[b]]
            if d > mx:
                mx = d
    return mx


@njit(cache=True)
def enumerate_edges(dist, thr):
    """Edges with value <= thr, in increasing combinatorial index."""
    n = dist.shape[0]
    m = 0
    for hi in range(n):
        for lo in range(hi):
            if dist[hi, lo] <= thr:
                m += 1
    verts = np.empty((m, 2), dtype=np.int64)
    vals = np.empty(m, dtype=np.float64)
    idx = np.empty(m, dtype=np.int64)
    c = 0
    for hi in range(n):
        base = hi * (hi - 1) // 2
        for lo in range(hi):
            d = dist[hi, lo]
            if d <= thr:
                verts[c, 0] = lo
                verts[c, 1] = hi
                vals[c] = d
                idx[c] = base + lo
                c += 1
    return verts, vals, idx


@njit(cache=True)
def count_triangles(dist, thr):
    n = dist.shape[0]
    m = 0
    for hi in range(n):
        for mid in range(hi):
            if dist[hi, mid] > thr:
                continue
            for lo in range(mid):
                if dist[hi, lo] <= thr and dist[mid, lo] <= thr:
                    m += 1
    return m


@njit(cache=True)
def enumerate_triangles(dist, thr, binom, m):
    verts = np.empty((m, 3), dtype=np.int64)
    vals = np.empty(m, dtype=np.float64)
    idx = np.empty(m, dtype=np.int64)
    n = dist.shape[0]
    c = 0
    for hi in range(n):
        for mid in range(hi):
            d1 = dist[hi, mid]
            if d1 > thr:
                continue
            for lo in range(mid):
                d2 = dist[hi, lo]
                d3 = dist[mid, lo]
                if d2 <= thr and d3 <= thr:
                    verts[c, 0] = lo
                    verts[c, 1] = mid
                    verts[c, 2] = hi
                    vals[c] = max(d1, max(d2, d3))
                    idx[c] = binom[lo, 1] + binom[mid, 2] + binom[hi, 3]
                    c += 1
    return verts, vals, idx


@njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True)
def kruskal(n, verts, order):
    """Union-find over edges visited in ``order``.

    Returns the positions (into ``verts``) of the edges that merge two
    components, in merge order.
    """
    parent = np.arange(n)
    rank = np.zeros(n, dtype=np.int64)
    merged = np.empty(max(n - 1, 0), dtype=np.int64)
    c = 0
    for t in range(order.shape[0]):
        e = order[t]
        a = _find(parent, verts[e, 0])
        b = _find(parent, verts[e, 1])
        if a == b:
            continue
        if rank[a] < rank[b]:
            a, b = b, a
        parent[b] = a
        if rank[a] == rank[b]:
            rank[a] += 1
        merged[c] = e
        c += 1
        if c == n - 1:
            break
    return merged[:c]


@njit(cache=True)
def _coboundary(vs, val, dist, thr, binom, out_val, out_idx, buf):
    """Write the cofaces of simplex ``vs`` (value ``val``) into the buffers."""
    n = dist.shape[0]
    k1 = vs.shape[0]
    cnt = 0
    for v in range(n):
        mx = val
        skip = False
        for a in range(k1):
            u = vs[a]
            if u == v:
                skip = True
                break
            d = dist[u, v]
            if d > mx:
                mx = d
        if skip or mx > thr:
            continue
        # insert v into the sorted vertex list
        p = 0
        inserted = False
        for a in range(k1):
            if not inserted and v < vs[a]:
                buf[p] = v
                p += 1
                inserted = True
            buf[p] = vs[a]
            p += 1
        if not inserted:
            buf[p] = v
        s = 0
        for l in range(k1 + 1):
            s += binom[buf[l], l + 1]
        out_val[cnt] = mx
        out_idx[cnt] = s
        cnt += 1
    return cnt


@njit(cache=True)
def _min_coface(vs, val, dist, thr, binom, buf):
    """Earliest coface of ``vs`` as (value, index); index -1 if none.

    Cofaces are visited in increasing index, so the first one whose value
    equals ``val`` is the minimum and the scan stops there.
    """
    n = dist.shape[0]
    k1 = vs.shape[0]
    best_v = np.inf
    best_i = np.int64(-1)
    for v in range(n):
        mx = val
        skip = False
        for a in range(k1):
            u = vs[a]
            if u == v:
                skip = True
                break
            d = dist[u, v]
            if d > mx:
                mx = d
        if skip or mx > thr or mx >= best_v:
            continue
        p = 0
        inserted = False
        for a in range(k1):
            if not inserted and v < vs[a]:
                buf[p] = v
                p += 1
                inserted = True
            buf[p] = vs[a]
            p += 1
        if not inserted:
            buf[p] = v
        s = 0
        for l in range(k1 + 1):
            s += binom[buf[l], l + 1]
        best_v = mx
        best_i = s
        if mx == val:
            break
    return best_v, best_i


@njit(cache=True)
def _pop_pivot(heap):
    while len(heap) > 0:
        top = heapq.heappop(heap)
        if len(heap) > 0 and heap[0][1] == top[1]:
            heapq.heappop(heap)
            continue
        return top
    return (-1.0, np.int64(-1))


@njit(cache=True)
def reduce_cohomology(cols_v, cols_val, cols_idx, dist, thr, binom):
    """Cohomology reduction for one dimension.

    ``cols_*`` hold the uncleared k-simplices in reverse filtration order.
    Returns (births, deaths, pivot_indices); essential classes have death inf.
    """
    m = cols_v.shape[0]
    n = dist.shape[0]
    k1 = cols_v.shape[1]
    out_val = np.empty(n, dtype=np.float64)
    out_idx = np.empty(n, dtype=np.int64)
    buf = np.empty(k1 + 1, dtype=np.int64)
    pivot_of = Dict.empty(key_type=types.int64, value_type=types.int64)
    v_store = Dict.empty(key_type=types.int64, value_type=types.int64[:])
    births = List.empty_list(types.float64)
    deaths = List.empty_list(types.float64)

    for c in range(m):
        sval = cols_val[c]
        pv, pi = _min_coface(cols_v[c], sval, dist, thr, binom, buf)
        if pi < 0:
            births.append(sval)
            deaths.append(np.inf)
            continue
        if pi not in pivot_of:
            pivot_of[pi] = c
            if pv > sval:
                births.append(sval)
                deaths.append(pv)
            continue

        # collision: full reduction with a heap-backed working column
        cnt = _coboundary(cols_v[c], sval, dist, thr, binom, out_val, out_idx, buf)
        heap = [(out_val[0], out_idx[0])]
        for t in range(1, cnt):
            heap.append((out_val[t], out_idx[t]))
        heapq.heapify(heap)
        vcols = List.empty_list(types.int64)
        vcols.append(c)
        while True:
            piv = _pop_pivot(heap)
            if piv[1] < 0:
                births.append(sval)
                deaths.append(np.inf)
                break
            owner = pivot_of[piv[1]] if piv[1] in pivot_of else np.int64(-1)
            if owner < 0:
                pivot_of[piv[1]] = c
                arr = np.empty(len(vcols), dtype=np.int64)
                for t in range(len(vcols)):
                    arr[t] = vcols[t]
                arr.sort()
                # Z/2: drop columns added an even number of times
                keep = np.ones(arr.shape[0], dtype=np.bool_)
                t = 0
                while t < arr.shape[0] - 1:
                    if arr[t] == arr[t + 1]:
                        keep[t] = False
                        keep[t + 1] = False
                        t += 2
                    else:
                        t += 1
                v_store[c] = arr[keep]
                if piv[0] > sval:
                    births.append(sval)
                    deaths.append(piv[0])
                break
            heapq.heappush(heap, piv)
            if owner in v_store:
                add = v_store[owner]
            else:
                add = np.full(1, owner, dtype=np.int64)
            for t in range(add.shape[0]):
                j = add[t]
                vcols.append(j)
                cj = _coboundary(cols_v[j], cols_val[j], dist, thr, binom, out_val, out_idx, buf)
                for q in range(cj):
                    heapq.heappush(heap, (out_val[q], out_idx[q]))

    b = np.empty(len(births), dtype=np.float64)
    d = np.empty(len(deaths), dtype=np.float64)
    for t in range(len(births)):
        b[t] = births[t]
        d[t] = deaths[t]
    piv_keys = np.empty(len(pivot_of), dtype=np.int64)
    t = 0
    for key in pivot_of.keys():
        piv_keys[t] = key
        t += 1
    return b, d, piv_keys


@njit(cache=True)
def prim_mst_points(x):
    """Dense Prim on raw coordinates; O(n^2) time, O(n) memory.

    Returns (parent, length) arrays for vertices 1..n-1 in insertion order.
    """
    n = x.shape[0]
    dim = x.shape[1]
    in_tree = np.zeros(n, dtype=np.bool_)
    best = np.full(n, np.inf)
    src = np.zeros(n, dtype=np.int64)
    child = np.empty(max(n - 1, 0), dtype=np.int64)
    par = np.empty(max(n - 1, 0), dtype=np.int64)
    ln = np.empty(max(n - 1, 0), dtype=np.float64)
    cur = 0
    in_tree[0] = True
    for step in range(n - 1):
        nxt = -1
        nv = np.inf
        for v in range(n):
            if in_tree[v]:
                continue
            s = 0.0
            for a in range(dim):
                t = x[cur, a] - x[v, a]
                s += t * t
            d = np.sqrt(s)
            if d < best[v]:
                best[v] = d
                src[v] = cur
            if best[v] < nv:
                nv = best[v]
                nxt = v
        in_tree[nxt] = True
        child[step] = nxt
        par[step] = src[nxt]
        ln[step] = nv
        cur = nxt
    return par, child, ln
