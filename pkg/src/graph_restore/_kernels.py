"""Compiled inner loops (numba). Pure array-in/array-out functions."""
from __future__ import annotations

import numpy as np
from numba import config, njit, prange

# prefer layers that need no TBB runtime; avoids a version warning on import
config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


@njit(cache=True)
def triangles_csr(indptr, indices, n):
    """Per-node triangle counts of a multigraph given as CSR of endpoint multisets."""
    cnt = np.zeros(n, dtype=np.int64)
    t = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for p in range(indptr[i], indptr[i + 1]):
            w = indices[p]
            if w != i:
                cnt[w] += 1
        acc = 0
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            if j == i:
                continue
            for q in range(indptr[j], indptr[j + 1]):
                l = indices[q]
                if l != i and l != j:
                    acc += cnt[l]
        t[i] = acc // 2
        for p in range(indptr[i], indptr[i + 1]):
            cnt[indices[p]] = 0
    return t


@njit(cache=True)
def shared_partners_csr(indptr, indices, n):
    """``sp(u, v)`` for every non-loop edge instance, one value per instance."""
    total = 0
    for u in range(n):
        for p in range(indptr[u], indptr[u + 1]):
            if indices[p] > u:
                total += 1
    out = np.empty(total, dtype=np.int64)
    cnt = np.zeros(n, dtype=np.int64)
    pos = 0
    for u in range(n):
        for p in range(indptr[u], indptr[u + 1]):
            w = indices[p]
            if w != u:
                cnt[w] += 1
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            if v <= u:
                continue
            acc = 0
            for q in range(indptr[v], indptr[v + 1]):
                w = indices[q]
                if w != u and w != v:
                    acc += cnt[w]
            out[pos] = acc
            pos += 1
        for p in range(indptr[u], indptr[u + 1]):
            cnt[indices[p]] = 0
    return out


@njit(cache=True)
def _brandes_source(s, indptr, indices, n, dist, sigma, delta, order, bc, hist):
    for v in range(n):
        dist[v] = -1
        sigma[v] = 0.0
        delta[v] = 0.0
    dist[s] = 0
    sigma[s] = 1.0
    head = 0
    tail = 1
    order[0] = s
    while head < tail:
        v = order[head]
        head += 1
        dv = dist[v]
        hist[dv] += 1
        for p in range(indptr[v], indptr[v + 1]):
            w = indices[p]
            if dist[w] < 0:
                dist[w] = dv + 1
                order[tail] = w
                tail += 1
            if dist[w] == dv + 1:
                sigma[w] += sigma[v]
    for idx in range(tail - 1, 0, -1):
        w = order[idx]
        dw = dist[w]
        coeff = (1.0 + delta[w]) / sigma[w]
        for p in range(indptr[w], indptr[w + 1]):
            v = indices[p]
            if dist[v] == dw - 1:
                delta[v] += sigma[v] * coeff
        bc[w] += delta[w]


@njit(cache=True, parallel=True)
def brandes_chunks(indptr, indices, n, starts, chunk):
    """Betweenness and distance histogram, one partial result per source chunk.

    Chunk ``c`` covers sources ``starts[c] .. starts[c] + chunk - 1``. Partial
    arrays are returned unsummed so that the caller can merge them in a fixed
    order regardless of how many threads ran.
    """
    nc = starts.shape[0]
    bc = np.zeros((nc, n), dtype=np.float64)
    hist = np.zeros((nc, n + 1), dtype=np.int64)
    for c in prange(nc):
        dist = np.empty(n, dtype=np.int64)
        sigma = np.empty(n, dtype=np.float64)
        delta = np.empty(n, dtype=np.float64)
        order = np.empty(n, dtype=np.int64)
        stop = min(starts[c] + chunk, n)
        for s in range(starts[c], stop):
            _brandes_source(s, indptr, indices, n, dist, sigma, delta, order, bc[c], hist[c])
    return bc, hist


# -- rewiring ------------------------------------------------------------

@njit(cache=True)
def _cc_term(T, k, nk, target):
    if k < 2 or nk == 0:
        c = 0.0
    else:
        c = 2.0 * T / (k * (k - 1.0) * nk)
    return abs(c - target)


@njit(cache=True)
def distance_from_totals(T, nk, target, denom):
    acc = 0.0
    for k in range(T.shape[0]):
        acc += _cc_term(T[k], k, nk[k], target[k])
    return acc / denom


@njit(cache=True)
def _apply_delta(u, v, sign, offs, owner, partner, deg, cnt, dT, klist, nk_list):
    """Accumulate per-degree-class triangle changes for adding (+1) or removing
    (-1) one u-v edge; the edge itself must be unpaired at call time."""
    if u == v:
        return nk_list
    for s in range(offs[u], offs[u + 1]):
        p = partner[s]
        if p >= 0:
            w = owner[p]
            if w != u and w != v:
                cnt[w] += 1
    sp = 0
    for s in range(offs[v], offs[v + 1]):
        p = partner[s]
        if p >= 0:
            w = owner[p]
            if w != u and w != v:
                c = cnt[w]
                if c > 0:
                    sp += c
                    k = deg[w]
                    klist[nk_list] = k
                    nk_list += 1
                    dT[k] += sign * c
    for s in range(offs[u], offs[u + 1]):
        p = partner[s]
        if p >= 0:
            cnt[owner[p]] = 0
    if sp:
        ku = deg[u]
        kv = deg[v]
        klist[nk_list] = ku
        klist[nk_list + 1] = kv
        nk_list += 2
        dT[ku] += sign * sp
        dT[kv] += sign * sp
    return nk_list


@njit(cache=True)
def rewire_kernel(offs, owner, partner, deg, cand, bucket_ptr, bucket, T, nk, target,
                  denom, attempts, seed, resync_every, max_resample):
    """Degree-preserving rewiring toward a target degree-dependent clustering.

    ``cand`` lists the rewirable stubs; ``bucket[bucket_ptr[k]:bucket_ptr[k+1]]``
    lists the rewirable stubs owned by degree-``k`` nodes. ``T[k]`` is the
    triangle total over degree-``k`` nodes and is updated in place, as is
    ``partner``. Returns (accepted, failed, final D, max resync drift).
    """
    np.random.seed(seed)
    n = offs.shape[0] - 1
    cnt = np.zeros(n, dtype=np.int64)
    dT = np.zeros(T.shape[0], dtype=np.int64)
    undo = np.zeros(T.shape[0], dtype=np.int64)
    klist = np.empty(4 * (2 * deg.max() + 2) + 8, dtype=np.int64)
    D = distance_from_totals(T, nk, target, denom)
    ncand = cand.shape[0]
    accepted = 0
    failed = 0
    drift = 0.0
    if ncand < 2:
        return accepted, attempts, D, drift
    for it in range(attempts):
        if resync_every > 0 and it > 0 and it % resync_every == 0:
            full = distance_from_totals(T, nk, target, denom)
            drift = max(drift, abs(full - D))
            D = full
        s1 = cand[np.random.randint(ncand)]
        sj = partner[s1]
        i = owner[s1]
        j = owner[sj]
        k = deg[i]
        lo = bucket_ptr[k]
        size = bucket_ptr[k + 1] - lo
        s2 = -1
        for _ in range(max_resample):
            t = bucket[lo + np.random.randint(size)]
            if t != s1 and t != sj:
                s2 = t
                break
        if s2 < 0:
            failed += 1
            continue
        sb = partner[s2]
        a = owner[s2]
        b = owner[sb]

        nl = 0
        partner[s1] = -1
        partner[sj] = -1
        nl = _apply_delta(i, j, -1, offs, owner, partner, deg, cnt, dT, klist, nl)
        partner[s2] = -1
        partner[sb] = -1
        nl = _apply_delta(a, b, -1, offs, owner, partner, deg, cnt, dT, klist, nl)
        nl = _apply_delta(i, b, 1, offs, owner, partner, deg, cnt, dT, klist, nl)
        partner[s1] = sb
        partner[sb] = s1
        nl = _apply_delta(a, j, 1, offs, owner, partner, deg, cnt, dT, klist, nl)
        partner[s2] = sj
        partner[sj] = s2

        change = 0.0
        for q in range(nl):
            kk = klist[q]
            d = dT[kk]
            if d != 0:
                change += (_cc_term(T[kk] + d, kk, nk[kk], target[kk])
                           - _cc_term(T[kk], kk, nk[kk], target[kk])) / denom
                # fold each class once; later duplicates in klist see d == 0
                T[kk] += d
                undo[kk] = d
                dT[kk] = 0
        D_rew = D + change
        if D_rew < D:
            accepted += 1
            D = D_rew
            for q in range(nl):
                undo[klist[q]] = 0
        else:
            for q in range(nl):
                kk = klist[q]
                T[kk] -= undo[kk]
                undo[kk] = 0
            partner[s1] = sj
            partner[sj] = s1
            partner[s2] = sb
            partner[sb] = s2
    full = distance_from_totals(T, nk, target, denom)
    drift = max(drift, abs(full - D))
    return accepted, failed, full, drift
