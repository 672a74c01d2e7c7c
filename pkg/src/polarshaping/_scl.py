"""Numba kernel for successive cancellation list decoding.

The decoder walks the code tree leaf by leaf, keeping per-path LLR and
partial-sum buffers per tree stage.  Buffers live in flat pools indexed
by ``(stage * nbuf + buffer) * N + offset`` and are reference counted and
shared between paths; because every buffer write covers the whole node
segment, a "copy" on fork is just a pointer copy and forking costs O(1)
per stage plus the decision-history row.

Conventions: stage ``n`` is the channel (width N), stage 0 the leaves.
LLR sign is positive for bit 0.  The path metric adds |llr| whenever a
decision contradicts the LLR sign (ties are free), so the best complete
path minimises the weighted Hamming mismatch against the channel hard
decisions.
"""

import numpy as np
from numba import njit

LLR_CAP = 40.0


@njit(cache=True, nogil=True, inline="always")
def _alloc(ref, s):
    # linear scan is fine: pools hold 2*list_size + 1 buffers per stage
    for b in range(ref.shape[1]):
        if ref[s, b] == 0:
            ref[s, b] = 1
            return b
    return -1  # pool exhausted: cannot happen with 2L+1 buffers


@njit(cache=True, nogil=True, inline="always")
def _writable(pool_ref, path_buf, p, s):
    """Buffer index of (path, stage) that may be fully overwritten."""
    b = path_buf[p, s]
    if pool_ref[s, b] == 1:
        return b
    pool_ref[s, b] -= 1
    nb = _alloc(pool_ref, s)
    path_buf[p, s] = nb
    return nb


@njit(cache=True, nogil=True, inline="always")
def _refresh_llrs(llr_pool, llr_ref, path_llr, bit_pool, path_bit,
                  p, phi, n, nbuf, N):
    """Recompute the leaf LLR of path p for leaf phi.

    One g step into the deepest freshly-entered right child, then f steps
    down the left spine.  phi == 0 is the initial all-f cascade.
    """
    if phi == 0:
        top = n
    else:
        t = 0
        x = phi
        while x & 1 == 0:
            t += 1
            x >>= 1
        src = (np.int64(t + 1) * nbuf + path_llr[p, t + 1]) * N
        lsrc = (np.int64(t) * nbuf + path_bit[p, t]) * N
        dst = (np.int64(t) * nbuf + _writable(llr_ref, path_llr, p, t)) * N
        half = 1 << t
        for i in range(half):
            llr_pool[dst + i] = (llr_pool[src + half + i]
                                 + (1.0 - 2.0 * bit_pool[lsrc + i])
                                 * llr_pool[src + i])
        top = t
    for s in range(top, 0, -1):
        src = (np.int64(s) * nbuf + path_llr[p, s]) * N
        dst = (np.int64(s - 1) * nbuf
               + _writable(llr_ref, path_llr, p, s - 1)) * N
        half = 1 << (s - 1)
        for i in range(half):
            a = llr_pool[src + i]
            b = llr_pool[src + half + i]
            mag_a = abs(a)
            mag_b = abs(b)
            m = mag_a if mag_a < mag_b else mag_b
            llr_pool[dst + i] = m if a * b >= 0.0 else -m


@njit(cache=True, nogil=True, inline="always")
def _store_bit(bit_pool, bit_ref, path_bit, p, phi, bit, n, nbuf, N,
               comb_a, comb_b):
    # push the new leaf decision up through every completed right subtree
    comb_a[0] = bit
    width = 1
    s = 0
    pos = phi
    while pos & 1 == 1 and s < n:
        lsrc = (np.int64(s) * nbuf + path_bit[p, s]) * N
        for i in range(width):
            comb_b[i] = bit_pool[lsrc + i] ^ comb_a[i]
            comb_b[i + width] = comb_a[i]
        tmp = comb_a
        comb_a = comb_b
        comb_b = tmp
        width <<= 1
        s += 1
        pos >>= 1
    dst = (np.int64(s) * nbuf + _writable(bit_ref, path_bit, p, s)) * N
    for i in range(width):
        bit_pool[dst + i] = comb_a[i]


@njit(cache=True, nogil=True, inline="always")
def _release_path(llr_ref, bit_ref, path_llr, path_bit, p, n):
    for s in range(n):  # stage n LLR buffer is the pinned channel vector
        llr_ref[s, path_llr[p, s]] -= 1
    for s in range(n + 1):
        bit_ref[s, path_bit[p, s]] -= 1


@njit(cache=True, nogil=True)
def scl_kernel(chan_llr, frozen_mask, frozen_values, list_size, out_u, out_pm):
    """Returns the number of surviving paths; fills out_u/out_pm sorted
    by ascending metric (stable in list order)."""
    N = np.int64(chan_llr.shape[0])
    n = 0
    while (1 << n) < N:
        n += 1
    lmax = list_size
    nbuf = np.int64(2 * lmax + 1)

    llr_pool = np.empty((n + 1) * nbuf * N, dtype=np.float64)
    bit_pool = np.empty((n + 1) * nbuf * N, dtype=np.int8)
    llr_ref = np.zeros((n + 1, nbuf), dtype=np.int32)
    bit_ref = np.zeros((n + 1, nbuf), dtype=np.int32)
    path_llr = np.zeros((lmax, n + 1), dtype=np.int64)
    path_bit = np.zeros((lmax, n + 1), dtype=np.int64)
    u_hist = np.zeros((lmax, N), dtype=np.int8)
    pm = np.zeros(lmax, dtype=np.float64)
    alive = np.zeros(lmax, dtype=np.bool_)
    order = np.zeros(lmax, dtype=np.int64)

    # channel LLRs: buffer 0 at stage n, shared read-only by all paths
    chan_base = np.int64(n) * nbuf * N
    for i in range(N):
        v = chan_llr[i]
        if v > LLR_CAP:
            v = LLR_CAP
        elif v < -LLR_CAP:
            v = -LLR_CAP
        llr_pool[chan_base + i] = v
    llr_ref[n, 0] = 1 << 30

    for s in range(n):
        path_llr[0, s] = _alloc(llr_ref, s)
    path_llr[0, n] = 0
    for s in range(n + 1):
        path_bit[0, s] = _alloc(bit_ref, s)
    alive[0] = True
    order[0] = 0
    n_active = 1

    comb_a = np.empty(N, dtype=np.int8)
    comb_b = np.empty(N, dtype=np.int8)
    cand_m = np.empty(2 * lmax, dtype=np.float64)
    cand_parent = np.empty(2 * lmax, dtype=np.int64)
    cand_bit = np.empty(2 * lmax, dtype=np.int8)
    sidx = np.empty(2 * lmax, dtype=np.int64)
    surv_count = np.zeros(lmax, dtype=np.int32)
    parent_used = np.zeros(lmax, dtype=np.bool_)
    new_order = np.empty(lmax, dtype=np.int64)
    new_pm = np.empty(lmax, dtype=np.float64)
    new_bit = np.empty(lmax, dtype=np.int8)

    for phi in range(N):
        for r in range(n_active):
            _refresh_llrs(llr_pool, llr_ref, path_llr, bit_pool, path_bit,
                          order[r], phi, n, nbuf, N)

        if frozen_mask[phi]:
            b = frozen_values[phi]
            for r in range(n_active):
                p = order[r]
                lam = llr_pool[path_llr[p, 0] * N]
                if (b == 0 and lam < 0.0) or (b == 1 and lam > 0.0):
                    pm[p] += abs(lam)
                u_hist[p, phi] = b
                _store_bit(bit_pool, bit_ref, path_bit, p, phi, b, n, nbuf,
                           N, comb_a, comb_b)
            continue

        # fork every path on bit 0/1, keep the list_size best candidates
        nc = 0
        for r in range(n_active):
            p = order[r]
            lam = llr_pool[path_llr[p, 0] * N]
            pen = abs(lam)
            cand_parent[nc] = p
            cand_bit[nc] = 0
            cand_m[nc] = pm[p] + (pen if lam < 0.0 else 0.0)
            nc += 1
            cand_parent[nc] = p
            cand_bit[nc] = 1
            cand_m[nc] = pm[p] + (pen if lam > 0.0 else 0.0)
            nc += 1

        # stable insertion sort: ties resolve to lower list rank, then bit 0
        for i in range(nc):
            sidx[i] = i
        for i in range(1, nc):
            key = sidx[i]
            km = cand_m[key]
            j = i - 1
            while j >= 0 and cand_m[sidx[j]] > km:
                sidx[j + 1] = sidx[j]
                j -= 1
            sidx[j + 1] = key

        n_keep = lmax if nc > lmax else nc

        for r in range(n_active):
            surv_count[order[r]] = 0
        for k in range(n_keep):
            surv_count[cand_parent[sidx[k]]] += 1
        for r in range(n_active):
            p = order[r]
            if surv_count[p] == 0:
                _release_path(llr_ref, bit_ref, path_llr, path_bit, p, n)
                alive[p] = False
            parent_used[p] = False

        # assign ids: first surviving child continues the parent in place,
        # the second one gets a cloned pointer table
        for k in range(n_keep):
            ci = sidx[k]
            p = cand_parent[ci]
            if not parent_used[p]:
                parent_used[p] = True
                child = p
            else:
                child = -1
                for q in range(lmax):
                    if not alive[q]:
                        child = q
                        break
                alive[child] = True
                for s in range(n + 1):
                    bb = path_llr[p, s]
                    path_llr[child, s] = bb
                    llr_ref[s, bb] += 1
                    bb = path_bit[p, s]
                    path_bit[child, s] = bb
                    bit_ref[s, bb] += 1
                u_hist[child, :phi] = u_hist[p, :phi]
            new_order[k] = child
            new_pm[k] = cand_m[ci]
            new_bit[k] = cand_bit[ci]

        for k in range(n_keep):
            child = new_order[k]
            pm[child] = new_pm[k]
            u_hist[child, phi] = new_bit[k]
            _store_bit(bit_pool, bit_ref, path_bit, child, phi, new_bit[k],
                       n, nbuf, N, comb_a, comb_b)
            order[k] = child
        n_active = n_keep

    # emit in ascending-metric order, stable in the current list order
    for r in range(n_active):
        sidx[r] = r
    for i in range(1, n_active):
        key = sidx[i]
        km = pm[order[key]]
        j = i - 1
        while j >= 0 and pm[order[sidx[j]]] > km:
            sidx[j + 1] = sidx[j]
            j -= 1
        sidx[j + 1] = key
    for r in range(n_active):
        p = order[sidx[r]]
        out_u[r, :] = u_hist[p, :]
        out_pm[r] = pm[p]
    return n_active
