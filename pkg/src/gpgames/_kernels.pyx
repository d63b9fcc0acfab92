# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_fallback`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef unsigned long long u64

STOP_EQUILIBRIUM = 0
STOP_MAX_STEPS = 1


cdef inline u64 _splitmix_next(u64* state) nogil:
    state[0] += 0x9E3779B97F4A7C15ULL
    cdef u64 z = state[0]
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline void _fen_add(i64* tree, i64 n, i64 i, i64 delta) nogil:
    i += 1
    while i <= n:
        tree[i] += delta
        i += i & -i


cdef inline i64 _fen_select(i64* tree, i64 n, i64 top, i64 r) nogil:
    cdef i64 pos = 0, step = top, nxt
    while step:
        nxt = pos + step
        if nxt <= n and tree[nxt] <= r:
            pos = nxt
            r -= tree[nxt]
        step >>= 1
    return pos


cdef inline void _utils(i64 i, i64* out, const i64[:] indptr, const i64[:] nbr, const i64[:] toff,
                        const i64[:] tables, const i64[:] unary_off, const i64[:] unary,
                        const i64[:] m, i64* a) nogil:
    cdef i64 mi = m[i], x, p, j, mj, off
    cdef i64 base = unary_off[i]
    for x in range(mi):
        out[x] = unary[base + x] if base >= 0 else 0
    for p in range(indptr[i], indptr[i + 1]):
        j = nbr[p]
        mj = m[j]
        off = toff[p] + a[j]
        for x in range(mi):
            out[x] += tables[off + x * mj]


cdef inline bint _unhappy(i64 i, i64* buf, const i64[:] indptr, const i64[:] nbr, const i64[:] toff,
                          const i64[:] tables, const i64[:] unary_off, const i64[:] unary,
                          const i64[:] m, i64* a) nogil:
    _utils(i, buf, indptr, nbr, toff, tables, unary_off, unary, m, a)
    cdef i64 cur = buf[a[i]], x
    for x in range(m[i]):
        if buf[x] > cur:
            return True
    return False


def simulate_pairwise(const i64[:] indptr, const i64[:] nbr, const i64[:] toff, const i64[:] tables,
                      const i64[:] unary_off, const i64[:] unary, const i64[:] m, const i64[:] init,
                      seed, i64 max_steps):
    cdef i64 n = m.shape[0]
    cdef i64 i, x, p, v, t = 0, cnt, nb, b, cur, mmax = 1, top = 1
    cdef u64 state = <u64>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef int stop = STOP_MAX_STEPS
    cdef bint f
    for i in range(n):
        if m[i] > mmax:
            mmax = m[i]
    while top * 2 <= n:
        top *= 2
    if n == 0:
        top = 0
    a_arr = np.array(init, dtype=np.int64)
    cdef i64[:] a = a_arr
    cdef i64* buf = <i64*>malloc(mmax * sizeof(i64))
    cdef i64* better = <i64*>malloc(mmax * sizeof(i64))
    cdef i64* tree = <i64*>malloc((n + 1) * sizeof(i64))
    cdef char* flags = <char*>malloc(n + 1)
    cap = max_steps if max_steps < 1 << 22 else 1 << 22
    players = np.empty(cap, dtype=np.int64)
    olds = np.empty(cap, dtype=np.int64)
    news = np.empty(cap, dtype=np.int64)
    gains = np.empty(cap, dtype=np.int64)
    cdef i64[:] pl = players, ol = olds, nw = news, gn = gains
    cdef i64 total = 0
    try:
        for i in range(n + 1):
            tree[i] = 0
        for i in range(n):
            flags[i] = _unhappy(i, buf, indptr, nbr, toff, tables, unary_off, unary, m, &a[0])
            if flags[i]:
                _fen_add(tree, n, i, 1)
                total += 1
        while t < max_steps:
            if total == 0:
                stop = STOP_EQUILIBRIUM
                break
            i = _fen_select(tree, n, top, <i64>(_splitmix_next(&state) % <u64>total))
            _utils(i, buf, indptr, nbr, toff, tables, unary_off, unary, m, &a[0])
            cur = buf[a[i]]
            cnt = 0
            for x in range(m[i]):
                if buf[x] > cur:
                    better[cnt] = x
                    cnt += 1
            b = better[<i64>(_splitmix_next(&state) % <u64>cnt)]
            if t >= pl.shape[0]:
                players = np.concatenate([players, np.empty_like(players)])
                olds = np.concatenate([olds, np.empty_like(olds)])
                news = np.concatenate([news, np.empty_like(news)])
                gains = np.concatenate([gains, np.empty_like(gains)])
                pl = players
                ol = olds
                nw = news
                gn = gains
            pl[t] = i
            ol[t] = a[i]
            nw[t] = b
            gn[t] = buf[b] - cur
            a[i] = b
            t += 1
            for p in range(indptr[i] - 1, indptr[i + 1]):
                v = i if p < indptr[i] else nbr[p]
                f = _unhappy(v, buf, indptr, nbr, toff, tables, unary_off, unary, m, &a[0])
                if f != flags[v]:
                    flags[v] = f
                    _fen_add(tree, n, v, 1 if f else -1)
                    total += 1 if f else -1
        else:
            if total == 0:
                stop = STOP_EQUILIBRIUM
    finally:
        free(buf)
        free(better)
        free(tree)
        free(flags)
    return players[:t].copy(), olds[:t].copy(), news[:t].copy(), gains[:t].copy(), a_arr, stop


cdef int _dag_one(const i64[:, :] util, const i64[:] m, i64* strides, i64 n, i64 size,
                  i64[:, :] best, i64[:] length, char* state, i64* stack) nogil:
    """Returns -1 on a cycle, 0 otherwise."""
    cdef i64 root, r, s, i, b, ai, base, cur, k, v, bl, top
    cdef bint pushed
    for r in range(size):
        state[r] = 0
    for root in range(size):
        if state[root]:
            continue
        top = 0
        stack[top] = root
        top += 1
        state[root] = 1
        while top > 0:
            r = stack[top - 1]
            pushed = False
            for i in range(n):
                cur = util[i, r]
                ai = (r // strides[i]) % m[i]
                base = r - ai * strides[i]
                for b in range(m[i]):
                    s = base + b * strides[i]
                    if s != r and util[i, s] > cur:
                        if state[s] == 1:
                            return -1
                        if state[s] == 0:
                            state[s] = 1
                            stack[top] = s
                            top += 1
                            pushed = True
                            break
                if pushed:
                    break
            if pushed:
                continue
            top -= 1
            for k in range(n):
                best[r, k] = 0
            bl = 0
            for i in range(n):
                cur = util[i, r]
                ai = (r // strides[i]) % m[i]
                base = r - ai * strides[i]
                for b in range(m[i]):
                    s = base + b * strides[i]
                    if s != r and util[i, s] > cur:
                        for k in range(n):
                            v = best[s, k] + (1 if k == i else 0)
                            if v > best[r, k]:
                                best[r, k] = v
                        if length[s] + 1 > bl:
                            bl = length[s] + 1
            length[r] = bl
            state[r] = 2
    return 0


cdef i64 _strides_of(const i64[:] m, i64* strides):
    cdef i64 s = 1, i
    for i in range(m.shape[0]):
        strides[i] = s
        s *= m[i]
    return s


def dag_max_updates(const i64[:, :] util, const i64[:] m):
    cdef i64 n = m.shape[0]
    cdef i64* strides = <i64*>malloc((n + 1) * sizeof(i64))
    cdef i64 size = _strides_of(m, strides)
    best_arr = np.zeros((size, n), dtype=np.int64)
    length_arr = np.zeros(size, dtype=np.int64)
    cdef char* state = <char*>malloc(size)
    cdef i64* stack = <i64*>malloc(size * sizeof(i64))
    cdef int rc
    try:
        rc = _dag_one(util, m, strides, n, size, best_arr, length_arr, state, stack)
    finally:
        free(strides)
        free(state)
        free(stack)
    if rc < 0:
        raise ValueError("better-response graph has a cycle")
    return best_arr, length_arr


def dag_max_updates_batch(const i64[:, :, :] util, const i64[:] m):
    cdef i64 n = m.shape[0], games = util.shape[0], g, r, k
    cdef i64* strides = <i64*>malloc((n + 1) * sizeof(i64))
    cdef i64 size = _strides_of(m, strides)
    best_arr = np.zeros((size, n), dtype=np.int64)
    length_arr = np.zeros(size, dtype=np.int64)
    maxk_arr = np.zeros((games, n), dtype=np.int64)
    maxlen_arr = np.zeros(games, dtype=np.int64)
    cdef i64[:, :] best = best_arr
    cdef i64[:] length = length_arr
    cdef i64[:, :] maxk = maxk_arr
    cdef i64[:] maxlen = maxlen_arr
    cdef char* state = <char*>malloc(size)
    cdef i64* stack = <i64*>malloc(size * sizeof(i64))
    cdef i64 bad = -1
    try:
        with nogil:
            for g in range(games):
                if _dag_one(util[g], m, strides, n, size, best, length, state, stack) < 0:
                    bad = g
                    break
                for r in range(size):
                    for k in range(n):
                        if best[r, k] > maxk[g, k]:
                            maxk[g, k] = best[r, k]
                    if length[r] > maxlen[g]:
                        maxlen[g] = length[r]
    finally:
        free(strides)
        free(state)
        free(stack)
    if bad >= 0:
        raise ValueError(f"game {bad}: better-response graph has a cycle")
    return maxk_arr, maxlen_arr


def theta_scan_batch(const i64[:, :] tables, const i64[:] toff, const i64[:, :] loc,
                     const i64[:] pc_indptr, const i64[:] pc_idx, const i64[:] m,
                     const i64[:, :] dist, const i64[:] bounds, i64 D, i64 R):
    cdef i64 n = m.shape[0], n_cliques = toff.shape[0], games = tables.shape[0]
    cdef i64 g, r, s, i, b, ai, base, k, c, q, e, L, scale, dphi, dtheta, w
    cdef i64* strides = <i64*>malloc((n + 1) * sizeof(i64))
    cdef i64 size = _strides_of(m, strides)
    cdef i64* weights = <i64*>malloc((n * n_cliques + 1) * sizeof(i64))
    cdef i64* deltas = <i64*>malloc((n_cliques + 1) * sizeof(i64))
    mono_arr = np.zeros(games, dtype=np.int64)
    incr_arr = np.zeros(games, dtype=np.int64)
    cdef i64[:] mono = mono_arr
    cdef i64[:] incr = incr_arr
    try:
        with nogil:
            for g in range(games):
                if bounds[g] <= 0:
                    continue
                L = 2 * D * bounds[g]
                scale = 1
                for e in range(R):
                    scale *= L
                for k in range(n):
                    for c in range(n_cliques):
                        if dist[k, c] < 0:
                            weights[k * n_cliques + c] = 0
                        else:
                            w = 1
                            for e in range(dist[k, c]):
                                w *= L - 1
                            for e in range(R - dist[k, c]):
                                w *= L
                            weights[k * n_cliques + c] = w
                for r in range(size):
                    for i in range(n):
                        ai = (r // strides[i]) % m[i]
                        base = r - ai * strides[i]
                        for b in range(m[i]):
                            if b == ai:
                                continue
                            s = base + b * strides[i]
                            dphi = 0
                            for q in range(pc_indptr[i], pc_indptr[i + 1]):
                                c = pc_idx[q]
                                deltas[q - pc_indptr[i]] = tables[g, toff[c] + loc[c, s]] - tables[g, toff[c] + loc[c, r]]
                                dphi += deltas[q - pc_indptr[i]]
                            if dphi <= 0:
                                continue
                            for k in range(n):
                                dtheta = 0
                                for q in range(pc_indptr[i], pc_indptr[i + 1]):
                                    dtheta += weights[k * n_cliques + pc_idx[q]] * deltas[q - pc_indptr[i]]
                                if dtheta < 0:
                                    mono[g] += 1
                                if k == i and dtheta < scale:
                                    incr[g] += 1
    finally:
        free(strides)
        free(weights)
        free(deltas)
    return mono_arr, incr_arr
