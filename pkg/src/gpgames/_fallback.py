"""Pure-Python kernels. Same signatures and results as the compiled ``_kernels``.

Inputs are numpy int64 arrays; they are converted to lists up front because
element access on lists is much faster than on arrays from Python.
"""
from __future__ import annotations

import numpy as np

from .rng import SplitMix64

STOP_EQUILIBRIUM = 0
STOP_MAX_STEPS = 1


class _Fenwick:
    def __init__(self, n: int):
        self.n = n
        self.tree = [0] * (n + 1)
        self.total = 0
        self.top = 1 << (n.bit_length() - 1) if n else 0

    def add(self, i: int, delta: int) -> None:
        self.total += delta
        i += 1
        while i <= self.n:
            self.tree[i] += delta
            i += i & -i

    def select(self, r: int) -> int:
        """Index of the (r+1)-th set element."""
        pos = 0
        step = self.top
        while step:
            nxt = pos + step
            if nxt <= self.n and self.tree[nxt] <= r:
                pos = nxt
                r -= self.tree[nxt]
            step >>= 1
        return pos


def simulate_pairwise(indptr, nbr, toff, tables, unary_off, unary, m, init, seed, max_steps):
    """Random better-response run on a game whose cliques have at most two players.

    Each step picks uniformly among players holding a strict improvement, then
    uniformly among that player's improving strategies (both in index order).
    """
    indptr = indptr.tolist()
    nbr = nbr.tolist()
    toff = toff.tolist()
    tables = tables.tolist()
    unary_off = unary_off.tolist()
    unary = unary.tolist()
    m = m.tolist()
    a = init.tolist()
    n = len(m)
    rng = SplitMix64(int(seed))

    def utils(i):
        mi = m[i]
        base = unary_off[i]
        out = [unary[base + x] if base >= 0 else 0 for x in range(mi)]
        for p in range(indptr[i], indptr[i + 1]):
            j = nbr[p]
            mj = m[j]
            off = toff[p] + a[j]
            for x in range(mi):
                out[x] += tables[off + x * mj]
        return out

    def unhappy(i):
        u = utils(i)
        cur = u[a[i]]
        return any(v > cur for v in u)

    flags = [False] * n
    fen = _Fenwick(n)
    for i in range(n):
        if unhappy(i):
            flags[i] = True
            fen.add(i, 1)

    players, olds, news, gains = [], [], [], []
    stop = STOP_MAX_STEPS
    t = 0
    while t < max_steps:
        if fen.total == 0:
            stop = STOP_EQUILIBRIUM
            break
        i = fen.select(rng.below(fen.total))
        u = utils(i)
        cur = u[a[i]]
        better = [x for x in range(m[i]) if u[x] > cur]
        b = better[rng.below(len(better))]
        players.append(i)
        olds.append(a[i])
        news.append(b)
        gains.append(u[b] - cur)
        a[i] = b
        t += 1
        for v in [i] + [nbr[p] for p in range(indptr[i], indptr[i + 1])]:
            f = unhappy(v)
            if f != flags[v]:
                flags[v] = f
                fen.add(v, 1 if f else -1)
    else:
        if fen.total == 0:
            stop = STOP_EQUILIBRIUM
    as_arr = lambda x: np.array(x, dtype=np.int64)
    return as_arr(players), as_arr(olds), as_arr(news), as_arr(gains), as_arr(a), stop


def _dag_one(util, m, strides, n, size):
    """Longest-path DP over the strict better-response graph of one game.

    Returns ``(best, length)``: ``best[r][k]`` is the most updates player ``k``
    can make on a path starting at profile ``r``; ``length[r]`` the longest path.
    Raises ValueError if the graph has a cycle.
    """
    best = [None] * size
    length = [0] * size
    state = [0] * size
    for root in range(size):
        if state[root]:
            continue
        stack = [root]
        state[root] = 1
        while stack:
            r = stack[-1]
            pushed = False
            for i in range(n):
                ui = util[i]
                cur = ui[r]
                ai = (r // strides[i]) % m[i]
                base = r - ai * strides[i]
                for b in range(m[i]):
                    s = base + b * strides[i]
                    if s != r and ui[s] > cur:
                        if state[s] == 1:
                            raise ValueError("better-response graph has a cycle")
                        if state[s] == 0:
                            state[s] = 1
                            stack.append(s)
                            pushed = True
                            break
                if pushed:
                    break
            if pushed:
                continue
            stack.pop()
            bk = [0] * n
            bl = 0
            for i in range(n):
                ui = util[i]
                cur = ui[r]
                ai = (r // strides[i]) % m[i]
                base = r - ai * strides[i]
                for b in range(m[i]):
                    s = base + b * strides[i]
                    if s != r and ui[s] > cur:
                        sb = best[s]
                        for k in range(n):
                            v = sb[k] + (1 if k == i else 0)
                            bk[k] = max(bk[k], v)
                        bl = max(bl, length[s] + 1)
            best[r] = bk
            length[r] = bl
            state[r] = 2
    return best, length


def _strides(m):
    out, s = [], 1
    for mi in m:
        out.append(s)
        s *= mi
    return out, s


def dag_max_updates(util, m):
    m = m.tolist()
    strides, size = _strides(m)
    best, length = _dag_one(util.tolist(), m, strides, len(m), size)
    return np.array(best, dtype=np.int64).reshape(size, len(m)), np.array(length, dtype=np.int64)


def dag_max_updates_batch(util, m):
    """Per game: max updates of each player and longest path, over all starts."""
    m = m.tolist()
    n = len(m)
    strides, size = _strides(m)
    games = util.shape[0]
    maxk = np.zeros((games, n), dtype=np.int64)
    maxlen = np.zeros(games, dtype=np.int64)
    for g in range(games):
        try:
            best, length = _dag_one(util[g].tolist(), m, strides, n, size)
        except ValueError:
            raise ValueError(f"game {g}: better-response graph has a cycle") from None
        maxk[g] = [max(b[k] for b in best) for k in range(n)]
        maxlen[g] = max(length)
    return maxk, maxlen


def theta_scan_batch(tables, toff, loc, pc_indptr, pc_idx, m, dist, bounds, D, R):
    """Count ordinal-potential violations per game.

    For every focal player ``k``, profile ``a`` and unilateral deviation ``b``
    with ``P(b) > P(a)``, the discounted potential must not decrease
    (``mono``); when the deviator is ``k`` it must rise by at least 1
    (``incr``). Discounted values are scaled by ``L**R`` with ``L = 2 D M`` so
    the weights ``(L-1)**d * L**(R-d)`` are integers.
    """
    tables = tables.tolist()
    toff = toff.tolist()
    loc = loc.tolist()
    pc_indptr = pc_indptr.tolist()
    pc_idx = pc_idx.tolist()
    m = m.tolist()
    dist = dist.tolist()
    bounds = bounds.tolist()
    n = len(m)
    strides, size = _strides(m)
    n_cliques = len(toff)
    games = len(tables)
    mono = [0] * games
    incr = [0] * games
    for g in range(games):
        M = bounds[g]
        if M <= 0:
            continue
        L = 2 * D * M
        scale = L**R
        tab = tables[g]
        weights = [
            [0 if dist[k][c] < 0 else (L - 1) ** dist[k][c] * L ** (R - dist[k][c]) for c in range(n_cliques)]
            for k in range(n)
        ]
        for r in range(size):
            for i in range(n):
                ai = (r // strides[i]) % m[i]
                base = r - ai * strides[i]
                cl = pc_idx[pc_indptr[i]:pc_indptr[i + 1]]
                for b in range(m[i]):
                    if b == ai:
                        continue
                    s = base + b * strides[i]
                    deltas = [tab[toff[c] + loc[c][s]] - tab[toff[c] + loc[c][r]] for c in cl]
                    dphi = sum(deltas)
                    if dphi <= 0:
                        continue
                    for k in range(n):
                        wk = weights[k]
                        dtheta = sum(wk[c] * dlt for c, dlt in zip(cl, deltas))
                        if dtheta < 0:
                            mono[g] += 1
                        if k == i and dtheta < scale:
                            incr[g] += 1
    return np.array(mono, dtype=np.int64), np.array(incr, dtype=np.int64)
