"""Numba kernels for clique search and coalition-dominance scans.

All kernels operate on packed uint64 bitset rows.  They are compiled lazily
on first use and cached on disk; every algorithm is deterministic.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U1 = np.uint64(1)
U0 = np.uint64(0)


def pack_adjacency(adj: np.ndarray) -> np.ndarray:
    """Pack a boolean adjacency matrix into uint64 rows."""
    nv = adj.shape[0]
    words = (nv + 63) // 64
    bits = np.zeros((nv, words), dtype=np.uint64)
    r, c = np.nonzero(adj)
    np.bitwise_or.at(bits, (r, c >> 6), np.uint64(1) << (c & 63).astype(np.uint64))
    return bits


@njit(cache=True)
def _popc64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True)
def _next_bit(row, start, nv):
    """Smallest set bit >= start in a packed row, or -1."""
    p = start
    while p < nv:
        w = p >> 6
        x = row[w] >> np.uint64(p & 63)
        if x != U0:
            t = p
            while x & U1 == U0:
                x >>= U1
                t += 1
            return t
        p = (w + 1) << 6
    return -1


@njit(cache=True)
def _restrict_after(dst, src, nbr, v, words):
    """dst = src & nbr & {indices > v}; returns popcount."""
    wv = v >> 6
    c = np.int64(0)
    for w in range(words):
        if w < wv:
            x = U0
        else:
            x = src[w] & nbr[w]
            if w == wv:
                sh = (v & 63) + 1
                if sh >= 64:
                    x = U0
                else:
                    x &= ~((U1 << np.uint64(sh)) - U1)
        dst[w] = x
        c += _popc64(x)
    return c


@njit(cache=True)
def clique_scan(bits, nv, words, k, node_budget):
    """Enumerate all k-cliques in vertex order.

    Returns (count, bigger_found, nodes_used, exhausted, witness) where
    ``witness`` is the lexicographically least k-clique (vertex indices) or
    -1s when none exists.  ``bigger_found`` reports whether some k-clique
    extends to a (k+1)-clique.
    """
    cand = np.zeros((k + 1, words), dtype=np.uint64)
    ptr = np.zeros(k + 1, dtype=np.int64)
    chosen = np.zeros(k + 1, dtype=np.int64)
    witness = -np.ones(k, dtype=np.int64)
    count = np.int64(0)
    nodes = np.int64(0)
    bigger = False
    exhausted = False
    for w in range(words):
        cand[0, w] = ~U0
    extra = words * 64 - nv
    if extra > 0:
        cand[0, words - 1] >>= np.uint64(extra)
    d = 0
    ptr[0] = 0
    while d >= 0:
        v = _next_bit(cand[d], ptr[d], nv)
        if v < 0:
            d -= 1
            continue
        nodes += 1
        if nodes > node_budget:
            exhausted = True
            break
        ptr[d] = v + 1
        chosen[d] = v
        if d + 1 == k:
            count += 1
            if witness[0] < 0:
                for j in range(k):
                    witness[j] = chosen[j]
            if not bigger:
                wv = v >> 6
                for w in range(wv, words):
                    x = cand[d, w] & bits[v, w]
                    if w == wv:
                        sh = (v & 63) + 1
                        x = U0 if sh >= 64 else x & ~((U1 << np.uint64(sh)) - U1)
                    if x != U0:
                        bigger = True
                        break
            continue
        c = _restrict_after(cand[d + 1], cand[d], bits[v], v, words)
        if c + d + 1 >= k:
            d += 1
            ptr[d] = v + 1
    return count, bigger, nodes, exhausted, witness


@njit(cache=True)
def first_clique(bits, nv, words, k, node_budget):
    """Lexicographically least k-clique, or -1s (with exhausted flag)."""
    cand = np.zeros((k + 1, words), dtype=np.uint64)
    ptr = np.zeros(k + 1, dtype=np.int64)
    chosen = np.zeros(k + 1, dtype=np.int64)
    out = -np.ones(k, dtype=np.int64)
    nodes = np.int64(0)
    exhausted = False
    for w in range(words):
        cand[0, w] = ~U0
    extra = words * 64 - nv
    if extra > 0:
        cand[0, words - 1] >>= np.uint64(extra)
    d = 0
    ptr[0] = 0
    while d >= 0:
        v = _next_bit(cand[d], ptr[d], nv)
        if v < 0:
            d -= 1
            continue
        nodes += 1
        if nodes > node_budget:
            exhausted = True
            break
        ptr[d] = v + 1
        chosen[d] = v
        if d + 1 == k:
            for j in range(k):
                out[j] = chosen[j]
            return out, nodes, False
        c = _restrict_after(cand[d + 1], cand[d], bits[v], v, words)
        if c + d + 1 >= k:
            d += 1
            ptr[d] = v + 1
    return out, nodes, exhausted


@njit(cache=True)
def best_min_score_clique(bits, nv, words, k, vscore):
    """k-clique maximizing the minimum vertex score (branch and bound).

    Ties resolve to the first clique found in lexicographic order.
    Returns (best_score, clique) with best_score = -1 if none exists.
    """
    cand = np.zeros((k + 1, words), dtype=np.uint64)
    ptr = np.zeros(k + 1, dtype=np.int64)
    msc = np.zeros(k + 1, dtype=np.int64)
    chosen = np.zeros(k + 1, dtype=np.int64)
    best = np.int64(-1)
    best_cl = -np.ones(k, dtype=np.int64)
    for w in range(words):
        cand[0, w] = ~U0
    extra = words * 64 - nv
    if extra > 0:
        cand[0, words - 1] >>= np.uint64(extra)
    msc[0] = np.int64(1) << 62
    d = 0
    ptr[0] = 0
    while d >= 0:
        v = _next_bit(cand[d], ptr[d], nv)
        if v < 0:
            d -= 1
            continue
        ptr[d] = v + 1
        m = msc[d]
        if vscore[v] < m:
            m = vscore[v]
        if m <= best:
            continue
        chosen[d] = v
        if d + 1 == k:
            best = m
            for j in range(k):
                best_cl[j] = chosen[j]
            continue
        c = _restrict_after(cand[d + 1], cand[d], bits[v], v, words)
        if c + d + 1 >= k:
            msc[d + 1] = m
            d += 1
            ptr[d] = v + 1
    return best, best_cl


@njit(cache=True)
def greedy_clique(bits, nv, words):
    """Greedy clique by ascending vertex index (cheap lower bound)."""
    cand = np.zeros(words, dtype=np.uint64)
    tmp = np.zeros(words, dtype=np.uint64)
    for w in range(words):
        cand[w] = ~U0
    extra = words * 64 - nv
    if extra > 0:
        cand[words - 1] >>= np.uint64(extra)
    out = []
    v = _next_bit(cand, 0, nv)
    while v >= 0:
        out.append(v)
        _restrict_after(tmp, cand, bits[v], v, words)
        for w in range(words):
            cand[w] = tmp[w]
        v = _next_bit(cand, 0, nv)
    return out


@njit(cache=True)
def dominated_by_any(cm, ct):
    """Row i of cm componentwise-dominated by some row of ct.

    Both arguments are class-prefix count matrices; column -1 is the
    coalition size, checked first as the cheapest filter.
    """
    m = cm.shape[0]
    t = ct.shape[0]
    k = cm.shape[1]
    out = np.zeros(m, dtype=np.bool_)
    for i in range(m):
        row = cm[i]
        hit = False
        for j in range(t):
            if ct[j, k - 1] < row[k - 1]:
                continue
            ok = True
            for e in range(k - 1):
                if ct[j, e] < row[e]:
                    ok = False
                    break
            if ok:
                hit = True
                break
        out[i] = hit
    return out


@njit(cache=True)
def greedy_cover_order(cov_bits, uncovered, stop_gain):
    """Iterated max-gain set cover over packed coverage rows.

    Picks rows by descending newly-covered count (ties: lowest row index)
    until every coverable element is covered or the marginal gain drops
    below ``stop_gain``.  Returns (chosen row indices, gains, remaining).
    """
    ng, words = cov_bits.shape
    unc = uncovered.copy()
    chosen = []
    gains = []
    alive = np.ones(ng, dtype=np.bool_)
    while True:
        best_gain = np.int64(0)
        best_row = np.int64(-1)
        for g in range(ng):
            if not alive[g]:
                continue
            c = np.int64(0)
            for w in range(words):
                c += _popc64(cov_bits[g, w] & unc[w])
            if c == 0:
                alive[g] = False
            elif c > best_gain:
                best_gain = c
                best_row = g
        if best_row < 0 or best_gain < stop_gain:
            break
        chosen.append(best_row)
        gains.append(best_gain)
        for w in range(words):
            unc[w] &= ~cov_bits[best_row, w]
        alive[best_row] = False
    return chosen, gains, unc
