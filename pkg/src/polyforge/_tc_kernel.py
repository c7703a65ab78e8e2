"""Numba kernel for HLT coset enumeration with lookahead.

Coset tables are ``int32[cap, ncols]`` with ``-1`` for undefined entries.
Every generator owns a column; non-involutory generators own a second column
for the inverse.  ``inv[x]`` is the column of the inverse letter.

Coincidences use the union-find scheme with a queue of dead cosets.
Deductions are pushed on a bounded stack and processed Felsch-style; dropping
them on overflow is safe because every live coset is still scanned.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# meta slots
N_ALLOC, N_LIVE, HIGH_WATER, D_TOP, Q_LEN, D_OVERFLOW = 0, 1, 2, 3, 4, 5

DONE, EXCEEDED = 0, 1


@njit(cache=True)
def _rep(P, k):
    r = k
    while P[r] != r:
        r = P[r]
    while P[k] != r:
        nxt = P[k]
        P[k] = r
        k = nxt
    return r


@njit(cache=True)
def _merge(P, Q, meta, k, l):
    k = _rep(P, k)
    l = _rep(P, l)
    if k == l:
        return
    if k > l:
        k, l = l, k
    P[l] = k
    Q[meta[Q_LEN]] = l
    meta[Q_LEN] += 1
    meta[N_LIVE] -= 1


@njit(cache=True)
def _push(D, meta, c, x):
    t = meta[D_TOP]
    if t < D.shape[0]:
        D[t, 0] = c
        D[t, 1] = x
        meta[D_TOP] = t + 1
    else:
        meta[D_OVERFLOW] = 1


@njit(cache=True)
def _coincidence(T, P, Q, D, meta, inv, a, b):
    ncols = T.shape[1]
    meta[Q_LEN] = 0
    _merge(P, Q, meta, a, b)
    i = 0
    while i < meta[Q_LEN]:
        g = Q[i]
        i += 1
        for x in range(ncols):
            d = T[g, x]
            if d >= 0:
                xi = inv[x]
                T[d, xi] = -1
                mu = _rep(P, g)
                nu = _rep(P, d)
                if T[mu, x] >= 0:
                    _merge(P, Q, meta, nu, T[mu, x])
                elif T[nu, xi] >= 0:
                    _merge(P, Q, meta, mu, T[nu, xi])
                else:
                    T[mu, x] = nu
                    T[nu, xi] = mu
                    _push(D, meta, mu, x)


@njit(cache=True)
def _define(T, P, meta, inv, c, x):
    d = meta[N_ALLOC]
    if d >= T.shape[0]:
        return -1
    meta[N_ALLOC] = d + 1
    meta[N_LIVE] += 1
    if meta[N_LIVE] > meta[HIGH_WATER]:
        meta[HIGH_WATER] = meta[N_LIVE]
    for y in range(T.shape[1]):
        T[d, y] = -1
    P[d] = d
    T[c, x] = d
    T[d, inv[x]] = c
    return d


@njit(cache=True)
def _scan(T, P, Q, D, meta, inv, a, w, s, e, fill):
    """Scan word ``w[s:e]`` from coset ``a``; returns -1 if a definition
    was needed but the table is full."""
    f = a
    b = a
    i = s
    j = e - 1
    while True:
        while i <= j and T[f, w[i]] >= 0:
            f = T[f, w[i]]
            i += 1
        if i > j:
            if f != b:
                _coincidence(T, P, Q, D, meta, inv, f, b)
            return 0
        while j >= i and T[b, inv[w[j]]] >= 0:
            b = T[b, inv[w[j]]]
            j -= 1
        if j < i:
            _coincidence(T, P, Q, D, meta, inv, f, b)
            return 0
        if i == j:
            T[f, w[i]] = b
            T[b, inv[w[i]]] = f
            _push(D, meta, f, w[i])
            return 0
        if not fill:
            return 0
        if _define(T, P, meta, inv, f, w[i]) < 0:
            return -1


@njit(cache=True)
def _deductions(T, P, Q, D, meta, inv, cw, coff, cidx, cbycol):
    while meta[D_TOP] > 0:
        meta[D_TOP] -= 1
        t = meta[D_TOP]
        c = D[t, 0]
        x = D[t, 1]
        if P[c] != c:
            continue
        for k in range(cbycol[x], cbycol[x + 1]):
            q = cidx[k]
            _scan(T, P, Q, D, meta, inv, c, cw, coff[q], coff[q + 1], False)
            if P[c] != c:
                break
        if P[c] != c:
            continue
        d = T[c, x]
        if d < 0 or P[d] != d:
            continue
        xi = inv[x]
        for k in range(cbycol[xi], cbycol[xi + 1]):
            q = cidx[k]
            _scan(T, P, Q, D, meta, inv, d, cw, coff[q], coff[q + 1], False)
            if P[d] != d:
                break


@njit(cache=True)
def _lookahead(T, P, Q, D, meta, inv, rw, roff, sw, soff, cw, coff, cidx, cbycol):
    nrel = roff.shape[0] - 1
    for k in range(soff.shape[0] - 1):
        _scan(T, P, Q, D, meta, inv, 0, sw, soff[k], soff[k + 1], False)
        _deductions(T, P, Q, D, meta, inv, cw, coff, cidx, cbycol)
    c = 0
    while c < meta[N_ALLOC]:
        if P[c] == c:
            for r in range(nrel):
                _scan(T, P, Q, D, meta, inv, c, rw, roff[r], roff[r + 1], False)
                _deductions(T, P, Q, D, meta, inv, cw, coff, cidx, cbycol)
                if P[c] != c:
                    break
        c += 1


@njit(cache=True)
def _compact(T, P, meta):
    n = meta[N_ALLOC]
    newidx = np.full(n, -1, np.int64)
    k = 0
    for c in range(n):
        if P[c] == c:
            newidx[c] = k
            k += 1
    ncols = T.shape[1]
    for c in range(n):
        if P[c] == c:
            nc = newidx[c]
            for x in range(ncols):
                v = T[c, x]
                if v >= 0:
                    T[nc, x] = newidx[_rep(P, v)]
                else:
                    T[nc, x] = -1
    for c in range(k):
        P[c] = c
    meta[N_ALLOC] = k
    meta[N_LIVE] = k
    meta[D_TOP] = 0
    return newidx


@njit(cache=True)
def enumerate_hlt(ncols, inv, rw, roff, sw, soff, cw, coff, cidx, cbycol,
                  cap, min_free, use_deductions):
    """Returns ``(status, table, n_cosets, high_water)``."""
    T = np.full((cap, ncols), -1, np.int32)
    P = np.arange(cap).astype(np.int32)
    Q = np.zeros(cap, np.int32)
    D = np.zeros((65536 if use_deductions else 1, 2), np.int64)
    meta = np.zeros(8, np.int64)
    meta[N_ALLOC] = 1
    meta[N_LIVE] = 1
    meta[HIGH_WATER] = 1
    nrel = roff.shape[0] - 1
    sub_done = False
    c = 0
    while True:
        st = 0
        if not sub_done:
            for k in range(soff.shape[0] - 1):
                st = _scan(T, P, Q, D, meta, inv, 0, sw, soff[k], soff[k + 1], True)
                if st < 0:
                    break
                if use_deductions:
                    _deductions(T, P, Q, D, meta, inv, cw, coff, cidx, cbycol)
            if st == 0:
                sub_done = True
        else:
            if c >= meta[N_ALLOC]:
                break
            if P[c] == c:
                for r in range(nrel):
                    st = _scan(T, P, Q, D, meta, inv, c, rw, roff[r], roff[r + 1], True)
                    if st < 0:
                        break
                    if use_deductions:
                        _deductions(T, P, Q, D, meta, inv, cw, coff, cidx, cbycol)
                    else:
                        meta[D_TOP] = 0
                    if P[c] != c:
                        break
                if st == 0 and P[c] == c:
                    for x in range(ncols):
                        if T[c, x] < 0:
                            if _define(T, P, meta, inv, c, x) < 0:
                                st = -1
                                break
            if st == 0:
                c += 1
        if st < 0:
            _lookahead(T, P, Q, D, meta, inv, rw, roff, sw, soff, cw, coff, cidx, cbycol)
            newidx = _compact(T, P, meta)
            nc = 0
            for k in range(min(c, newidx.shape[0])):
                if newidx[k] >= 0:
                    nc += 1
            c = nc
            if cap - meta[N_ALLOC] < min_free:
                return EXCEEDED, T, meta[N_ALLOC], meta[HIGH_WATER]
    _compact(T, P, meta)
    return DONE, T, meta[N_ALLOC], meta[HIGH_WATER]


@njit(cache=True)
def standardize(T, n, inv):
    """Renumber cosets ``0..n-1`` in breadth-first order from coset 0.

    Returns ``(table, parent, parent_col)`` with the new numbering.
    """
    ncols = T.shape[1]
    order = np.full(n, -1, np.int64)
    newidx = np.full(n, -1, np.int64)
    parent = np.full(n, -1, np.int64)
    pcol = np.full(n, -1, np.int64)
    order[0] = 0
    newidx[0] = 0
    head = 0
    tail = 1
    while head < tail:
        c = order[head]
        head += 1
        for x in range(ncols):
            d = T[c, x]
            if newidx[d] < 0:
                newidx[d] = tail
                order[tail] = d
                parent[tail] = newidx[c]
                pcol[tail] = x
                tail += 1
    out = np.empty((n, ncols), np.int32)
    for k in range(n):
        c = order[k]
        for x in range(ncols):
            out[k, x] = newidx[T[c, x]]
    return out, parent, pcol
