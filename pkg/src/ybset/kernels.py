"""Hot loops: the orderly search, relabeling minimization and braid checks.

Each kernel is written once in a numba-compatible subset of Python.  When
jit is disabled the search runs as plain Python, and the two vectorizable
kernels switch to whole-array numpy versions instead.
"""

import numpy as np

from ._accel import PURE_PYTHON, njit

# ---------------------------------------------------------------------------
# Orderly search over sigma-tables.
#
# M[x, y] = sigma_x(y) is the inverse of f_x.  A table is a solution iff
# every row is a permutation, the diagonal is bijective, and the cycle law
#     M[M[y, z], M[y, w]] == M[M[z, y], M[z, w]]
# holds for all y, z, w.  Cells are filled row-major, each assignment is
# propagated through the cycle law, and a lex-leader test against the
# centralizer of the fixed diagonal discards non-minimal branches.
# ---------------------------------------------------------------------------


@njit
def _assign(M, rowmask, rowcnt, trail, tlen, queue, qlen, x, y, v):
    cur = M[x, y]
    if cur >= 0:
        return tlen, qlen, cur == v
    if rowmask[x] & (1 << v):
        return tlen, qlen, False
    M[x, y] = v
    rowmask[x] |= 1 << v
    rowcnt[x] += 1
    trail[tlen] = x * M.shape[0] + y
    queue[qlen] = x * M.shape[0] + y
    return tlen + 1, qlen + 1, True


@njit
def _law(M, rowmask, rowcnt, trail, tlen, queue, qlen, y, z, w):
    """Check one instance of the cycle law, filling in a missing side."""
    a = M[y, z]
    b = M[y, w]
    c = M[z, y]
    d = M[z, w]
    if a < 0 or b < 0 or c < 0 or d < 0:
        return tlen, qlen, True
    p = M[a, b]
    q = M[c, d]
    if p >= 0:
        if q >= 0:
            return tlen, qlen, p == q
        return _assign(M, rowmask, rowcnt, trail, tlen, queue, qlen, c, d, p)
    if q >= 0:
        return _assign(M, rowmask, rowcnt, trail, tlen, queue, qlen, a, b, q)
    return tlen, qlen, True


@njit
def _propagate(M, rowmask, rowcnt, trail, tlen, queue, qlen):
    n = M.shape[0]
    qh = 0
    while qh < qlen:
        cell = queue[qh]
        qh += 1
        r = cell // n
        col = cell % n
        # the last free cell of a row is forced
        if rowcnt[r] == n - 1:
            for yy in range(n):
                if M[r, yy] < 0:
                    for vv in range(n):
                        if not (rowmask[r] & (1 << vv)):
                            tlen, qlen, ok = _assign(M, rowmask, rowcnt, trail, tlen, queue, qlen, r, yy, vv)
                            if not ok:
                                return tlen, False
                            break
                    break
        # the new cell as M[y, z] or M[z, y]
        if r != col:
            for w in range(n):
                tlen, qlen, ok = _law(M, rowmask, rowcnt, trail, tlen, queue, qlen, r, col, w)
                if not ok:
                    return tlen, False
                tlen, qlen, ok = _law(M, rowmask, rowcnt, trail, tlen, queue, qlen, col, r, w)
                if not ok:
                    return tlen, False
        # the new cell as M[y, w]
        for z in range(n):
            if z != r:
                tlen, qlen, ok = _law(M, rowmask, rowcnt, trail, tlen, queue, qlen, r, z, col)
                if not ok:
                    return tlen, False
        # the new cell as an outer M[a, b]
        for y in range(n):
            z = -1
            w = -1
            for t in range(n):
                if M[y, t] == r:
                    z = t
                if M[y, t] == col:
                    w = t
            if z >= 0 and w >= 0 and z != y:
                tlen, qlen, ok = _law(M, rowmask, rowcnt, trail, tlen, queue, qlen, y, z, w)
                if not ok:
                    return tlen, False
    return tlen, True


@njit
def orderly_search(n, T, P, Pinv, out):
    """Enumerate lex-minimal sigma-tables with diagonal T.

    P holds the centralizer of T (rows are relabelings phi, Pinv their
    inverses).  Writes up to ``len(out)`` tables and returns
    ``(count, nodes)``; a count above the buffer size means "rerun larger".
    """
    M = -np.ones((n, n), np.int64)
    rowmask = np.zeros(n, np.int64)
    rowcnt = np.zeros(n, np.int64)
    nn = n * n
    trail = np.zeros(nn + 1, np.int64)
    queue = np.zeros(4 * nn * nn + 16, np.int64)
    K = P.shape[0]
    alive_idx = np.zeros((nn + 2, K), np.int32)
    alive_pos = np.zeros((nn + 2, K), np.int32)
    alive_cnt = np.zeros(nn + 2, np.int64)
    tlen = 0
    qlen = 0
    for x in range(n):
        tlen, qlen, ok = _assign(M, rowmask, rowcnt, trail, tlen, queue, qlen, x, x, T[x])
        if not ok:
            return 0, 0
    tlen, ok = _propagate(M, rowmask, rowcnt, trail, tlen, queue, qlen)
    if not ok:
        return 0, 0
    for k in range(K):
        alive_idx[0, k] = k
        alive_pos[0, k] = 0
    alive_cnt[0] = K
    dcell = np.zeros(nn + 2, np.int64)
    dval = np.zeros(nn + 2, np.int64)
    dtrail = np.zeros(nn + 2, np.int64)
    nodes = 0
    nout = 0
    c0 = -1
    for c in range(nn):
        if M[c // n, c % n] < 0:
            c0 = c
            break
    if c0 < 0:
        if out.shape[0] > 0:
            out[0, :, :] = M
        return 1, 1
    depth = 0
    dcell[0] = c0
    dval[0] = 0
    dtrail[0] = tlen
    while depth >= 0:
        c = dcell[depth]
        x = c // n
        y = c % n
        while tlen > dtrail[depth]:
            tlen -= 1
            cc = trail[tlen]
            rx = cc // n
            ry = cc % n
            rowmask[rx] &= ~(1 << M[rx, ry])
            rowcnt[rx] -= 1
            M[rx, ry] = -1
        v = dval[depth]
        while v < n and (rowmask[x] & (1 << v)):
            v += 1
        if v >= n:
            depth -= 1
            continue
        dval[depth] = v + 1
        nodes += 1
        qlen = 0
        tlen, qlen, ok = _assign(M, rowmask, rowcnt, trail, tlen, queue, qlen, x, y, v)
        tlen, ok = _propagate(M, rowmask, rowcnt, trail, tlen, queue, qlen)
        if not ok:
            continue
        # lex-leader test: each live phi resumes from its first undecided cell
        cnt = 0
        pruned = False
        nxt = depth + 1
        for t in range(alive_cnt[depth]):
            k = alive_idx[depth, t]
            pos = alive_pos[depth, t]
            dead = False
            while pos < nn:
                i = pos // n
                j = pos % n
                m = M[i, j]
                if m < 0:
                    break
                vv = M[Pinv[k, i], Pinv[k, j]]
                if vv < 0:
                    break
                pv = P[k, vv]
                if pv < m:
                    pruned = True
                    break
                if pv > m:
                    dead = True
                    break
                pos += 1
            if pruned:
                break
            if not dead and pos < nn:
                alive_idx[nxt, cnt] = k
                alive_pos[nxt, cnt] = pos
                cnt += 1
        if pruned:
            continue
        alive_cnt[nxt] = cnt
        c2 = -1
        for cc in range(c + 1, nn):
            if M[cc // n, cc % n] < 0:
                c2 = cc
                break
        if c2 < 0:
            if nout < out.shape[0]:
                out[nout, :, :] = M
            nout += 1
            continue
        depth = nxt
        dcell[depth] = c2
        dval[depth] = 0
        dtrail[depth] = tlen
    return nout, nodes


# ---------------------------------------------------------------------------
# Lex-min relabeling of a sigma-table over a list of relabelings.
# ---------------------------------------------------------------------------


@njit
def _min_relabel_jit(sig, perms):
    n = sig.shape[0]
    K = perms.shape[0]
    best = np.empty(n * n, np.int64)
    inv = np.empty(n, np.int64)
    phi = perms[0]
    for i in range(n):
        inv[phi[i]] = i
    for pos in range(n * n):
        best[pos] = phi[sig[inv[pos // n], inv[pos % n]]]
    for k in range(1, K):
        phi = perms[k]
        for i in range(n):
            inv[phi[i]] = i
        better = False
        for pos in range(n * n):
            v = phi[sig[inv[pos // n], inv[pos % n]]]
            if better:
                best[pos] = v
            elif v < best[pos]:
                better = True
                best[pos] = v
            elif v > best[pos]:
                break
    return best


def _min_relabel_numpy(sig, perms):
    inv = np.argsort(perms, axis=1)
    rel = np.take_along_axis(perms, sig[inv[:, :, None], inv[:, None, :]].reshape(len(perms), -1), axis=1)
    order = np.lexsort(rel.T[::-1])
    return rel[order[0]].copy()


def min_relabel(sig, perms):
    """Lexicographically least flattened ``phi . sig`` over rows ``phi`` of perms."""
    sig = np.ascontiguousarray(sig, dtype=np.int64)
    perms = np.ascontiguousarray(perms, dtype=np.int64)
    if PURE_PYTHON:
        return _min_relabel_numpy(sig, perms)
    return _min_relabel_jit(sig, perms)


# ---------------------------------------------------------------------------
# Braid relation on all triples.
# ---------------------------------------------------------------------------


@njit
def _braid_witness_jit(s1, s2):
    n = s1.shape[0]
    for x in range(n):
        for y in range(n):
            for z in range(n):
                # S12 S23 S12 applied to (x, y, z)
                a = s1[x, y]
                b = s2[x, y]
                c = z
                b, c = s1[b, c], s2[b, c]
                a, b = s1[a, b], s2[a, b]
                # S23 S12 S23
                p = x
                q = s1[y, z]
                r = s2[y, z]
                p, q = s1[p, q], s2[p, q]
                q, r = s1[q, r], s2[q, r]
                if a != p or b != q or c != r:
                    return x, y, z
    return -1, -1, -1


def _braid_witness_numpy(s1, s2):
    n = s1.shape[0]
    x, y, z = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    a, b, c = s1[x, y], s2[x, y], z
    b, c = s1[b, c], s2[b, c]
    a, b = s1[a, b], s2[a, b]
    p, q, r = x, s1[y, z], s2[y, z]
    p, q = s1[p, q], s2[p, q]
    q, r = s1[q, r], s2[q, r]
    bad = np.argwhere((a != p) | (b != q) | (c != r))
    if len(bad) == 0:
        return -1, -1, -1
    return tuple(int(v) for v in bad[0])


def braid_witness(s1, s2):
    """First triple violating the braid relation, or ``(-1, -1, -1)``."""
    s1 = np.ascontiguousarray(s1, dtype=np.int64)
    s2 = np.ascontiguousarray(s2, dtype=np.int64)
    if PURE_PYTHON:
        return _braid_witness_numpy(s1, s2)
    x, y, z = _braid_witness_jit(s1, s2)
    return int(x), int(y), int(z)
