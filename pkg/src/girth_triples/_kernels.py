"""Compiled inner loops for the triple process.

Triples are identified by their colex rank ``C(c,3) + C(b,2) + a`` for
``a < b < c``.  All functions take plain numpy arrays so the Python layer
owns every allocation.

Plan arrays (see ``girth_triples.plans``) describe triple-centric
embedding searches: ``steps[p, j] = (f0, f1, f2, kind)`` where ``kind`` is
the number of already-mapped pattern vertices of that triple and the mapped
ones come first.
"""
import numpy as np
from numba import njit

_NB = dict(cache=True, nogil=True)


@njit(**_NB)
def rank3(a, b, c, c2, c3):
    # sort three ints
    if a > b:
        a, b = b, a
    if b > c:
        b, c = c, b
    if a > b:
        a, b = b, a
    return c3[c] + c2[b] + a


@njit(**_NB)
def _largest_le(table, hi, r):
    lo = 0
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if table[mid] <= r:
            lo = mid
        else:
            hi = mid - 1
    return lo


@njit(**_NB)
def unrank3(r, n, c2, c3):
    c = _largest_le(c3, n - 1, r)
    r -= c3[c]
    b = _largest_le(c2, c - 1, r)
    a = r - c2[b]
    return a, b, c


@njit(**_NB)
def _remove(r, a, b, c, Q, pos, qsize, Y):
    p = pos[r]
    s = qsize[0] - 1
    last = Q[s]
    Q[p] = last
    pos[last] = p
    pos[r] = -1
    qsize[0] = s
    if a > b:
        a, b = b, a
    if b > c:
        b, c = c, b
    if a > b:
        a, b = b, a
    Y[a, b] -= 1
    Y[a, c] -= 1
    Y[b, c] -= 1


@njit(**_NB)
def init_arrays(n, Q, pos, Y):
    total = Q.shape[0]
    for r in range(total):
        Q[r] = r
        pos[r] = r
    for u in range(n):
        for v in range(u + 1, n):
            Y[u, v] = n - 2


@njit(**_NB)
def add_triple(r, n, c2, c3, Q, pos, qsize, Y, pair_tri, chosen, chosen_v, inc, deg, nchosen):
    """Move triple ``r`` from Q into H and drop every triple sharing a pair with it.

    Returns the number of triples removed from Q (the chosen one included).
    """
    a, b, c = unrank3(r, n, c2, c3)
    before = qsize[0]
    _remove(r, a, b, c, Q, pos, qsize, Y)
    for k in range(3):
        if k == 0:
            u, v = a, b
        elif k == 1:
            u, v = a, c
        else:
            u, v = b, c
        for z in range(n):
            if z == u or z == v:
                continue
            rr = rank3(u, v, z, c2, c3)
            if pos[rr] >= 0:
                _remove(rr, u, v, z, Q, pos, qsize, Y)
    idx = nchosen[0]
    chosen[idx] = r
    chosen_v[idx, 0] = a
    chosen_v[idx, 1] = b
    chosen_v[idx, 2] = c
    pair_tri[a, b] = idx
    pair_tri[b, a] = idx
    pair_tri[a, c] = idx
    pair_tri[c, a] = idx
    pair_tri[b, c] = idx
    pair_tri[c, b] = idx
    inc[a, deg[a]] = idx
    deg[a] += 1
    inc[b, deg[b]] = idx
    deg[b] += 1
    inc[c, deg[c]] = idx
    deg[c] += 1
    nchosen[0] = idx + 1
    return before - qsize[0]


@njit(**_NB)
def _mapped(phi, nv, w):
    for j in range(nv):
        if phi[j] == w:
            return True
    return False


@njit(**_NB)
def _third(chosen_v, h, u, v):
    s = chosen_v[h, 0]
    if s != u and s != v:
        return s
    s = chosen_v[h, 1]
    if s != u and s != v:
        return s
    return chosen_v[h, 2]


@njit(**_NB)
def run_plan(p, x, y, z, closing, stop_first, remove, n, c2, c3,
             plan_anchor, plan_len, plan_steps, plan_nv,
             pair_tri, chosen_v, nchosen, inc, deg, Q, pos, qsize, Y, out, nout):
    """Execute one embedding plan anchored at the triple (x, y, z).

    closing=True: every step but the last must land in H and the last
    pattern triple must land in Q; each such image is reported (appended to
    ``out`` or removed from Q when ``remove``).  closing=False: every step
    must land in H; full embeddings are counted.
    """
    nv = plan_nv[p]
    ns = plan_len[p]
    phi = np.full(nv, -1, np.int64)
    phi[plan_anchor[p, 0]] = x
    phi[plan_anchor[p, 1]] = y
    phi[plan_anchor[p, 2]] = z
    cur = np.zeros(ns + 1, np.int64)
    na = np.zeros(ns + 1, np.int64)
    av = np.zeros((ns + 1, 2), np.int64)
    found = 0
    if ns == 0:
        return 1 if not closing else 0
    L = 0
    while L >= 0:
        if L == ns:
            found += 1
            if stop_first:
                return found
            L -= 1
            continue
        for j in range(na[L]):
            phi[av[L, j]] = -1
        na[L] = 0
        f0 = plan_steps[p, L, 0]
        f1 = plan_steps[p, L, 1]
        f2 = plan_steps[p, L, 2]
        kind = plan_steps[p, L, 3]
        ok = False
        if closing and L == ns - 1:
            # the one pattern triple allowed outside H: must be available
            u = phi[f0]
            v = phi[f1]
            if kind == 3:
                cands_lo, cands_hi = 0, 1
            else:
                cands_lo, cands_hi = 0, n
            for ci in range(cands_lo, cands_hi):
                if kind == 3:
                    w = phi[f2]
                else:
                    w = ci
                    if _mapped(phi, nv, w):
                        continue
                rr = rank3(u, v, w, c2, c3)
                if pos[rr] >= 0:
                    if remove:
                        _remove(rr, u, v, w, Q, pos, qsize, Y)
                    elif found < out.shape[0]:
                        out[found] = rr
                    found += 1
                    if stop_first:
                        return found
            cur[L] = 0
            L -= 1
            continue
        if kind == 3:
            if cur[L] == 0:
                cur[L] = 1
                h = pair_tri[phi[f0], phi[f1]]
                if h >= 0 and _third(chosen_v, h, phi[f0], phi[f1]) == phi[f2]:
                    ok = True
        elif kind == 2:
            if cur[L] == 0:
                cur[L] = 1
                h = pair_tri[phi[f0], phi[f1]]
                if h >= 0:
                    w = _third(chosen_v, h, phi[f0], phi[f1])
                    if not _mapped(phi, nv, w):
                        phi[f2] = w
                        av[L, 0] = f2
                        na[L] = 1
                        ok = True
        elif kind == 1:
            u = phi[f0]
            while cur[L] < 2 * deg[u]:
                c = cur[L]
                cur[L] += 1
                h = inc[u, c >> 1]
                s = -1
                t = -1
                for j in range(3):
                    q = chosen_v[h, j]
                    if q != u:
                        if s < 0:
                            s = q
                        else:
                            t = q
                if c & 1:
                    s, t = t, s
                if not _mapped(phi, nv, s) and not _mapped(phi, nv, t):
                    phi[f1] = s
                    phi[f2] = t
                    av[L, 0] = f1
                    av[L, 1] = f2
                    na[L] = 2
                    ok = True
                    break
        else:
            raise ValueError("plan step with no mapped vertex")
        if ok:
            L += 1
            if L < ns:
                cur[L] = 0
                na[L] = 0
        else:
            cur[L] = 0
            L -= 1
    return found


@njit(**_NB)
def close_triples(x, y, z, remove, n, c2, c3, plan_anchor, plan_len, plan_steps, plan_nv,
                  pair_tri, chosen_v, nchosen, inc, deg, Q, pos, qsize, Y, out):
    """Run every closing plan anchored at the new triple; returns hits (with repeats)."""
    total = 0
    for p in range(plan_len.shape[0]):
        if remove:
            sub = out[:0]
        else:
            sub = out[min(total, out.shape[0]):]
        total += run_plan(p, x, y, z, True, False, remove, n, c2, c3,
                          plan_anchor, plan_len, plan_steps, plan_nv,
                          pair_tri, chosen_v, nchosen, inc, deg, Q, pos, qsize, Y, sub, 0)
    return total


@njit(**_NB)
def find_embedding(n, c2, c3, plan_anchor, plan_len, plan_steps, plan_nv,
                   pair_tri, chosen_v, nchosen, inc, deg):
    """Index of the first H triple that anchors a full embedding of some plan, or -1."""
    dummy_q = np.zeros(1, np.int32)
    dummy_pos = np.zeros(1, np.int32)
    dummy_qs = np.zeros(1, np.int64)
    dummy_y = np.zeros((1, 1), np.int32)
    dummy_out = np.zeros(0, np.int64)
    for h in range(nchosen[0]):
        x = chosen_v[h, 0]
        y = chosen_v[h, 1]
        z = chosen_v[h, 2]
        for p in range(plan_len.shape[0]):
            if run_plan(p, x, y, z, False, True, False, n, c2, c3,
                        plan_anchor, plan_len, plan_steps, plan_nv,
                        pair_tri, chosen_v, nchosen, inc, deg,
                        dummy_q, dummy_pos, dummy_qs, dummy_y, dummy_out, 0) > 0:
                return h
    return -1


# ---------------------------------------------------------------------------
# observables
# ---------------------------------------------------------------------------

@njit(**_NB)
def codegree_scan(u, v, n, c2, c3, pos):
    cnt = 0
    for z in range(n):
        if z != u and z != v and pos[rank3(u, v, z, c2, c3)] >= 0:
            cnt += 1
    return cnt


@njit(**_NB)
def build_qbits(n, Q, qsize, c2, c3, bits):
    bits[:] = 0
    for j in range(qsize):
        a, b, c = unrank3(Q[j], n, c2, c3)
        bits[a, b, c >> 6] |= np.uint64(1) << np.uint64(c & 63)
        bits[b, a, c >> 6] |= np.uint64(1) << np.uint64(c & 63)
        bits[a, c, b >> 6] |= np.uint64(1) << np.uint64(b & 63)
        bits[c, a, b >> 6] |= np.uint64(1) << np.uint64(b & 63)
        bits[b, c, a >> 6] |= np.uint64(1) << np.uint64(a & 63)
        bits[c, b, a >> 6] |= np.uint64(1) << np.uint64(a & 63)


@njit(**_NB)
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(**_NB)
def _hthird(pair_tri, chosen_v, a, b):
    h = pair_tri[a, b]
    if h < 0:
        return -1
    return _third(chosen_v, h, a, b)


@njit(**_NB)
def count_extensions(anchor_f, x, y, z, k, nv, order, ncons, cons, n, bits, full,
                     pair_tri, chosen_v):
    """Injections phi with phi(anchor_f) = (x, y, z) whose pattern triples all lie
    in Q or H with exactly ``k`` of them (anchor excluded) in H.

    Vertex-centric: ``order[L]`` is the pattern vertex mapped at level L and
    ``cons[L, j] = (i0, i1)`` lists pattern vertices that form a triple with it
    and are mapped earlier.  ``full`` masks the valid vertex bits.
    """
    words = bits.shape[2]
    phi = np.full(nv, -1, np.int64)
    phi[anchor_f[0]] = x
    phi[anchor_f[1]] = y
    phi[anchor_f[2]] = z
    nl = nv - 3
    used = np.zeros(words, np.uint64)
    for v in (x, y, z):
        used[v >> 6] |= np.uint64(1) << np.uint64(v & 63)
    cand = np.zeros((nl + 1, words), np.uint64)
    cursor = np.zeros(nl + 1, np.int64)
    hcnt = np.zeros(nl + 1, np.int64)
    total = 0

    L = 0
    fresh = True
    while L >= 0:
        if fresh:
            # candidate set for level L
            for w in range(words):
                cand[L, w] = full[w] & ~used[w]
            for j in range(ncons[L]):
                a = phi[cons[L, j, 0]]
                b = phi[cons[L, j, 1]]
                t = _hthird(pair_tri, chosen_v, a, b)
                for w in range(words):
                    m = bits[a, b, w]
                    if t >= 0 and (t >> 6) == w:
                        m |= np.uint64(1) << np.uint64(t & 63)
                    cand[L, w] &= m
            cursor[L] = 0
            fresh = False
            if L == nl - 1:
                need = k - hcnt[L]
                if need >= 0:
                    # vertices outside every H-third contribute iff need == 0
                    sp = np.full(max(ncons[L], 1), -1, np.int64)
                    nsp = 0
                    for j in range(ncons[L]):
                        t = _hthird(pair_tri, chosen_v, phi[cons[L, j, 0]], phi[cons[L, j, 1]])
                        if t >= 0 and (cand[L, t >> 6] >> np.uint64(t & 63)) & np.uint64(1):
                            dup = False
                            for s in range(nsp):
                                if sp[s] == t:
                                    dup = True
                            if not dup:
                                sp[nsp] = t
                                nsp += 1
                    if need == 0:
                        c = 0
                        for w in range(words):
                            c += _popcount(cand[L, w])
                        total += c - nsp
                    for s in range(nsp):
                        t = sp[s]
                        hh = 0
                        for j in range(ncons[L]):
                            if _hthird(pair_tri, chosen_v, phi[cons[L, j, 0]], phi[cons[L, j, 1]]) == t:
                                hh += 1
                        if hh == need:
                            total += 1
                L -= 1
                continue
        # advance to next candidate at level L
        v = order[L]
        if phi[v] >= 0:
            f = phi[v]
            used[f >> 6] &= ~(np.uint64(1) << np.uint64(f & 63))
            phi[v] = -1
        nxt = -1
        bi = cursor[L]
        while bi < n:
            w = bi >> 6
            word = cand[L, w] >> np.uint64(bi & 63)
            if word == 0:
                bi = (w + 1) << 6
                continue
            # skip to lowest set bit
            while (word & np.uint64(1)) == 0:
                word >>= np.uint64(1)
                bi += 1
            nxt = bi
            break
        if nxt < 0 or nxt >= n:
            L -= 1
            continue
        cursor[L] = nxt + 1
        hh = 0
        for j in range(ncons[L]):
            if _hthird(pair_tri, chosen_v, phi[cons[L, j, 0]], phi[cons[L, j, 1]]) == nxt:
                hh += 1
        if hcnt[L] + hh > k:
            continue
        phi[v] = nxt
        used[nxt >> 6] |= np.uint64(1) << np.uint64(nxt & 63)
        hcnt[L + 1] = hcnt[L] + hh
        L += 1
        fresh = True
    return total
