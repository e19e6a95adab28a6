"""Compiled inner loops.

Field arithmetic is table driven (add/mul/neg/inv tables from FieldSpec.tables),
so the same kernels serve GF(3), GF(4), GF(11) and GF(211).  Element sets are
bitmasks over at most 16 elements; r-subsets are walked in increasing mask
order, which is colex order.
"""

import numpy as np
from numba import njit

FNV_OFFSET = np.uint64(0xCBF29CE484222325)
FNV_PRIME = np.uint64(0x100000001B3)


@njit(cache=True)
def next_subset(x):
    # Gosper's hack: next integer with the same popcount
    c = x & -x
    r = x + c
    return (((r ^ x) >> 2) // c) | r


@njit(cache=True)
def popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@njit(cache=True)
def _nonsingular(M, k, add, mul, neg, inv):
    # in-place elimination on the leading k x k block of M
    for col in range(k):
        piv = -1
        for row in range(col, k):
            if M[row, col] != 0:
                piv = row
                break
        if piv < 0:
            return False
        if piv != col:
            for j in range(col, k):
                t = M[col, j]
                M[col, j] = M[piv, j]
                M[piv, j] = t
        ip = inv[M[col, col]]
        for row in range(col + 1, k):
            f = M[row, col]
            if f != 0:
                f = mul[f, ip]
                for j in range(col, k):
                    M[row, j] = add[M[row, j], neg[mul[f, M[col, j]]]]
    return True


@njit(cache=True)
def reduced_bases(A, r, c, add, mul, neg, inv):
    """Bases of M[A] for an r x c reduced matrix A (rows = elements 0..r-1)."""
    n = r + c
    total = 1
    for i in range(r):
        total = total * (n - i) // (i + 1)
    out = np.empty(total, dtype=np.uint32)
    cnt = 0
    work = np.zeros((max(r, 1), max(r, 1)), dtype=np.int32)
    rows = np.empty(max(r, 1), dtype=np.int64)
    cols = np.empty(max(r, 1), dtype=np.int64)
    if r == 0:
        out[0] = 0
        return out[:1]
    x = (1 << r) - 1
    limit = 1 << n
    while x < limit:
        k = 0
        for i in range(r):
            if not (x >> i) & 1:
                rows[k] = i
                k += 1
        k2 = 0
        for j in range(c):
            if (x >> (r + j)) & 1:
                cols[k2] = j
                k2 += 1
        if k == 0:
            out[cnt] = x
            cnt += 1
        else:
            for a in range(k):
                for b in range(k):
                    work[a, b] = A[rows[a], cols[b]]
            if _nonsingular(work, k, add, mul, neg, inv):
                out[cnt] = x
                cnt += 1
        x = next_subset(x)
    return out[:cnt]


@njit(cache=True)
def reduced_bases_with(A, r, c, e, add, mul, neg, inv):
    """Bases of M[A] that contain the column element r + e."""
    n = r + c
    out_list = np.empty(1 << 16 if n >= 16 else (1 << n), dtype=np.uint32)
    cnt = 0
    work = np.zeros((r, r), dtype=np.int32)
    rows = np.empty(r, dtype=np.int64)
    cols = np.empty(r, dtype=np.int64)
    bit = 1 << (r + e)
    x = (1 << r) - 1
    limit = 1 << n
    while x < limit:
        if x & bit:
            k = 0
            for i in range(r):
                if not (x >> i) & 1:
                    rows[k] = i
                    k += 1
            k2 = 0
            for j in range(c):
                if (x >> (r + j)) & 1:
                    cols[k2] = j
                    k2 += 1
            for a in range(k):
                for b in range(k):
                    work[a, b] = A[rows[a], cols[b]]
            if _nonsingular(work, k, add, mul, neg, inv):
                out_list[cnt] = x
                cnt += 1
        x = next_subset(x)
    return out_list[:cnt]


# ---------------------------------------------------------------------------
# invariant: element colours refined by basis incidences


@njit(cache=True)
def _fnv(h, v):
    for k in range(8):
        h = h ^ ((v >> np.uint64(8 * k)) & np.uint64(0xFF))
        h = h * FNV_PRIME
    return h


@njit(cache=True)
def _ndistinct(a):
    s = np.sort(a)
    d = 1
    for i in range(1, len(s)):
        if s[i] != s[i - 1]:
            d += 1
    return d


@njit(cache=True)
def incidence_counts(bases, n):
    c1 = np.zeros(n, dtype=np.int64)
    c2 = np.zeros((n, n), dtype=np.int64)
    for b in bases:
        for e in range(n):
            if (b >> e) & 1:
                c1[e] += 1
                for f in range(e + 1, n):
                    if (b >> f) & 1:
                        c2[e, f] += 1
    for e in range(n):
        for f in range(e + 1, n):
            c2[f, e] = c2[e, f]
    return c1, c2


@njit(cache=True)
def refine_colors(colors, c2, n):
    """One refinement round; colours are uint64 hashes."""
    new = np.empty(n, dtype=np.uint64)
    pc = np.empty(max(n - 1, 1), dtype=np.uint64)
    pv = np.empty(max(n - 1, 1), dtype=np.uint64)
    for e in range(n):
        m = 0
        for f in range(n):
            if f != e:
                pc[m] = colors[f]
                pv[m] = np.uint64(c2[e, f])
                m += 1
        # insertion sort on (colour, count)
        for i in range(1, m):
            a = pc[i]
            b = pv[i]
            j = i - 1
            while j >= 0 and (pc[j] > a or (pc[j] == a and pv[j] > b)):
                pc[j + 1] = pc[j]
                pv[j + 1] = pv[j]
                j -= 1
            pc[j + 1] = a
            pv[j + 1] = b
        h = _fnv(FNV_OFFSET, colors[e])
        for i in range(m):
            h = _fnv(h, pc[i])
            h = _fnv(h, pv[i])
        new[e] = h
    return new


@njit(cache=True)
def stable_colors(c1, c2, n):
    colors = c1.astype(np.uint64)
    d = _ndistinct(colors) if n > 0 else 0
    while True:
        new = refine_colors(colors, c2, n)
        d2 = _ndistinct(new) if n > 0 else 0
        colors = new
        if d2 == d:
            break
        d = d2
    return colors


@njit(cache=True)
def invariant_hash(bases, n, r):
    c1, c2 = incidence_counts(bases, n)
    colors = stable_colors(c1, c2, n)
    h = _fnv(FNV_OFFSET, np.uint64(n))
    h = _fnv(h, np.uint64(r))
    h = _fnv(h, np.uint64(len(bases)))
    s = np.sort(colors)
    for i in range(n):
        h = _fnv(h, s[i])
    return h, colors, c2


# ---------------------------------------------------------------------------
# cross ratios through colines


@njit(cache=True)
def _point(u, v, mul, inv, q):
    # projective coordinate v/u; q encodes infinity, -1 the zero vector
    if u != 0:
        return mul[v, inv[u]]
    if v != 0:
        return q
    return -1


@njit(cache=True)
def _sub(a, b, add, neg):
    return add[a, neg[b]]


@njit(cache=True)
def cross_ratio(a, b, c, d, q, add, mul, neg, inv):
    """[(c-a)/(c-b)] / [(d-a)/(d-b)] for distinct points of P^1 (q = infinity)."""
    if a == q:
        return mul[_sub(d, b, add, neg), inv[_sub(c, b, add, neg)]]
    if b == q:
        return mul[_sub(c, a, add, neg), inv[_sub(d, a, add, neg)]]
    if c == q:
        return mul[_sub(d, b, add, neg), inv[_sub(d, a, add, neg)]]
    if d == q:
        return mul[_sub(c, a, add, neg), inv[_sub(c, b, add, neg)]]
    num = mul[_sub(c, a, add, neg), _sub(d, b, add, neg)]
    den = mul[_sub(c, b, add, neg), _sub(d, a, add, neg)]
    return mul[num, inv[den]]


@njit(cache=True)
def coline_scan(D, r, n, new, ok, collect, found, add, mul, neg, inv, q):
    """Walk every coline of M[D] (D is r x n, full rank) and test its cross ratios.

    ok[x] says the whole associate class of x is allowed.  With new >= 0 only
    colines through the new element, or 4-point sets using its point, are
    tested.  With collect, every cross ratio is recorded in found (index q
    flags a repeated point, i.e. the cross ratio 1) and the scan never stops
    early.  Returns False on the first disallowed cross ratio.
    """
    if r < 2:
        return True
    work = np.empty((r, n), dtype=np.int32)
    used = np.empty(r, dtype=np.bool_)
    pts = np.empty(n, dtype=np.int64)
    mult = np.zeros(q + 1, dtype=np.int64)
    distinct = np.empty(n, dtype=np.int64)
    k = r - 2
    x = (1 << k) - 1
    limit = 1 << n
    first = True
    while (k == 0 and first) or (k > 0 and x < limit):
        first = False
        for i in range(r):
            used[i] = False
            for j in range(n):
                work[i, j] = D[i, j]
        independent = True
        for s in range(n):
            if not (x >> s) & 1:
                continue
            piv = -1
            for i in range(r):
                if not used[i] and work[i, s] != 0:
                    piv = i
                    break
            if piv < 0:
                independent = False
                break
            used[piv] = True
            ip = inv[work[piv, s]]
            for j in range(n):
                work[piv, j] = mul[work[piv, j], ip]
            for i in range(r):
                if i != piv and work[i, s] != 0:
                    f = work[i, s]
                    for j in range(n):
                        work[i, j] = add[work[i, j], neg[mul[f, work[piv, j]]]]
        if independent:
            u1 = -1
            u2 = -1
            for i in range(r):
                if not used[i]:
                    if u1 < 0:
                        u1 = i
                    else:
                        u2 = i
            nd = 0
            newpt = -2
            for j in range(n):
                if (x >> j) & 1:
                    pts[j] = -1
                    continue
                t = _point(work[u1, j], work[u2, j], mul, inv, q)
                pts[j] = t
                if t >= 0:
                    if mult[t] == 0:
                        distinct[nd] = t
                        nd += 1
                    mult[t] += 1
            if new >= 0:
                newpt = pts[new]
            through_new = new >= 0 and ((x >> new) & 1) == 1
            if collect and nd >= 3:
                for a in range(nd):
                    if mult[distinct[a]] > 1:
                        found[q] = True
            if nd >= 4:
                if new < 0 or through_new or collect:
                    for a in range(nd):
                        for b in range(a + 1, nd):
                            for c in range(b + 1, nd):
                                for d in range(c + 1, nd):
                                    cr = cross_ratio(distinct[a], distinct[b], distinct[c], distinct[d],
                                                     q, add, mul, neg, inv)
                                    if collect:
                                        found[cr] = True
                                    elif not ok[cr]:
                                        for z in range(nd):
                                            mult[distinct[z]] = 0
                                        return False
                elif newpt >= 0 and mult[newpt] == 1:
                    # only 4-sets that use the new element's (unshared) point
                    for b in range(nd):
                        if distinct[b] == newpt:
                            continue
                        for c in range(b + 1, nd):
                            if distinct[c] == newpt:
                                continue
                            for d in range(c + 1, nd):
                                if distinct[d] == newpt:
                                    continue
                                cr = cross_ratio(newpt, distinct[b], distinct[c], distinct[d],
                                                 q, add, mul, neg, inv)
                                if not ok[cr]:
                                    for z in range(nd):
                                        mult[distinct[z]] = 0
                                    return False
            for z in range(nd):
                mult[distinct[z]] = 0
        if k > 0:
            x = next_subset(x)
    return True


# ---------------------------------------------------------------------------
# confined single-element extensions


@njit(cache=True)
def allowed_pair_points(A, r, c, ok, add, mul, neg, inv, q):
    """AL[i, j, t]: z_j = t * z_i is compatible with the coline spanned by the other basis rows."""
    AL = np.zeros((r, r, q), dtype=np.bool_)
    pts = np.empty(c + 2, dtype=np.int64)
    for i in range(r):
        for j in range(r):
            if i == j:
                continue
            # row i -> 0, row j -> infinity, column -> A[j]/A[i]
            np_ = 0
            pts[np_] = 0
            np_ += 1
            pts[np_] = q
            np_ += 1
            for col in range(c):
                t = _point(A[i, col], A[j, col], mul, inv, q)
                if t < 0:
                    continue
                dup = False
                for z in range(np_):
                    if pts[z] == t:
                        dup = True
                        break
                if not dup:
                    pts[np_] = t
                    np_ += 1
            for t in range(q):
                isold = False
                for z in range(np_):
                    if pts[z] == t:
                        isold = True
                        break
                if isold:
                    AL[i, j, t] = True
                    continue
                good = True
                for a in range(np_):
                    for b in range(a + 1, np_):
                        for d in range(b + 1, np_):
                            cr = cross_ratio(t, pts[a], pts[b], pts[d], q, add, mul, neg, inv)
                            if not ok[cr]:
                                good = False
                                break
                        if not good:
                            break
                    if not good:
                        break
                AL[i, j, t] = good
    return AL


@njit(cache=True)
def confined_extensions(A, r, c, ok, fast, add, mul, neg, inv, q):
    """Columns z (first nonzero entry 1) with [A|z] simple and F-confined.

    Candidates are generated row by row from the cross ratios on colines
    spanned by basis rows, then every survivor gets the coline scan.
    """
    AL = allowed_pair_points(A, r, c, ok, add, mul, neg, inv, q)
    n = r + c + 1
    D = np.zeros((r, n), dtype=np.int32)
    for i in range(r):
        D[i, i] = 1
        for j in range(c):
            D[i, r + j] = A[i, j]
    cap = 1024
    out = np.empty((cap, r), dtype=np.int32)
    cnt = 0
    z = np.zeros(r, dtype=np.int32)
    nxt = np.zeros(r + 1, dtype=np.int64)  # next value to try per row
    found = np.zeros(q + 1, dtype=np.bool_)
    # depth-first over rows; value v at row j encoded as nxt[j]
    j = 0
    nxt[0] = 0
    while j >= 0:
        if j == r:
            # leaf
            nz = 0
            for i in range(r):
                if z[i] != 0:
                    nz += 1
            simple = nz >= 2
            if simple:
                for col in range(c):
                    # parallel test: z proportional to column col
                    ratio = -1
                    par = True
                    for i in range(r):
                        a = A[i, col]
                        if (a == 0) != (z[i] == 0):
                            par = False
                            break
                        if a != 0:
                            t = mul[z[i], inv[a]]
                            if ratio < 0:
                                ratio = t
                            elif ratio != t:
                                par = False
                                break
                    if par:
                        simple = False
                        break
            if simple:
                for i in range(r):
                    D[i, n - 1] = z[i]
                newe = n - 1 if fast else -1
                if coline_scan(D, r, n, newe, ok, False, found, add, mul, neg, inv, q):
                    if cnt == cap:
                        bigger = np.empty((cap * 2, r), dtype=np.int32)
                        bigger[:cap] = out
                        out = bigger
                        cap *= 2
                    out[cnt] = z
                    cnt += 1
            j -= 1
            continue
        # choose next admissible value for row j
        leading = True
        for i in range(j):
            if z[i] != 0:
                leading = False
                break
        v = nxt[j]
        chosen = -1
        while v < q:
            if leading:
                if v > 1:
                    break
                chosen = v
                v += 1
                break
            good = True
            if v != 0:
                for i in range(j):
                    zi = z[i]
                    if zi != 0:
                        t = mul[v, inv[zi]]
                        if not AL[i, j, t]:
                            good = False
                            break
            if good:
                chosen = v
                v += 1
                break
            v += 1
        if chosen < 0:
            nxt[j] = 0
            z[j] = 0
            j -= 1
            continue
        nxt[j] = v
        z[j] = chosen
        j += 1
        if j < r:
            nxt[j] = 0
    return out[:cnt]


# ---------------------------------------------------------------------------
# backtracking search for a confined representation with a given support


@njit(cache=True)
def _rep_candidates(A, i, j, s0, s1, sq, tvals, cnt, out, add, mul, neg, inv, q):
    """Values for cell (i, j) allowed by every 2x2 square that it completes; ascending."""
    if s0 == s1:
        for v in range(1, q):
            out[v - 1] = v
        return q - 1
    for v in range(q):
        cnt[v] = 0
    for s in range(s0, s1):
        i1, i2, j1, j2, basis = sq[s, 0], sq[s, 1], sq[s, 2], sq[s, 3], sq[s, 4]
        a = A[i1, j1]
        b = A[i1, j2]
        c = A[i2, j1]
        d = A[i2, j2]
        nt = len(tvals) if basis else 1
        for k in range(nt):
            t = tvals[k] if basis else 1
            if i == i1 and j == j1:
                v = mul[mul[b, c], inv[mul[t, d]]]
            elif i == i2 and j == j2:
                v = mul[mul[b, c], inv[mul[t, a]]]
            elif i == i1 and j == j2:
                v = mul[mul[t, mul[a, d]], inv[c]]
            else:
                v = mul[mul[t, mul[a, d]], inv[b]]
            # count each value once per square
            if cnt[v] == s - s0:
                cnt[v] += 1
    need = s1 - s0
    m = 0
    for v in range(1, q):
        if cnt[v] == need:
            out[m] = v
            m += 1
    return m


@njit(cache=True)
def rep_search(A, fi, fj, sq_ptr, sq, mn_ptr, mn_I, mn_J, mn_k, mn_b, tvals, target, ok,
               add, mul, neg, inv, q):
    """Fill the free cells of A (in order) so that M[A] has bases `target` and is confined.

    Returns True with A filled in, or False (A restored) when no filling exists.
    """
    r, c = A.shape
    n = r + c
    m = len(fi)
    cands = np.zeros((max(m, 1), q), dtype=np.int64)
    ncand = np.zeros(max(m, 1), dtype=np.int64)
    idx = np.zeros(max(m, 1), dtype=np.int64)
    cnt = np.zeros(q, dtype=np.int64)
    kmax = max(min(r, c), 1)
    work = np.zeros((kmax, kmax), dtype=np.int32)
    D = np.zeros((r, n), dtype=np.int32)
    for i in range(r):
        D[i, i] = 1
    found = np.zeros(q + 1, dtype=np.bool_)

    p = 0
    if m > 0:
        ncand[0] = _rep_candidates(A, fi[0], fj[0], sq_ptr[0], sq_ptr[1], sq, tvals, cnt, cands[0],
                                   add, mul, neg, inv, q)
    while True:
        leaf = m == 0
        if not leaf:
            if idx[p] >= ncand[p]:
                A[fi[p], fj[p]] = 0
                p -= 1
                if p < 0:
                    return False
                continue
            A[fi[p], fj[p]] = cands[p, idx[p]]
            idx[p] += 1
            good = True
            for t in range(mn_ptr[p], mn_ptr[p + 1]):
                k = mn_k[t]
                for a in range(k):
                    for b in range(k):
                        work[a, b] = A[mn_I[t, a], mn_J[t, b]]
                if _nonsingular(work, k, add, mul, neg, inv) != mn_b[t]:
                    good = False
                    break
            if not good:
                continue
            if p < m - 1:
                p += 1
                ncand[p] = _rep_candidates(A, fi[p], fj[p], sq_ptr[p], sq_ptr[p + 1], sq, tvals, cnt,
                                           cands[p], add, mul, neg, inv, q)
                idx[p] = 0
                continue
        # leaf: exact basis set, then confinement
        got = reduced_bases(A, r, c, add, mul, neg, inv)
        same = len(got) == len(target)
        if same:
            for t in range(len(got)):
                if got[t] != target[t]:
                    same = False
                    break
        if same:
            for i in range(r):
                for j in range(c):
                    D[i, r + j] = A[i, j]
            if coline_scan(D, r, n, -1, ok, False, found, add, mul, neg, inv, q):
                return True
        if m == 0:
            return False
