"""Matroids on at most 16 elements stored as sorted arrays of basis bitmasks.

For a fixed size r, increasing bitmask order on r-subsets is colex order,
so the position of a mask in the sorted array is not its colex index (that
is given by colex_index) but the two orders agree.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from math import comb

import numpy as np

from . import kernels

MAX_N = 16


class MatroidError(ValueError):
    pass


def mask_of(subset) -> int:
    m = 0
    for e in subset:
        m |= 1 << int(e)
    return m


def elements_of(mask: int):
    return [i for i in range(mask.bit_length()) if (mask >> i) & 1]


def colex_index(mask: int) -> int:
    idx, k = 0, 0
    while mask:
        low = mask & -mask
        s = low.bit_length() - 1
        k += 1
        idx += comb(s, k)
        mask ^= low
    return idx


_COLEX: dict = {}


def colex_masks(n: int, r: int) -> np.ndarray:
    """All r-subsets of 0..n-1 as masks in colex order (= increasing order)."""
    key = (n, r)
    if key not in _COLEX:
        masks = [mask_of(s) for s in itertools.combinations(range(n), r)]
        arr = np.array(sorted(masks), dtype=np.uint32)
        arr.setflags(write=False)
        _COLEX[key] = arr
    return _COLEX[key]


def _popcount_array(a):
    a = a.astype(np.uint32)
    c = np.zeros(a.shape, dtype=np.int64)
    for i in range(MAX_N):
        c += (a >> i) & 1
    return c


_POP16 = _popcount_array(np.arange(1 << MAX_N, dtype=np.uint32)).astype(np.int8)


def _permute_masks(masks: np.ndarray, perm) -> np.ndarray:
    """Apply element map e -> perm[e] to every mask."""
    out = np.zeros(masks.shape, dtype=np.uint32)
    for e, f in enumerate(perm):
        out |= ((masks >> np.uint32(e)) & np.uint32(1)) << np.uint32(f)
    return out


class BasisMatroid:
    __slots__ = ("n", "r", "bases", "__dict__")

    def __init__(self, n: int, r: int, bases):
        if n > MAX_N:
            raise MatroidError(f"groundset of {n} elements exceeds {MAX_N}")
        arr = np.unique(np.asarray(bases, dtype=np.uint32))
        if len(arr) == 0:
            raise MatroidError("a matroid needs at least one basis")
        if np.any(_POP16[arr] != r) or (n < 32 and np.any(arr >> np.uint32(n))):
            raise MatroidError(f"every basis must be an {r}-subset of 0..{n - 1}")
        self.n = n
        self.r = r
        self.bases = arr
        self.bases.setflags(write=False)

    @classmethod
    def _trusted(cls, n: int, r: int, masks, presorted=False):
        """Skip validation for masks known to be distinct r-subsets (kernel output)."""
        self = object.__new__(cls)
        arr = np.asarray(masks, dtype=np.uint32)
        if not presorted:
            arr = np.sort(arr)
        self.n, self.r, self.bases = n, r, arr
        self.bases.setflags(write=False)
        return self

    # ---- construction / serialization --------------------------------------

    @classmethod
    def from_bases(cls, n: int, r: int, subsets):
        masks = []
        for s in subsets:
            s = list(s)
            if len(s) != r or len(set(s)) != r:
                raise MatroidError(f"{s} is not an {r}-subset")
            masks.append(mask_of(s))
        return cls(n, r, masks)

    @classmethod
    def uniform(cls, r: int, n: int):
        return cls.from_bases(n, r, itertools.combinations(range(n), r))

    def bitmap(self) -> bytes:
        idx = np.searchsorted(colex_masks(self.n, self.r), self.bases)
        bits = np.zeros(((comb(self.n, self.r) + 7) // 8) * 8, dtype=np.uint8)
        bits[idx] = 1
        return np.packbits(bits, bitorder="little").tobytes()

    def serialize(self) -> str:
        return f"B {self.n} {self.r} {self.bitmap().hex().upper()}"

    @classmethod
    def parse(cls, line: str):
        parts = line.split()
        if len(parts) not in (3, 4) or parts[0] != "B":
            raise MatroidError(f"not a B line: {line!r}")
        n, r = int(parts[1]), int(parts[2])
        try:
            data = np.frombuffer(bytes.fromhex(parts[3]) if len(parts) == 4 else b"", dtype=np.uint8)
        except ValueError as exc:
            raise MatroidError(f"bad bitmap in {line!r}") from exc
        total = comb(n, r)
        if len(data) != (total + 7) // 8:
            raise MatroidError(f"bitmap length {len(data)} does not fit n={n} r={r}")
        bits = np.unpackbits(data, bitorder="little")[:total].astype(bool)
        return cls(n, r, colex_masks(n, r)[bits])

    def __eq__(self, other):
        return (
            isinstance(other, BasisMatroid)
            and self.n == other.n
            and self.r == other.r
            and np.array_equal(self.bases, other.bases)
        )

    def __hash__(self):
        return hash((self.n, self.r, self.bases.tobytes()))

    def __repr__(self):
        return f"<BasisMatroid n={self.n} r={self.r} bases={len(self.bases)}>"

    @property
    def size(self):
        return self.n

    @property
    def ground(self):
        return (1 << self.n) - 1

    def basis_count(self):
        return len(self.bases)

    def basis_sets(self):
        return [tuple(elements_of(int(m))) for m in self.bases]

    # ---- rank machinery ----------------------------------------------------

    @cached_property
    def rank_table(self) -> np.ndarray:
        """rank of every subset, indexed by mask (int8, length 2^n)."""
        n = self.n
        size = 1 << n
        indep = np.zeros(size, dtype=bool)
        indep[self.bases] = True
        # push independence down to subsets
        for i in range(n):
            v = indep.reshape(-1, 2, 1 << i)
            v[:, 0, :] |= v[:, 1, :]
        rank = np.where(indep, _POP16[:size], 0).astype(np.int8)
        # rank(S) = max over independent subsets
        for i in range(n):
            v = rank.reshape(-1, 2, 1 << i)
            np.maximum(v[:, 1, :], v[:, 0, :], out=v[:, 1, :])
        rank.setflags(write=False)
        return rank

    def rank(self, X=None) -> int:
        m = self.ground if X is None else (X if isinstance(X, (int, np.integer)) else mask_of(X))
        return int(self.rank_table[int(m)])

    def is_independent(self, X) -> bool:
        m = X if isinstance(X, (int, np.integer)) else mask_of(X)
        return self.rank(m) == _POP16[int(m)]

    def closure(self, X) -> int:
        m = X if isinstance(X, (int, np.integer)) else mask_of(X)
        m = int(m)
        rk = self.rank_table[m]
        out = m
        for e in range(self.n):
            if not (m >> e) & 1 and self.rank_table[m | (1 << e)] == rk:
                out |= 1 << e
        return out

    def is_basis(self, X) -> bool:
        m = X if isinstance(X, (int, np.integer)) else mask_of(X)
        i = np.searchsorted(self.bases, np.uint32(m))
        return i < len(self.bases) and int(self.bases[i]) == int(m)

    # ---- duality, minors, relabeling ---------------------------------------

    def dual(self) -> "BasisMatroid":
        return BasisMatroid._trusted(self.n, self.n - self.r, np.uint32(self.ground) ^ self.bases)

    def relabel(self, perm) -> "BasisMatroid":
        """Element e becomes perm[e]."""
        perm = list(perm)
        if sorted(perm) != list(range(self.n)):
            raise MatroidError("relabel needs a permutation of the groundset")
        if sorted(perm) != list(range(self.n)):
            raise MatroidError("relabel needs a permutation of the groundset")
        return BasisMatroid._trusted(self.n, self.r, _permute_masks(self.bases, perm))

    def minor(self, delete=(), contract=()) -> "BasisMatroid":
        D = mask_of(delete) if not isinstance(delete, (int, np.integer)) else int(delete)
        C = mask_of(contract) if not isinstance(contract, (int, np.integer)) else int(contract)
        if D & C:
            raise MatroidError("deletion and contraction sets overlap")
        keep = self.ground & ~D
        rk_keep = self.rank(keep)
        rk_c = self.rank(C)
        b = self.bases
        inter = b & np.uint32(keep)
        sel = (_POP16[inter] == rk_keep) & (_POP16[b & np.uint32(C)] == rk_c)
        rest = inter[sel] & np.uint32(~C & self.ground)
        remaining = [e for e in range(self.n) if (keep >> e) & 1 and not (C >> e) & 1]
        out = np.zeros(rest.shape, dtype=np.uint32)
        for new, old in enumerate(remaining):
            out |= ((rest >> np.uint32(old)) & np.uint32(1)) << np.uint32(new)
        return BasisMatroid(len(remaining), rk_keep - rk_c, out)

    def delete(self, e):
        return self.minor(delete=[e])

    def contract(self, e):
        return self.minor(contract=[e])

    # ---- predicates -----------------------------------------------------------

    def loops(self):
        covered = int(np.bitwise_or.reduce(self.bases)) if len(self.bases) else 0
        return [e for e in range(self.n) if not (covered >> e) & 1]

    def is_simple(self) -> bool:
        if self.loops():
            return False
        rt = self.rank_table
        for e in range(self.n):
            for f in range(e + 1, self.n):
                if rt[(1 << e) | (1 << f)] < 2:
                    return False
        return True

    def is_cosimple(self) -> bool:
        return self.dual().is_simple()

    @cached_property
    def _lambda(self) -> np.ndarray:
        rt = self.rank_table.astype(np.int16)
        full = self.ground
        idx = np.arange(1 << self.n)
        return rt + rt[full ^ idx] - rt[full]

    def is_connected(self) -> bool:
        lam = self._lambda
        idx = np.arange(1, (1 << self.n) - 1)
        return self.n <= 1 or bool(np.all(lam[idx] >= 1))

    def is_3connected(self) -> bool:
        if self.n < 2:
            return True
        if not self.is_connected():
            return False
        sizes = _POP16[: 1 << self.n]
        lam = self._lambda
        sel = (sizes >= 2) & (sizes <= self.n - 2)
        return bool(np.all(lam[sel] >= 2))

    def predicates(self) -> dict:
        return {
            "isSimple": self.is_simple(),
            "isCosimple": self.is_cosimple(),
            "is3connected": self.is_3connected(),
        }

    def validate_exchange(self) -> bool:
        """Basis-exchange test through the rank function.

        The family is a basis family iff r(S) = max |S & B| satisfies local
        submodularity and the maximal sets of size r are exactly the given
        bases; equivalent to the exchange axiom and vectorised.
        """
        n = self.n
        rt = self.rank_table.astype(np.int16)
        idx = np.arange(1 << n)
        for x in range(n):
            bx = 1 << x
            for y in range(x + 1, n):
                by = 1 << y
                S = idx[(idx & (bx | by)) == 0]
                if np.any(rt[S | bx] + rt[S | by] < rt[S | bx | by] + rt[S]):
                    return False
        # every r-set of full rank must be listed
        full_rank = idx[(rt == self.r) & (_POP16[: 1 << n] == self.r)]
        return len(full_rank) == len(self.bases)

    # ---- invariants and isomorphism ----------------------------------------

    @cached_property
    def _invariant(self):
        h, colors, c2 = kernels.invariant_hash(self.bases, self.n, self.r)
        return int(h), colors, c2

    def invariant_key(self):
        return (self.n, self.r, len(self.bases), self._invariant[0])

    @property
    def invariant_hash(self) -> int:
        return self._invariant[0]

    def colors(self) -> np.ndarray:
        return self._invariant[1]

    def circuit_hyperplanes(self):
        """Masks X with |X| = r, r(X) = r - 1, X closed and every X - e independent."""
        out = []
        r = self.r
        if r == 0:
            return out
        rt = self.rank_table
        for X in itertools.combinations(range(self.n), r):
            m = mask_of(X)
            if rt[m] != r - 1:
                continue
            if any(rt[m ^ (1 << e)] != r - 1 for e in X):
                continue
            if self.closure(m) != m:
                continue
            out.append(m)
        return out

    def relax(self, C) -> "BasisMatroid":
        m = C if isinstance(C, (int, np.integer)) else mask_of(C)
        if int(m) not in self.circuit_hyperplanes():
            raise MatroidError(f"{elements_of(int(m))} is not a circuit-hyperplane")
        return BasisMatroid(self.n, self.r, np.append(self.bases, np.uint32(m)))


def is_isomorphic(M: BasisMatroid, N: BasisMatroid, witness=False):
    """Isomorphism test; with witness=True returns the permutation (M element -> N element) or None."""
    res = _find_isomorphism(M, N)
    if witness:
        return res
    return res is not None


def _find_isomorphism(M: BasisMatroid, N: BasisMatroid):
    if M.n != N.n or M.r != N.r or len(M.bases) != len(N.bases):
        return None
    if M.invariant_hash != N.invariant_hash:
        return None
    n = M.n
    cm, cn = M.colors(), N.colors()
    c2m, c2n = M._invariant[2], N._invariant[2]
    classes = {}
    for f in range(n):
        classes.setdefault(int(cn[f]), []).append(f)
    # map M elements in order of increasing class size
    order = sorted(range(n), key=lambda e: (len(classes.get(int(cm[e]), ())), e))
    target = N.bases
    perm = [-1] * n
    used = [False] * n

    def extend(k):
        if k == n:
            mapped = np.sort(_permute_masks(M.bases, perm))
            return np.array_equal(mapped, target)
        e = order[k]
        for f in classes.get(int(cm[e]), ()):
            if used[f]:
                continue
            ok = True
            for j in range(k):
                e2 = order[j]
                if c2m[e, e2] != c2n[f, perm[e2]]:
                    ok = False
                    break
            if not ok:
                continue
            perm[e] = f
            used[f] = True
            if extend(k + 1):
                return True
            used[f] = False
            perm[e] = -1
        return False

    if extend(0):
        return list(perm)
    return None


# ---------------------------------------------------------------------------
# minors


def naive_has_minor(M: BasisMatroid, N: BasisMatroid) -> bool:
    """Direct search over (contract, delete) pairs; the uncached oracle."""
    if N.n > M.n:
        return False
    k = M.r - N.r
    m = (M.n - N.n) - k
    if k < 0 or m < 0:
        return False
    E = range(M.n)
    for C in itertools.combinations(E, k):
        cm = mask_of(C)
        if not M.is_independent(cm):
            continue
        rest = [e for e in E if not (cm >> e) & 1]
        for D in itertools.combinations(rest, m):
            minor = M.minor(delete=D, contract=C)
            if minor.r == N.r and is_isomorphic(minor, N):
                return True
    return False


class MinorCache:
    """Memoised minor checks.

    Verdicts are keyed by (invariant key of M, index of M's iso class in its
    bucket, id of N); a stored verdict is reused only after an exact
    isomorphism between the query and the bucket representative.
    """

    def __init__(self, max_entries=None):
        self.buckets: dict = {}
        self.verdicts: dict = {}
        self.max_entries = max_entries
        self.hits = 0
        self.misses = 0

    def _class_of(self, M):
        key = M.invariant_key()
        reps = self.buckets.setdefault(key, [])
        for i, R in enumerate(reps):
            if R == M or is_isomorphic(M, R):
                return key, i
        reps.append(M)
        return key, len(reps) - 1

    def lookup(self, M, token):
        k = self._class_of(M) + (token,)
        return k, self.verdicts.get(k)

    def store(self, k, verdict):
        if self.max_entries is not None and len(self.verdicts) >= self.max_entries:
            self.verdicts.pop(next(iter(self.verdicts)))
        self.verdicts[k] = verdict


def has_minor(M: BasisMatroid, N: BasisMatroid, cache: MinorCache | None = None, token=None) -> bool:
    """Does M have a minor isomorphic to N?  Recursive single-element descent with memoisation."""
    if cache is None:
        cache = MinorCache()
    if token is None:
        token = (N.n, N.r, len(N.bases), N.bases.tobytes())
    return _has_minor(M, N, cache, token)


def _has_minor(M, N, cache, token):
    k = M.r - N.r
    m = (M.n - M.r) - (N.n - N.r)
    if k < 0 or m < 0:
        return False
    if k == 0 and m == 0:
        return is_isomorphic(M, N)
    key, v = cache.lookup(M, token)
    if v is not None:
        cache.hits += 1
        return v
    cache.misses += 1
    found = False
    loops = set(M.loops())
    coloops = set(M.dual().loops()) if m > 0 else set()
    for e in range(M.n):
        if k > 0 and e not in loops and _has_minor(M.contract(e), N, cache, token):
            found = True
            break
        if m > 0 and e not in coloops and _has_minor(M.delete(e), N, cache, token):
            found = True
            break
    cache.store(key, found)
    return found


def has_minor_any(M: BasisMatroid, Ns, cache: MinorCache | None = None) -> int:
    """Index of the first N in Ns that is a minor of M, or -1."""
    for i, N in enumerate(Ns):
        if has_minor(M, N, cache):
            return i
    return -1


# ---------------------------------------------------------------------------
# delta-wye


def _mk4():
    # a, b, c, a', b', c' = 0..5; triangles abc, ab'c', a'bc', a'b'c
    tri = [(0, 1, 2), (0, 4, 5), (3, 1, 5), (3, 4, 2)]
    bases = []
    for S in itertools.combinations(range(6), 3):
        if tuple(sorted(S)) not in {tuple(sorted(t)) for t in tri}:
            bases.append(S)
    return BasisMatroid.from_bases(6, 3, bases)


_MK4 = None


def triangles(M: BasisMatroid):
    rt = M.rank_table
    return [m for m in (mask_of(t) for t in itertools.combinations(range(M.n), 3))
            if rt[m] == 2 and all(rt[m ^ (1 << e)] == 2 for e in elements_of(m))]


def triads(M: BasisMatroid):
    return triangles(M.dual())


def delta_y(M: BasisMatroid, T) -> BasisMatroid:
    """Delta-Y exchange on the coindependent triangle T; result has rank r(M) + 1."""
    global _MK4
    if _MK4 is None:
        _MK4 = _mk4()
    Tm = T if isinstance(T, (int, np.integer)) else mask_of(T)
    Tm = int(Tm)
    tel = elements_of(Tm)
    if len(tel) != 3 or Tm not in triangles(M):
        raise MatroidError(f"{tel} is not a triangle")
    if M.dual().rank(Tm) != 3:
        raise MatroidError(f"{tel} is not coindependent")
    K = _MK4
    krt = K.rank_table
    rt = M.rank_table
    n = M.n
    # element positions of T in M and in the K4 copy
    a, b, c = tel
    tpos = {a: 0, b: 1, c: 2}
    prime = {a: 3, b: 4, c: 5}

    def cl_m(m):
        return M.closure(m)

    def cl_k(m):
        return K.closure(m)

    def to_k(mm):
        out = 0
        for e, p in tpos.items():
            if (mm >> e) & 1:
                out |= 1 << p
        return out

    def from_k(km):
        out = 0
        for e, p in tpos.items():
            if (km >> p) & 1:
                out |= 1 << e
        return out

    def rank_p(xm, xk):
        # closure fixpoint in the generalised parallel connection
        while True:
            xm2 = cl_m(xm | from_k(xk))
            xk2 = cl_k(xk | to_k(xm2))
            if xm2 == xm and xk2 == xk:
                break
            xm, xk = xm2, xk2
        return int(rt[xm]) + int(krt[xk]) - int(rt[xm & Tm])

    # result groundset: label e in T now names the primed element
    r_new = M.r + 1
    bases = []
    for S in itertools.combinations(range(n), r_new):
        xm = 0
        xk = 0
        for e in S:
            if (Tm >> e) & 1:
                xk |= 1 << prime[e]
            else:
                xm |= 1 << e
        if rank_p(xm, xk) == r_new:
            bases.append(S)
    if not bases:
        raise MatroidError("delta-Y produced no bases")
    return BasisMatroid.from_bases(n, r_new, bases)


def wye_delta(M: BasisMatroid, T) -> BasisMatroid:
    return delta_y(M.dual(), T).dual()


def delta_y_closure(M: BasisMatroid, with_duals=False, limit=10000):
    """All matroids Delta-Y equivalent to M up to isomorphism (BFS)."""
    found = [M]
    queue = [M]
    if with_duals:
        D = M.dual()
        if not is_isomorphic(D, M):
            found.append(D)
            queue.append(D)

    def add(X):
        for Y in found:
            if is_isomorphic(X, Y):
                return
        found.append(X)
        queue.append(X)
        if len(found) > limit:
            raise MatroidError("delta-Y closure exceeded limit")

    while queue:
        X = queue.pop(0)
        Xd = X.dual()
        for T in triangles(X):
            if Xd.rank(T) == 3:
                add(delta_y(X, T))
        for T in triangles(Xd):
            if X.rank(T) == 3:
                add(wye_delta(X, T))
    return found
