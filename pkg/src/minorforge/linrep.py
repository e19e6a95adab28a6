"""Reduced representations X x Y over small finite fields.

The represented matroid lives on the labels rows + cols; when labels are the
defaults the rows are elements 0..r-1 and the columns r..r+c-1.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .field import FieldSpec, make_field
from .matroid import BasisMatroid, _permute_masks, mask_of
from .pfield import field_associates, PartialFieldPresentation
from .polynomial import parse_poly


class RepError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LinearRep:
    field: FieldSpec
    entries: np.ndarray
    rows: tuple = None
    cols: tuple = None

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.int32)
        if a.ndim != 2:
            a = a.reshape(len(self.rows or ()), -1)
        if a.size and (a.min() < 0 or a.max() >= self.field.q):
            raise RepError("matrix entry outside the field")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        r, c = a.shape
        if self.rows is None:
            object.__setattr__(self, "rows", tuple(range(r)))
        if self.cols is None:
            object.__setattr__(self, "cols", tuple(range(r, r + c)))
        if len(self.rows) != r or len(self.cols) != c:
            raise RepError("label count does not match the matrix shape")
        if len(set(self.rows) | set(self.cols)) != r + c:
            raise RepError("row and column labels must be distinct")

    @property
    def r(self):
        return self.entries.shape[0]

    @property
    def c(self):
        return self.entries.shape[1]

    @property
    def n(self):
        return self.r + self.c

    def __eq__(self, other):
        return (
            isinstance(other, LinearRep)
            and self.field.q == other.field.q
            and self.rows == other.rows
            and self.cols == other.cols
            and np.array_equal(self.entries, other.entries)
        )

    def __hash__(self):
        return hash((self.field.q, self.rows, self.cols, self.entries.tobytes()))

    def serialize(self) -> str:
        body = " ".join(str(int(x)) for x in self.entries.ravel())
        return f"L {self.field.q} {self.r} {self.c} {body}".rstrip()

    @classmethod
    def parse(cls, line: str) -> "LinearRep":
        parts = line.split()
        if not parts or parts[0] != "L":
            raise RepError(f"not an L line: {line!r}")
        q, r, c = int(parts[1]), int(parts[2]), int(parts[3])
        vals = [int(x) for x in parts[4:]]
        if len(vals) != r * c:
            raise RepError(f"expected {r * c} entries, got {len(vals)}")
        return cls(make_field(q), np.array(vals, dtype=np.int32).reshape(r, c))

    def standard(self) -> "LinearRep":
        """Same matrix with default labels."""
        return LinearRep(self.field, self.entries)

    def full_matrix(self) -> np.ndarray:
        """[I | A] in default label order."""
        D = np.zeros((self.r, self.n), dtype=np.int32)
        D[:, : self.r] = np.eye(self.r, dtype=np.int32)
        D[:, self.r:] = self.entries
        return D

    def with_column(self, z) -> "LinearRep":
        if self.rows != tuple(range(self.r)) or self.cols != tuple(range(self.r, self.n)):
            raise RepError("columns can only be appended to a default-labelled rep")
        return LinearRep(self.field, np.column_stack([self.entries, np.asarray(z, dtype=np.int32)]))


def _tables(fld: FieldSpec):
    t = fld.tables()
    return t["add"], t["mul"], t["neg"], t["inv"]


def matroid_of(A: LinearRep) -> BasisMatroid:
    add, mul, neg, inv = _tables(A.field)
    masks = kernels.reduced_bases(np.ascontiguousarray(A.entries), A.r, A.c, add, mul, neg, inv)
    labels = list(A.rows) + list(A.cols)
    if labels != list(range(A.n)):
        return BasisMatroid._trusted(A.n, A.r, _permute_masks(masks, labels))
    return BasisMatroid._trusted(A.n, A.r, masks, presorted=True)


def dual_standard_matroid(M: BasisMatroid) -> BasisMatroid:
    """matroid_of(dual_rep_standard(A)) computed from M = matroid_of(A), A default-labelled."""
    r, c = M.r, M.n - M.r
    perm = [e + c for e in range(r)] + [e - r for e in range(r, M.n)]
    return M.dual().relabel(perm)


def extension_matroid(parent: BasisMatroid, A: LinearRep) -> BasisMatroid:
    """M[A] where A is the rep of `parent` with one column appended; reuses the parent's bases."""
    add, mul, neg, inv = _tables(A.field)
    new = kernels.reduced_bases_with(np.ascontiguousarray(A.entries), A.r, A.c, A.c - 1, add, mul, neg, inv)
    return BasisMatroid._trusted(A.n, A.r, np.concatenate([parent.bases, new]), presorted=True)


def pivot(A: LinearRep, x, y) -> LinearRep:
    """Pivot on the entry in row label x, column label y."""
    fld = A.field
    i = A.rows.index(x)
    j = A.cols.index(y)
    a = A.entries.astype(np.int64)
    p = int(a[i, j])
    if p == 0:
        raise RepError("pivot on a zero entry")
    add, mul, neg, inv = _tables(fld)
    ip = int(inv[p])
    out = a.copy()
    for u in range(A.r):
        for v in range(A.c):
            if u == i and v == j:
                out[u, v] = ip
            elif u == i:
                out[u, v] = mul[a[u, v], ip]
            elif v == j:
                out[u, v] = neg[mul[a[u, v], ip]]
            else:
                out[u, v] = add[a[u, v], neg[mul[mul[a[u, j], a[i, v]], ip]]]
    rows = list(A.rows)
    cols = list(A.cols)
    rows[i], cols[j] = y, x
    return LinearRep(fld, out, tuple(rows), tuple(cols))


def dual_rep(A: LinearRep) -> LinearRep:
    """-A^T with row and column labels exchanged."""
    neg = _tables(A.field)[2]
    return LinearRep(A.field, neg[A.entries.T], A.cols, A.rows)


def dual_rep_standard(A: LinearRep) -> LinearRep:
    """-A^T with default labels (the old columns become elements 0..c-1)."""
    neg = _tables(A.field)[2]
    return LinearRep(A.field, np.ascontiguousarray(neg[A.entries.T]))


def scale(A: LinearRep, row_factors=None, col_factors=None) -> LinearRep:
    mul = _tables(A.field)[1]
    a = A.entries
    if row_factors is not None:
        a = mul[a, np.asarray(row_factors)[:, None]]
    if col_factors is not None:
        a = mul[a, np.asarray(col_factors)[None, :]]
    return LinearRep(A.field, a, A.rows, A.cols)


# ---------------------------------------------------------------------------
# cross ratios and confinement


@lru_cache(maxsize=None)
def _ok_table(q: int, F: frozenset) -> np.ndarray:
    """ok[x]: every associate of x lies in F (x not 0 or 1)."""
    fld = make_field(q)
    ok = np.zeros(q + 1, dtype=np.bool_)
    for x in range(2, q) if fld.k == 1 else range(q):
        if x in (0, 1):
            continue
        ok[x] = field_associates(fld, x) <= F
    ok.setflags(write=False)
    return ok


def cross_ratios(A: LinearRep) -> frozenset:
    """Cr(A): every cross ratio over all pivots, including 1 when a degenerate 2x2 occurs."""
    fld = A.field
    add, mul, neg, inv = _tables(fld)
    found = np.zeros(fld.q + 1, dtype=np.bool_)
    ok = np.ones(fld.q + 1, dtype=np.bool_)
    kernels.coline_scan(A.full_matrix(), A.r, A.n, -1, ok, True, found, add, mul, neg, inv, fld.q)
    out = set()
    for x in np.flatnonzero(found[: fld.q]):
        out |= field_associates(fld, int(x))
    if found[fld.q]:
        out.add(1)
    return frozenset(out - {0})


def is_confined(A: LinearRep, F, new=None) -> bool:
    """Cr(A) is a subset of F + {1}; with new (a column index into [I|A]) only cross ratios through it."""
    fld = A.field
    add, mul, neg, inv = _tables(fld)
    ok = _ok_table(fld.q, frozenset(F))
    found = np.zeros(fld.q + 1, dtype=np.bool_)
    return bool(kernels.coline_scan(A.full_matrix(), A.r, A.n, -1 if new is None else new, ok, False,
                                    found, add, mul, neg, inv, fld.q))


def confined_simple_extensions(A: LinearRep, F, fast: bool = False):
    """Columns z (first nonzero = 1) with [A|z] simple and F-confined, in generation order."""
    fld = A.field
    add, mul, neg, inv = _tables(fld)
    ok = _ok_table(fld.q, frozenset(F))
    cols = kernels.confined_extensions(np.ascontiguousarray(A.entries), A.r, A.c, ok, fast,
                                       add, mul, neg, inv, fld.q)
    return [tuple(int(x) for x in z) for z in cols]


@lru_cache(maxsize=None)
def _normalized_columns(q: int, r: int) -> np.ndarray:
    """All nonzero columns of length r over GF(q) with first nonzero entry 1."""
    out = []
    for lead in range(r):
        for tail in itertools.product(range(q), repeat=r - lead - 1):
            out.append((0,) * lead + (1,) + tail)
    arr = np.array(out, dtype=np.int32).reshape(-1, r)
    arr.setflags(write=False)
    return arr


def _normalize(col, fld):
    col = [int(x) for x in col]
    for x in col:
        if x:
            ix = fld.inv(x)
            return tuple(fld.mul(v, ix) for v in col)
    return tuple(col)


def all_carrier_extensions(A: LinearRep):
    """Every projective point not already a column or a unit vector (simple extensions)."""
    fld = A.field
    present = {_normalize(A.entries[:, j], fld) for j in range(A.c)}
    for i in range(A.r):
        present.add(tuple(1 if k == i else 0 for k in range(A.r)))
    return [tuple(int(x) for x in z) for z in _normalized_columns(fld.q, A.r) if tuple(z) not in present]


def carrier_column_for(A: LinearRep, support, target: BasisMatroid):
    """Carrier column with the given support making M[A|z] equal target, or None."""
    fld = A.field
    add, mul, neg, inv = _tables(fld)
    idx = [i for i in range(A.r) if support[i]]
    if not idx:
        return None
    e = A.c
    want = target.bases[(target.bases >> np.uint32(A.r + e)) & np.uint32(1) == 1]
    a = np.column_stack([A.entries, np.zeros(A.r, dtype=np.int32)])
    for tail in itertools.product(range(1, fld.q), repeat=len(idx) - 1):
        z = np.zeros(A.r, dtype=np.int32)
        z[idx[0]] = 1
        for i, v in zip(idx[1:], tail):
            z[i] = v
        a[:, e] = z
        got = kernels.reduced_bases_with(a, A.r, A.c + 1, e, add, mul, neg, inv)
        if len(got) == len(want) and np.array_equal(got, want):
            return tuple(int(x) for x in z)
    return None


def apply_hom(matrix, pf: PartialFieldPresentation, images: dict, fld: FieldSpec, rows=None, cols=None):
    """Evaluate a matrix of polynomial expressions (strings or ints) in the generators."""
    names = list(pf.generators)
    point = [images[g] for g in names]
    out = []
    for row in matrix:
        vals = []
        for entry in row:
            poly = parse_poly(str(entry), names)
            vals.append(poly.evaluate(point, fld.p) % fld.q)
        out.append(vals)
    return LinearRep(fld, np.array(out, dtype=np.int32), rows, cols)


# ---------------------------------------------------------------------------
# deciding confined representability


def _support(M: BasisMatroid, rows, cols):
    B = mask_of(rows)
    S = np.zeros((len(rows), len(cols)), dtype=bool)
    for i, x in enumerate(rows):
        for j, y in enumerate(cols):
            S[i, j] = M.is_basis(B ^ (1 << x) ^ (1 << y))
    return S


def find_confined_rep(M: BasisMatroid, F, fld: FieldSpec, zero_pattern: LinearRep | None = None):
    """Search for an F-confined reduced representation of M over fld, or None.

    Rows are a fixed basis (the first one, or the rows of zero_pattern);
    entries on a spanning forest of the support graph are scaled to 1 and the
    rest are filled in by backtracking with 2x2 pruning.
    """
    F = frozenset(F)
    if zero_pattern is not None:
        rows, cols = list(zero_pattern.rows), list(zero_pattern.cols)
        if not M.is_basis(mask_of(rows)):
            raise RepError("zero pattern rows are not a basis")
    else:
        B = int(M.bases[0])
        rows = [e for e in range(M.n) if (B >> e) & 1]
        cols = [e for e in range(M.n) if not (B >> e) & 1]
    r, c = len(rows), len(cols)
    S = _support(M, rows, cols)
    if zero_pattern is not None and not np.array_equal(S, zero_pattern.entries != 0):
        return None
    q = fld.q
    add, mul, neg, inv = _tables(fld)
    okt = _ok_table(q, F)
    A = np.zeros((r, c), dtype=np.int64)

    # spanning forest of the bipartite support graph
    fixed = np.zeros((r, c), dtype=bool)
    seen_r = [False] * r
    seen_c = [False] * c
    for start in range(r):
        if seen_r[start]:
            continue
        seen_r[start] = True
        dq = deque([("r", start)])
        while dq:
            kind, v = dq.popleft()
            if kind == "r":
                for j in range(c):
                    if S[v, j] and not seen_c[j]:
                        seen_c[j] = True
                        fixed[v, j] = True
                        dq.append(("c", j))
            else:
                for i in range(r):
                    if S[i, v] and not seen_r[i]:
                        seen_r[i] = True
                        fixed[i, v] = True
                        dq.append(("r", i))
    A[fixed] = 1
    free = [(i, j) for i in range(r) for j in range(c) if S[i, j] and not fixed[i, j]]
    order = {p: k for k, p in enumerate(free)}
    B0 = mask_of(rows)

    # squares with all four entries in the support; check when the last is set
    squares_at = {p: [] for p in free}
    for i1, i2 in itertools.combinations(range(r), 2):
        for j1, j2 in itertools.combinations(range(c), 2):
            if not (S[i1, j1] and S[i1, j2] and S[i2, j1] and S[i2, j2]):
                continue
            cells = [(i1, j1), (i1, j2), (i2, j1), (i2, j2)]
            last = max(cells, key=lambda p: order.get(p, -1))
            if last not in order:
                continue
            basis = M.is_basis(B0 ^ (1 << rows[i1]) ^ (1 << rows[i2]) ^ (1 << cols[j1]) ^ (1 << cols[j2]))
            squares_at[last].append((i1, i2, j1, j2, basis))

    # larger square submatrices: nonsingular exactly when the swapped set is a basis
    minors_at = {p: [] for p in free}
    for k in range(3, min(r, c) + 1):
        for I in itertools.combinations(range(r), k):
            for J in itertools.combinations(range(c), k):
                cells = [(i, j) for i in I for j in J if (i, j) in order]
                if not cells:
                    continue
                last = max(cells, key=lambda p: order[p])
                swap = B0
                for i in I:
                    swap ^= 1 << rows[i]
                for j in J:
                    swap ^= 1 << cols[j]
                minors_at[last].append((np.array(I), np.array(J), M.is_basis(swap)))
    # flatten the constraint lists for the kernel
    m = len(free)
    sq_ptr = np.zeros(m + 1, dtype=np.int64)
    mn_ptr = np.zeros(m + 1, dtype=np.int64)
    sq_rows, mn_rows = [], []
    for k, p in enumerate(free):
        sq_rows.extend(squares_at[p])
        mn_rows.extend(minors_at[p])
        sq_ptr[k + 1] = len(sq_rows)
        mn_ptr[k + 1] = len(mn_rows)
    sq = np.array(sq_rows, dtype=np.int64).reshape(-1, 5)
    K = max(1, min(r, c))
    mn_I = np.zeros((len(mn_rows), K), dtype=np.int64)
    mn_J = np.zeros((len(mn_rows), K), dtype=np.int64)
    mn_k = np.zeros(len(mn_rows), dtype=np.int64)
    mn_b = np.zeros(len(mn_rows), dtype=np.bool_)
    for t, (I, J, basis) in enumerate(mn_rows):
        mn_I[t, : len(I)] = I
        mn_J[t, : len(J)] = J
        mn_k[t] = len(I)
        mn_b[t] = basis
    tvals = np.array(sorted(t for t in F if t != 1 and okt[t]), dtype=np.int64)
    local = [0] * M.n
    for i, x in enumerate(rows):
        local[x] = i
    for j, y in enumerate(cols):
        local[y] = r + j
    target = np.sort(_permute_masks(M.bases, local))
    fi = np.array([p[0] for p in free], dtype=np.int64)
    fj = np.array([p[1] for p in free], dtype=np.int64)
    A32 = np.ascontiguousarray(A.astype(np.int32))
    if not kernels.rep_search(A32, fi, fj, sq_ptr, sq, mn_ptr, mn_I, mn_J, mn_k, mn_b, tvals, target, okt,
                              add, mul, neg, inv, q):
        return None
    rep = LinearRep(fld, A32.copy(), tuple(rows), tuple(cols))
    if matroid_of(rep) != M or not is_confined(rep, F):
        raise RepError("representation search returned an invalid matrix")
    return rep
