"""Named matroids used as seeds, base excluded minors and cross-checks."""

from __future__ import annotations

import itertools
import os
from functools import lru_cache
from pathlib import Path

import numpy as np

from .field import make_field
from .linrep import LinearRep, apply_hom, matroid_of
from .matroid import BasisMatroid, delta_y, is_isomorphic, mask_of, triangles
from .pfield import builtin_partial_field


class CatalogError(KeyError):
    pass


def rep_from_columns(fld, columns) -> LinearRep:
    """Reduced rep of the matroid whose elements are the given column vectors (in order)."""
    D = np.array(columns, dtype=np.int64).T % fld.q
    rows_n, n = D.shape
    add, mul, neg, inv = (fld.tables()[k] for k in ("add", "mul", "neg", "inv"))
    D = D.copy()
    pivots = []
    row = 0
    for col in range(n):
        if row == rows_n:
            break
        piv = next((i for i in range(row, rows_n) if D[i, col]), None)
        if piv is None:
            continue
        D[[row, piv]] = D[[piv, row]]
        D[row] = mul[D[row], inv[D[row, col]]]
        for i in range(rows_n):
            if i != row and D[i, col]:
                D[i] = add[D[i], neg[mul[D[i, col], D[row]]]]
        pivots.append(col)
        row += 1
    others = [j for j in range(n) if j not in pivots]
    A = D[: len(pivots)][:, others]
    return LinearRep(fld, A.astype(np.int32), tuple(pivots), tuple(others))


# reduced GF(3) representations
P8_A = [[0, 1, 1, 2], [1, 0, 1, 1], [1, 1, 0, 1], [2, 1, 1, 0]]

N3_A = [
    [1, 2, 0, 0, 1, 2, 2],
    [2, 2, 2, 0, 1, 1, 2],
    [0, 2, 0, 0, 1, 1, 2],
    [0, 0, 0, 0, 2, 1, 2],
    [1, 1, 1, 2, 1, 2, 2],
    [2, 1, 1, 1, 2, 1, 1],
    [2, 2, 2, 2, 2, 1, 0],
]

N4_A = [
    [1, 0, 1, 1, 1, 1, 2, 1],
    [0, 2, 0, 0, 1, 0, 0, 1],
    [1, 0, 2, 1, 0, 1, 2, 1],
    [1, 0, 1, 0, 0, 0, 1, 0],
    [1, 1, 0, 0, 0, 1, 0, 0],
    [1, 0, 1, 0, 1, 1, 0, 1],
    [2, 0, 2, 1, 0, 0, 2, 1],
    [1, 1, 1, 0, 0, 1, 1, 0],
]

# K2 matrices (generator alpha); rows/cols keep the figure labels in comments
K2_F7EQ = [["1", "1", "0", "1"], ["1", "0", "1", "1"], ["0", "1", "alpha", "1"]]  # a b c | d e f g
K2_TQ8 = [
    ["0", "alpha", "1", "1"],
    ["1", "0", "alpha", "alpha-1"],
    ["1", "alpha", "0", "alpha"],
    ["1", "alpha-1", "1", "0"],
]  # 1 7 5 3 | 8 6 4 2
K2_P8M = [
    ["1", "1", "1", "alpha+1"],
    ["1", "0", "alpha+1", "alpha+1"],
    ["1", "-alpha", "1", "0"],
    ["0", "1", "1", "1"],
]  # a b c f | d e g h

K2_MATRICES = {"F7=": K2_F7EQ, "TQ8": K2_TQ8, "P8-": K2_P8M}

BINARY_FANO_COLS = [(1, 1, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1)]


def k2_rep(name: str, alpha: int = 15, q: int = 73) -> LinearRep:
    fld = make_field(q)
    return apply_hom(K2_MATRICES[name], builtin_partial_field("K2"), {"alpha": alpha}, fld)


def _reduced(q, A):
    return LinearRep(make_field(q), np.array(A, dtype=np.int32))


def _fano():
    return matroid_of(_reduced(2, np.array(BINARY_FANO_COLS).T))


def _first_relax(M):
    return M.relax(M.circuit_hyperplanes()[0])


def _disjoint_pair(M):
    chs = M.circuit_hyperplanes()
    for a, b in itertools.combinations(chs, 2):
        if not a & b:
            return a, b
    raise CatalogError("no disjoint circuit-hyperplanes")


def _ag23():
    fld = make_field(3)
    cols = [(1, x, y) for x in range(3) for y in range(3)]
    return matroid_of(rep_from_columns(fld, cols))


def _coindependent_triangle(M):
    D = M.dual()
    for T in triangles(M):
        if D.rank(T) == 3:
            return T
    raise CatalogError("no coindependent triangle")


def _tq8():
    circuits = {mask_of(((i) % 8, (i + 2) % 8, (i + 4) % 8, (i + 5) % 8)) for i in range(8)}
    bases = [S for S in itertools.combinations(range(8), 4) if mask_of(S) not in circuits]
    return BasisMatroid.from_bases(8, 4, bases)


def _p6():
    bases = [S for S in itertools.combinations(range(6), 3) if S != (0, 1, 2)]
    return BasisMatroid.from_bases(6, 3, bases)


def _store_root():
    env = os.environ.get("MINORFORGE_STORE")
    return Path(env) if env else None


def _from_store(name: str, store=None):
    """T8, N1, N2 come out of the dyadic search; read them back from a store."""
    size = {"T8": 8, "N1": 10, "N2": 12}[name]
    root = Path(store) if store else _store_root()
    if root is None:
        raise CatalogError(f"{name} is produced by the dyadic search; no store configured")
    path = root / "dyadic" / "excluded" / f"n={size}.txt"
    if not path.exists():
        raise CatalogError(f"{name} not found: run the dyadic excluded search up to n={size} first")
    mats = [BasisMatroid.parse(l) for l in path.read_text().splitlines() if l.startswith("B ")]
    if len(mats) != 1:
        raise CatalogError(f"expected one excluded minor in {path}, found {len(mats)}")
    return mats[0]


_BUILDERS = {}


def _builder(*names):
    def wrap(fn):
        for nm in names:
            _BUILDERS[nm] = fn
        return fn

    return wrap


@lru_cache(maxsize=None)
def _build(name: str) -> BasisMatroid:
    if name.startswith("U") and "," in name:
        r, n = (int(x) for x in name[1:].split(","))
        return BasisMatroid.uniform(r, n)
    simple = {
        "F7": _fano,
        "M(K4)": lambda: matroid_of(_reduced(2, [[1, 1, 0], [1, 0, 1], [0, 1, 1]])),
        "AG(2,3)": _ag23,
        "P6": _p6,
        "P8": lambda: matroid_of(_reduced(3, P8_A)),
        "TQ8": _tq8,
        "N3": lambda: matroid_of(_reduced(3, N3_A)),
        "N4": lambda: matroid_of(_reduced(3, N4_A)),
    }
    if name in simple:
        return simple[name]()
    if name.endswith("*"):
        return _build(name[:-1]).dual()
    if name == "F7-":
        return _first_relax(_build("F7"))
    if name == "F7=":
        return _first_relax(_build("F7-"))
    if name == "AG(2,3)\\e":
        return _build("AG(2,3)").delete(8)
    if name == "(AG(2,3)\\e)dY":
        M = _build("AG(2,3)\\e")
        return delta_y(M, _coindependent_triangle(M))
    if name == "P8-":
        P = _build("P8")
        return P.relax(_disjoint_pair(P)[1])
    if name == "P8=":
        P = _build("P8")
        a, b = _disjoint_pair(P)
        return P.relax(a).relax(b)
    raise CatalogError(f"unknown matroid {name!r}")


NAMES = [
    "U2,4", "U2,5", "U3,5", "U2,6", "U3,6", "U4,6", "P6", "M(K4)", "F7", "F7*", "F7-", "F7-*",
    "F7=", "F7=*", "AG(2,3)", "AG(2,3)\\e", "AG(2,3)\\e*", "(AG(2,3)\\e)dY", "P8", "P8-", "P8=",
    "TQ8", "N3", "N4", "T8", "N1", "N2",
]

ALIASES = {"(AG(2,3)\\e)*": "AG(2,3)\\e*", "AG23e": "AG(2,3)\\e", "AG23e*": "AG(2,3)\\e*",
           "AG23eDY": "(AG(2,3)\\e)dY", "MK4": "M(K4)"}


def catalog(name: str, store=None) -> BasisMatroid:
    name = ALIASES.get(name, name)
    if name in ("T8", "N1", "N2"):
        return _from_store(name, store)
    return _build(name)


def catalog_rep(name: str) -> LinearRep | None:
    """An explicit reduced representation for the matrix-defined entries."""
    table = {"P8": (3, P8_A), "N3": (3, N3_A), "N4": (3, N4_A)}
    if name in table:
        return _reduced(*table[name])
    if name in K2_MATRICES:
        return k2_rep(name)
    return None


def same_as(name: str, M: BasisMatroid, store=None) -> bool:
    return is_isomorphic(catalog(name, store), M)
