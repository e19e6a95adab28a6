import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from minorforge.catalog import catalog, catalog_rep, k2_rep
from minorforge.engine import U2_PROXY
from minorforge.field import make_field
from minorforge.linrep import (
    LinearRep,
    RepError,
    all_carrier_extensions,
    carrier_column_for,
    confined_simple_extensions,
    cross_ratios,
    dual_rep,
    dual_rep_standard,
    dual_standard_matroid,
    extension_matroid,
    find_confined_rep,
    is_confined,
    matroid_of,
    pivot,
    scale,
)
from minorforge.pfield import Proxy

DYADIC_F = frozenset({2, 6, 10})
GF11 = make_field(11)


def rep(q, rows):
    return LinearRep(make_field(q), np.array(rows, dtype=np.int32))


def sample_reps():
    f7m = find_confined_rep(catalog("F7-"), DYADIC_F, GF11)
    return [catalog_rep("P8"), catalog_rep("N3"), k2_rep("TQ8"), k2_rep("P8-"), f7m,
            rep(211, [[1, 1], [1, 4], [1, 44]]), rep(4, [[1, 1, 1], [1, 2, 3]])]


REPS = sample_reps()


def test_cross_ratio_oracles():
    assert cross_ratios(rep(11, [[1, 1], [2, 1]])) == DYADIC_F
    assert cross_ratios(rep(3, [[1, 1], [1, 2]])) == {2}
    u25 = rep(211, [[1, 1, 1], [1, 4, 44]])
    assert matroid_of(u25) == catalog("U2,5")
    assert cross_ratios(u25) == Proxy.parse(U2_PROXY).F
    A = rep(11, [[1, 1], [2, 1]])
    assert is_confined(A, DYADIC_F) and not is_confined(A, {6, 10})


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(REPS), st.data())
def test_pivot_invariance(A, data):
    M = matroid_of(A)
    nz = [(i, j) for i in range(A.r) for j in range(A.c) if A.entries[i, j]]
    i, j = data.draw(st.sampled_from(nz))
    P = pivot(A, A.rows[i], A.cols[j])
    assert matroid_of(P) == M
    assert cross_ratios(P) == cross_ratios(A)
    with pytest.raises(RepError):
        zero = [(i, j) for i in range(A.r) for j in range(A.c) if not A.entries[i, j]]
        if not zero:
            raise RepError("no zero entries")
        pivot(A, A.rows[zero[0][0]], A.cols[zero[0][1]])


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(REPS), st.data())
def test_scaling_invariance(A, data):
    q = A.field.q
    rf = data.draw(st.lists(st.integers(1, q - 1), min_size=A.r, max_size=A.r))
    cf = data.draw(st.lists(st.integers(1, q - 1), min_size=A.c, max_size=A.c))
    S = scale(A, rf, cf)
    assert matroid_of(S) == matroid_of(A)
    assert cross_ratios(S) == cross_ratios(A)


@pytest.mark.parametrize("k", range(len(REPS)))
def test_dual_reps(k):
    A = REPS[k]
    M = matroid_of(A)
    assert matroid_of(dual_rep(A)) == M.dual()
    D = dual_rep_standard(A.standard())
    assert matroid_of(D) == dual_standard_matroid(matroid_of(A.standard()))
    assert matroid_of(dual_rep(dual_rep(A))) == M


def test_serialization_round_trip():
    for A in REPS:
        line = A.serialize()
        assert line.startswith(f"L {A.field.q} {A.r} {A.c} ")
        assert LinearRep.parse(line).standard() == A.standard()


def test_confined_extensions_are_simple_and_confined():
    A = find_confined_rep(catalog("F7-"), DYADIC_F, GF11).standard()
    M = matroid_of(A)
    exts = confined_simple_extensions(A, DYADIC_F)
    assert exts
    for z in exts:
        B = A.with_column(z)
        N = matroid_of(B)
        assert N.is_simple() and N.delete(N.n - 1) == M
        assert is_confined(B, DYADIC_F)
        assert extension_matroid(M, B) == N


def test_find_confined_rep():
    assert find_confined_rep(catalog("U2,5"), DYADIC_F, GF11) is None
    A = find_confined_rep(catalog("F7-"), DYADIC_F, GF11)
    assert matroid_of(A) == catalog("F7-") and is_confined(A, DYADIC_F)
    u2 = Proxy.parse(U2_PROXY)
    for name in ("F7=", "P8-", "TQ8", "U3,6"):
        assert find_confined_rep(catalog(name), u2.F, u2.field) is None, name
    assert find_confined_rep(catalog("U3,5"), u2.F, u2.field) is not None


def test_carrier_lockstep_column():
    conf = find_confined_rep(catalog("F7-"), DYADIC_F, GF11).standard()
    car = find_confined_rep(catalog("F7-"), {2}, make_field(3)).standard()
    for z in confined_simple_extensions(conf, DYADIC_F):
        M = matroid_of(conf.with_column(z))
        zc = carrier_column_for(car, [x != 0 for x in z], M)
        assert zc is not None
        assert matroid_of(car.with_column(zc)) == M


def test_all_carrier_extensions_count():
    A = catalog_rep("P8")  # 4 x 4 over GF(3): 40 points, 8 used
    assert len(all_carrier_extensions(A)) == 40 - 8
