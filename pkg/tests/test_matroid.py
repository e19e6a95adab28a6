import itertools
import random

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from minorforge.catalog import catalog
from minorforge.matroid import (
    BasisMatroid,
    MatroidError,
    MinorCache,
    colex_masks,
    delta_y,
    delta_y_closure,
    has_minor,
    is_isomorphic,
    mask_of,
    naive_has_minor,
    triangles,
    triads,
    wye_delta,
)

SMALL = ["U2,4", "U2,5", "U3,5", "U2,6", "U3,6", "P6", "M(K4)", "F7", "F7*", "F7-", "F7-*", "F7=", "P8",
         "P8-", "P8=", "TQ8", "AG(2,3)\\e", "(AG(2,3)\\e)dY"]


def catalog_matroids():
    return st.sampled_from(SMALL).map(catalog)


@st.composite
def relabelled(draw):
    M = draw(catalog_matroids())
    perm = draw(st.permutations(range(M.n)))
    return M, M.relabel(perm)


def test_colex_order_is_increasing_masks():
    masks = colex_masks(6, 3)
    assert list(masks) == sorted(masks)
    assert len(masks) == 20


def test_serialization_round_trip_and_format():
    F7 = catalog("F7")
    line = F7.serialize()
    assert line.startswith("B 7 3 ")
    assert line.split()[3] == line.split()[3].upper()
    assert BasisMatroid.parse(line) == F7
    with pytest.raises(MatroidError):
        BasisMatroid.parse("B 7 3 ZZ")


def test_bitmap_low_bit_first():
    # U_{1,2}: both singletons are bases; colex order {0}, {1}
    M = BasisMatroid.from_bases(2, 1, [(0,), (1,)])
    assert M.serialize() == "B 2 1 03"
    N = BasisMatroid.from_bases(2, 1, [(1,)])
    assert N.serialize() == "B 2 1 02"


@settings(max_examples=60, deadline=None)
@given(catalog_matroids())
def test_duality_involution(M):
    D = M.dual()
    assert D.dual() == M
    assert D.r == M.n - M.r and D.basis_count() == M.basis_count()
    assert D.validate_exchange()


@settings(max_examples=60, deadline=None)
@given(relabelled())
def test_invariant_and_iso_under_relabelling(pair):
    M, N = pair
    assert M.invariant_key() == N.invariant_key()
    perm = is_isomorphic(M, N, witness=True)
    assert perm is not None
    assert M.relabel(list(perm)) == N


def test_non_isomorphic_pairs():
    assert not is_isomorphic(catalog("F7"), catalog("F7-"))
    assert not is_isomorphic(catalog("P8-"), catalog("TQ8")) or catalog("P8-").basis_count() == 62
    assert not is_isomorphic(catalog("P8="), catalog("TQ8"))


@settings(max_examples=40, deadline=None)
@given(catalog_matroids(), st.data())
def test_relax_adds_one_basis(M, data):
    chs = M.circuit_hyperplanes()
    if not chs:
        return
    C = data.draw(st.sampled_from(chs))
    R = M.relax(C)
    assert R.basis_count() == M.basis_count() + 1
    assert R.validate_exchange()
    assert R.is_basis(C)


def test_relax_rejects_non_circuit_hyperplane():
    M = catalog("U3,6")
    with pytest.raises(MatroidError):
        M.relax(mask_of([0, 1, 2]))


@pytest.mark.parametrize("name", ["M(K4)", "F7", "F7-", "P6", "AG(2,3)\\e", "U2,5"])
def test_delta_y_round_trip_and_rank_shift(name):
    M = catalog(name)
    for T in triangles(M):
        if M.dual().rank(T) != 3:
            continue
        Y = delta_y(M, T)
        assert Y.n == M.n and Y.r == M.r + 1
        assert T in triads(Y)
        assert wye_delta(Y, T) == M or is_isomorphic(wye_delta(Y, T), M)


def test_delta_y_of_mk4_is_k23():
    K = catalog("M(K4)")
    Y = delta_y(K, triangles(K)[0])
    # the graph K_{2,3}: rank 4, twelve spanning trees, no longer 3-connected
    assert (Y.n, Y.r, Y.basis_count()) == (6, 4, 12)
    assert Y.is_connected() and not Y.is_3connected()


def test_delta_closure_sizes():
    assert len(delta_y_closure(catalog("U2,5"))) == 2
    assert len(delta_y_closure(catalog("P8"))) == 1
    assert len(delta_y_closure(catalog("F7"))) == 2  # F7 and F7*


def test_three_connectivity():
    for name in SMALL:
        assert catalog(name).is_3connected(), name
    M = catalog("F7").delete(0)  # M(K4)
    assert M.is_3connected()
    # direct sum of two triangles is not connected
    bases = [a + b for a in itertools.combinations(range(3), 2) for b in itertools.combinations(range(3, 6), 2)]
    S = BasisMatroid.from_bases(6, 4, bases)
    assert not S.is_connected() and not S.is_3connected()


def test_minors_are_order_preserving():
    M = catalog("F7")
    N = M.minor(delete=[0], contract=[6])
    assert N.n == 5 and N.r == 2


PAIRS = [(a, b) for a in SMALL for b in ["U2,4", "M(K4)", "F7", "F7-", "U2,5", "U3,5", "P6"]
         if catalog(a).n <= 8 and catalog(b).n < catalog(a).n]


def test_cached_minor_oracle_agrees_with_naive():
    cache = MinorCache()
    for a, b in PAIRS:
        M, N = catalog(a), catalog(b)
        assert has_minor(M, N, cache) == naive_has_minor(M, N), (a, b)
    assert cache.hits > 0


def test_known_minor_facts():
    assert has_minor(catalog("F7-"), catalog("M(K4)"))
    assert has_minor(catalog("F7"), catalog("M(K4)"))
    assert not has_minor(catalog("F7"), catalog("U2,4"))
    assert not has_minor(catalog("P8"), catalog("F7-"))
    assert has_minor(catalog("U3,6"), catalog("U2,5"))


@settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(2, 5), st.integers(0, 2**31))
def test_random_matroids_exchange(r, seed):
    # truncations of random binary matroids are matroids
    rng = random.Random(seed)
    n = r + rng.randint(1, 3)
    cols = [[rng.randint(0, 1) for _ in range(r)] for _ in range(n - r)]
    A = np.array(cols, dtype=np.int32).T if cols else np.zeros((r, 0), dtype=np.int32)
    from minorforge.field import make_field
    from minorforge.linrep import LinearRep, matroid_of
    M = matroid_of(LinearRep(make_field(2), A))
    assert M.validate_exchange()
    assert M.dual().dual() == M


@pytest.mark.parametrize("name,size", [("U2,5", 2), ("F7", 2), ("AG(2,3)\\e", 3), ("N3", 1)])
def test_delta_class_sizes(name, size):
    # |Delta(M)| counts Delta-Y / Y-Delta equivalents up to isomorphism
    assert len(delta_y_closure(catalog(name))) == size
