import pytest

from minorforge.catalog import NAMES, CatalogError, catalog, k2_rep
from minorforge.linrep import matroid_of
from minorforge.matroid import is_isomorphic

# frozen basis counts (computed once from the constructions, cross-checked by hand for F7 and P8)
BASIS_COUNTS = {"F7": 28, "F7-": 29, "F7=": 30, "P8": 60, "P8-": 61, "P8=": 62, "TQ8": 62,
                "AG(2,3)\\e": 48, "(AG(2,3)\\e)dY": 56, "N3": 1786, "N4": 5386, "M(K4)": 16,
                "U2,5": 10, "P6": 19}


@pytest.mark.parametrize("name", sorted(BASIS_COUNTS))
def test_basis_counts(name):
    assert catalog(name).basis_count() == BASIS_COUNTS[name]


@pytest.mark.parametrize("name", [n for n in NAMES if n not in ("T8", "N1", "N2")])
def test_catalog_entries_are_3connected_matroids(name):
    M = catalog(name)
    assert M.validate_exchange()
    assert M.is_3connected()


def test_shapes():
    assert (catalog("N3").n, catalog("N3").r) == (14, 7)
    assert (catalog("N4").n, catalog("N4").r) == (16, 8)
    assert (catalog("(AG(2,3)\\e)dY").n, catalog("(AG(2,3)\\e)dY").r) == (8, 4)


def test_self_dual():
    for name in ("P8", "N3", "TQ8"):
        assert is_isomorphic(catalog(name), catalog(name).dual()), name


def test_relaxations_of_fano():
    F7m = catalog("F7-")
    for C in F7m.circuit_hyperplanes():
        assert is_isomorphic(F7m.relax(C), catalog("F7="))
    F7 = catalog("F7")
    for e in range(7):
        assert is_isomorphic(F7.delete(e), catalog("M(K4)"))


@pytest.mark.parametrize("name", ["F7=", "TQ8", "P8-"])
def test_k2_matrices(name):
    assert is_isomorphic(matroid_of(k2_rep(name)), catalog(name))


def test_store_backed_entries_need_a_store(tmp_path, monkeypatch):
    monkeypatch.delenv("MINORFORGE_STORE", raising=False)
    with pytest.raises(CatalogError):
        catalog("T8")
    with pytest.raises(CatalogError):
        catalog("T8", store=tmp_path)
    with pytest.raises(CatalogError):
        catalog("nonsense")
