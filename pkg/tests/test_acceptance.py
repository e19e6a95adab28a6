"""Acceptance criteria 1-7, each reported as one PASS/FAIL line in the terminal summary.

Everything is rebuilt from scratch in a temporary store so the timings are honest.
"""

import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import record
from minorforge.catalog import catalog, k2_rep
from minorforge.engine import (
    LevelStore,
    Membership,
    excluded_minors,
    generate_level,
    load_class,
    rank_counts,
    verify_base_excluded,
)
from minorforge.field import make_field
from minorforge.linrep import LinearRep, matroid_of
from minorforge.matroid import delta_y_closure, is_isomorphic
from minorforge.pfield import Violation, builtin_partial_field, find_proxy, verify_proxy

TESTS = Path(__file__).parent

DYADIC_COUNTS = {7: {3: 1, 4: 1}, 8: {3: 1, 4: 7, 5: 1}, 9: {3: 1, 4: 24, 5: 24, 6: 1},
          10: {4: 52, 5: 223, 6: 52}, 11: {4: 60, 5: 1087, 6: 1087, 7: 60},
          12: {4: 44, 5: 3000, 6: 10755, 7: 3000, 8: 44}}
TWOREG_COUNTS = {5: {2: 1, 3: 1}, 6: {3: 1}, 7: {3: 2, 4: 2}, 8: {3: 4, 4: 17, 5: 4},
          9: {3: 3, 4: 62, 5: 62, 6: 3}, 10: {3: 2, 4: 113, 5: 502, 6: 113, 7: 2}}
TWOREG_N11_TOTAL = 4576


@pytest.fixture(scope="module")
def store_root(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance-store")


# the property suites gate every count run, so they go first
PROPERTY_SUITES = {
    "field axioms": ["test_field.py::test_field_axioms"],
    "associate classes": ["test_pfield.py::test_field_associate_classes", "test_pfield.py::test_rational_associates",
                          "test_pfield.py::test_group_associates_closed"],
    "Asc-closure of F": ["test_pfield.py::test_proxy_F_closed_under_associates"],
    "pivot/scaling invariance": ["test_linrep.py::test_pivot_invariance", "test_linrep.py::test_scaling_invariance"],
    "duality involution": ["test_matroid.py::test_duality_involution", "test_linrep.py::test_dual_reps"],
    "relax adds one basis": ["test_matroid.py::test_relax_adds_one_basis"],
    "Delta-Y round trip and rank shift": ["test_matroid.py::test_delta_y_round_trip_and_rank_shift"],
    "cached vs naive minor oracle": ["test_matroid.py::test_cached_minor_oracle_agrees_with_naive"],
    "iso-filter determinism": ["test_engine.py::test_isomorph_filter_determinism"],
    "splice == pair-deletable extensions": ["test_engine.py::test_splices_equal_pair_deletable_extensions"],
    "fast == exact confinement": ["test_engine.py::test_fast_confinement_matches_exact"],
}


def test_criterion_7_property_suites():
    results = {}
    for name, nodes in PROPERTY_SUITES.items():
        res = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider",
                              *[str(TESTS / n) for n in nodes]], capture_output=True, text=True, cwd=TESTS.parent)
        results[name] = res.returncode == 0
    failed = [k for k, v in results.items() if not v]
    record(7, not failed, f"{sum(results.values())}/{len(results)} suites green" +
                          (f"; failing: {', '.join(failed)}" if failed else ""))
    assert not failed


def test_criterion_1_proxies():
    t0 = time.time()
    want = {"S": (7, {"zeta": 3}), "D": (11, {"2": 2}), "U1": (23, {"alpha": 5}), "K2": (73, {"alpha": 15}),
            "U2": (211, {"alpha": 4, "beta": 44})}
    got, ok = {}, True
    for name, (q, images) in want.items():
        P = find_proxy(builtin_partial_field(name))
        got[name] = P.stanza().split(" F=")[0]
        ok &= P.field.q == q and (images is None or dict(P.images) == images)
        # minimality is built into the ascending prime scan; re-verify the image tuple
        ok &= verify_proxy(builtin_partial_field(name), P.field, dict(P.images)) == P
    pf = builtin_partial_field("D")
    rej = verify_proxy(pf, make_field(7), {"2": 2})
    cites = isinstance(rej, Violation) and ("2", "2", "2") in [tuple(pf.format(x) for x in w)
                                                              for w in rej.witnesses]
    elapsed = time.time() - t0
    ok = ok and cites and elapsed <= 3600
    record(1, ok, f"{'; '.join(got.values())}; D/GF(7) cites (2,2,2)={cites}; {elapsed:.0f}s")
    assert ok


def _generate(spec, top, store, ns_timed):
    t0 = time.time()
    counts = {}
    for n in range(min(r.matroid.n for _, r in spec.seed_records()), top + 1):
        recs = generate_level(spec, n, store)
        counts[n] = rank_counts(r.matroid for r in recs)
        if n == ns_timed:
            t_timed = time.time() - t0
    return counts, t_timed, time.time() - t0


def test_criterion_2_dyadic_counts(store_root):
    st = LevelStore(store_root, "dyadic")
    counts, t11, t12 = _generate(load_class("dyadic"), 12, st, 11)
    core = all(counts[n] == DYADIC_COUNTS[n] for n in range(7, 12)) and t11 <= 1800
    extended = counts[12] == DYADIC_COUNTS[12]
    totals = [sum(counts[n].values()) for n in range(7, 13)]
    record(2, core and extended, f"totals n=7..12 {totals}; n<=11 in {t11:.0f}s; n=12 (extended) "
                                 f"{'ok' if extended else 'MISMATCH'} at {t12:.0f}s")
    assert core and extended


def test_criterion_3_2regular_counts(store_root):
    st = LevelStore(store_root, "2regular")
    counts, t10, t11 = _generate(load_class("2regular"), 11, st, 10)
    core = all(counts[n] == TWOREG_COUNTS[n] for n in range(5, 11)) and t10 <= 3600
    n11 = counts[11]
    extended = sum(n11.values()) == TWOREG_N11_TOTAL and 3 not in n11
    totals = [sum(counts[n].values()) for n in range(5, 12)]
    record(3, core and extended, f"totals n=5..11 {totals}; n<=10 in {t10:.0f}s; n=11 rank-3 "
                                 f"members {n11.get(3, 0)}")
    assert core and extended


def _has_disjoint_chs(M):
    chs = M.circuit_hyperplanes()
    return any(a & b == 0 for i, a in enumerate(chs) for b in chs[i + 1:])


def test_criterion_4_dyadic_excluded(store_root):
    spec = load_class("dyadic")
    st = LevelStore(store_root, "dyadic")
    t0 = time.time()
    rep = excluded_minors(spec, 12, st)
    exc = rep["excluded"]
    sizes = {n: [(M.n, M.r) for M in exc[n]] for n in sorted(exc)}
    base_ok = len(rep["base"]) == 7 and all(b["ok"] for b in rep["base"])
    shape_ok = sizes == {8: [(8, 4)], 9: [], 10: [(10, 5)], 11: [], 12: [(12, 6)]}
    ok = base_ok and shape_ok
    if shape_ok:
        T8 = matroid_of(LinearRep(make_field(3), np.ones((4, 4), dtype=np.int32) - np.eye(4, dtype=np.int32)))
        ok &= is_isomorphic(exc[8][0], T8)
        for n in (8, 10, 12):
            M = exc[n][0]
            ok &= len(delta_y_closure(M)) == 1
            ok &= is_isomorphic(M, M.dual()) and _has_disjoint_chs(M) and M.is_3connected()
    record(4, ok, f"base verified={base_ok}; new by n {sizes}; |Delta|=1 and self-dual checked; "
                  f"{time.time() - t0:.0f}s")
    assert ok


def test_criterion_5_2regular_excluded(store_root):
    spec = load_class("2regular")
    st = LevelStore(store_root, "2regular")
    base = verify_base_excluded(spec)
    base_ok = len(base) == 17 and all(b["ok"] for b in base)
    rep = excluded_minors(spec, 10, st, verify_base=False)
    sieve_ok = rep["excluded"].get(9) == [] and rep["excluded"].get(10) == []
    failed = [b["name"] for b in base if not b["ok"]]
    record(5, base_ok and sieve_ok, f"17 base minors verified={base_ok} {failed or ''}; sieve n=9 "
                                    f"{len(rep['excluded'].get(9, [None]))}, n=10 "
                                    f"{len(rep['excluded'].get(10, [None]))}")
    assert base_ok and sieve_ok


def test_criterion_6_n3_n4_k2():
    t0 = time.time()
    spec = load_class("dyadic")
    member = Membership(spec)
    N3 = catalog("N3")
    n3 = (N3.n, N3.r) == (14, 7) and N3.is_3connected() and is_isomorphic(N3, N3.dual())
    # not dyadic, yet every single-element minor is: so no smaller excluded minor sits inside N3
    n3_minimal = not member(N3) and all(member(N3.delete(e)) and member(N3.contract(e)) for e in range(14))
    N4 = catalog("N4")
    n4 = (N4.n, N4.r) == (16, 8) and _has_disjoint_chs(N4)
    k2 = all(is_isomorphic(matroid_of(k2_rep(nm)), catalog(nm)) for nm in ("F7=", "TQ8", "P8-"))
    elapsed = time.time() - t0
    ok = n3 and n3_minimal and n4 and k2 and elapsed <= 600
    record(6, ok, f"N3 shape/3conn/self-dual={n3} minimal non-dyadic={n3_minimal}; N4={n4}; "
                  f"K2 isos={k2}; {elapsed:.0f}s")
    assert ok
