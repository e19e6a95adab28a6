from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from minorforge.field import make_field
from minorforge.pfield import (
    PartialFieldError,
    Proxy,
    Violation,
    builtin_partial_field,
    field_associates,
    find_proxy,
    fundamentals,
    group_associates,
    rational_associates,
    verify_proxy,
)

# frozen oracle: F sets of the small proxies
PROXIES = {
    "S": "pf=S q=7 images=zeta=3 F=3,5",
    "D": "pf=D q=11 images=2=2 F=2,6,10",
    "U1": "pf=U1 q=23 images=alpha=5 F=5,7,10,14,17,19",
    "K2": "pf=K2 q=73 images=alpha=15 F=6,13,15,16,26,29,32,34,35,39,40,42,45,48,58,59,61,68",
}


@pytest.mark.parametrize("name", sorted(PROXIES))
def test_find_proxy_small(name):
    assert find_proxy(builtin_partial_field(name)).stanza() == PROXIES[name]


def test_dyadic_rejected_over_gf7_by_product_triple():
    pf = builtin_partial_field("D")
    res = verify_proxy(pf, make_field(7), {"2": 2})
    assert isinstance(res, Violation) and res.condition == "product"
    assert ("2", "2", "2") in [tuple(pf.format(x) for x in w) for w in res.witnesses]


def test_dyadic_fundamentals():
    pf = builtin_partial_field("D")
    assert sorted(pf.format(a) for a in fundamentals(pf)) == ["-1", "0", "1", "1/2", "2"]


def test_fundamental_counts():
    # nontrivial fundamentals match the proxy F sizes
    for name, stanza in PROXIES.items():
        pf = builtin_partial_field(name)
        assert len(fundamentals(pf)) - 2 == len(Proxy.parse(stanza).F)


@st.composite
def field_element(draw):
    q = draw(st.sampled_from([5, 7, 11, 23, 73, 211, 4]))
    return make_field(q), draw(st.integers(2, q - 1))


@settings(max_examples=200, deadline=None)
@given(field_element())
def test_field_associate_classes(t):
    F, a = t
    if F.q == 4 or a != 1:
        cls = field_associates(F, a)
        assert a in cls and 0 not in cls and 1 not in cls
        assert len(cls) in (1, 2, 3, 6)
        for b in cls:
            assert field_associates(F, b) == cls


@settings(max_examples=100, deadline=None)
@given(st.fractions().filter(lambda x: x not in (0, 1)))
def test_rational_associates(x):
    cls = rational_associates(x)
    assert Fraction(x) in cls
    assert all(rational_associates(y) == cls for y in cls)


@pytest.mark.parametrize("name", ["D", "U1", "K2"])
def test_group_associates_closed(name):
    pf = builtin_partial_field(name)
    fund = fundamentals(pf) - {pf.zero, pf.one}
    for a in fund:
        cls = group_associates(pf, a)
        assert cls <= fund
        assert all(group_associates(pf, b) == cls for b in cls)


@pytest.mark.parametrize("name", sorted(PROXIES))
def test_proxy_F_closed_under_associates(name):
    P = Proxy.parse(PROXIES[name])
    for a in P.F:
        assert field_associates(P.field, a) <= P.F


def test_stanza_round_trip():
    P = Proxy.parse(PROXIES["K2"])
    assert Proxy.parse(P.stanza()) == P


def test_bad_inputs():
    with pytest.raises(PartialFieldError):
        builtin_partial_field("nope")
    pf = builtin_partial_field("D")
    with pytest.raises(PartialFieldError):
        fundamentals(pf, bound=0)
    # constants map to themselves whatever images are passed
    assert isinstance(verify_proxy(pf, make_field(11), {"2": 3}), Proxy)
    # alpha = 2 comes before 5 in the search order, so it must be rejected
    u1 = builtin_partial_field("U1")
    assert isinstance(verify_proxy(u1, make_field(23), {"alpha": 2}), Violation)


@pytest.mark.parametrize("name", ["D", "S", "U1", "K2", "U2"])
def test_fundamentals_stable_in_exponent_bound(name):
    pf = builtin_partial_field(name)
    assert fundamentals(pf, 3) == fundamentals(pf, 4)


def test_u2_fundamental_count():
    # frozen: 30 nontrivial fundamentals, matching the size of the GF(211) image set
    pf = builtin_partial_field("U2")
    assert len(fundamentals(pf)) - 2 == 30
