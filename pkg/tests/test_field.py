import pytest
from hypothesis import given, settings, strategies as st

from minorforge.field import FieldError, arith, is_prime, make_field, primes_up_to

ORDERS = [2, 3, 4, 5, 7, 11, 23, 73, 211]


def elems(q):
    return st.integers(min_value=0, max_value=q - 1)


@st.composite
def field_and_triple(draw):
    q = draw(st.sampled_from(ORDERS))
    return make_field(q), draw(elems(q)), draw(elems(q)), draw(elems(q))


@settings(max_examples=300, deadline=None)
@given(field_and_triple())
def test_field_axioms(t):
    F, a, b, c = t
    assert F.add(a, b) == F.add(b, a)
    assert F.mul(a, b) == F.mul(b, a)
    assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.add(a, 0) == a and F.mul(a, 1) == a
    assert F.add(a, F.neg(a)) == 0
    if a:
        assert F.mul(a, F.inv(a)) == 1


@pytest.mark.parametrize("q", [3, 4, 5, 7, 11, 23, 73, 211])
def test_multiplicative_group_cyclic(q):
    F = make_field(q)
    assert max(F.multiplicative_order(a) for a in range(1, q)) == q - 1


def test_tables_match_scalar_ops():
    F = make_field(4)
    t = F.tables()
    for a in range(4):
        for b in range(4):
            assert t["add"][a, b] == F.add(a, b)
            assert t["mul"][a, b] == F.mul(a, b)
    assert F.add(1, 1) == 0  # characteristic two


def test_rejects_unsupported_orders():
    for q in (1, 6, 8, 9, 65537):
        with pytest.raises(FieldError):
            make_field(q)
    with pytest.raises(FieldError):
        arith(make_field(7), "add", 7, 1)
    with pytest.raises(ZeroDivisionError):
        make_field(7).inv(0)


def test_primes():
    assert list(primes_up_to(30)) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert is_prime(65521) and not is_prime(65523)
