import pytest
from hypothesis import given, strategies as st

from lambdagen.enumerator import TermClass, enumerate_terms
from lambdagen.terms import (Abs, App, Index, ParseError, decode_prefix, encode_prefix, is_closed,
                             is_normal_form, natural_size, parse_term, print_term, unit_size)


def terms(max_leaves=12):
    leaf = st.integers(0, 4).map(Index)
    return st.recursive(leaf, lambda sub: st.one_of(sub.map(Abs), st.builds(App, sub, sub)),
                        max_leaves=max_leaves)


@pytest.mark.parametrize("t, n", [
    (Index(0), 1),
    (Abs(Abs(Index(1))), 4),
    (App(Index(0), Index(0)), 3),
    (Index(3), 4),
])
def test_natural_size(t, n):
    assert natural_size(t) == n
    assert unit_size(t) == n - 1


@pytest.mark.parametrize("t, closed", [
    (Abs(Index(0)), True),
    (Index(0), False),
    (Abs(App(Index(0), Abs(Index(1)))), True),
    (Abs(App(Index(1), Abs(Index(1)))), False),
])
def test_is_closed(t, closed):
    assert is_closed(t) is closed


@pytest.mark.parametrize("t, nf", [
    (App(Abs(Index(0)), Index(0)), False),
    (Abs(App(Index(0), Abs(Index(0)))), True),
    (Index(3), True),
    (Abs(App(Index(0), App(Abs(Index(0)), Index(0)))), False),
])
def test_is_normal_form(t, nf):
    assert is_normal_form(t) is nf


def test_parse_examples():
    assert parse_term("l(l(s(0)))") == Abs(Abs(Index(1)))
    assert print_term(App(Index(0), Index(0))) == "a(0,0)"
    assert parse_term(" a( l( 0 ) ,\n s(0) ) ") == App(Abs(Index(0)), Index(1))


@pytest.mark.parametrize("text, offset", [
    ("a(0", 4),
    ("", 1),
    ("x", 1),
    ("l(0))", 5),
    ("s(l(0))", 1),
    ("a(0 0)", 5),
])
def test_parse_errors_report_offset(text, offset):
    with pytest.raises(ParseError) as info:
        parse_term(text)
    assert info.value.offset == offset


def test_deep_terms_do_not_recurse():
    t = Index(0)
    for _ in range(20000):
        t = Abs(t)
    text = print_term(t)
    # compare flat codes; dataclass equality itself recurses
    assert encode_prefix(parse_term(text)) == encode_prefix(t)
    assert unit_size(t) == 20000
    assert is_normal_form(t) and is_closed(t)


@given(terms())
def test_round_trips(t):
    assert parse_term(print_term(t)) == t
    assert decode_prefix(encode_prefix(t)) == t
    assert natural_size(t) >= 1


@given(terms())
def test_nf_is_hereditary(t):
    if is_normal_form(t):
        stack = [t]
        while stack:
            u = stack.pop()
            assert is_normal_form(u)
            if type(u) is Abs:
                stack.append(u.body)
            elif type(u) is App:
                stack += [u.fun, u.arg]


def test_round_trip_over_enumeration():
    for u in range(9):
        for t in enumerate_terms(TermClass.PLAIN, u):
            assert parse_term(print_term(t)) == t
            assert unit_size(t) == u


def test_decode_rejects_bad_codes():
    with pytest.raises(ValueError):
        decode_prefix([-2, 0])
    with pytest.raises(ValueError):
        decode_prefix([0, 0])
