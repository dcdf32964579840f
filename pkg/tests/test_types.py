import pytest
from hypothesis import given, strategies as st

from lambdagen.simple_types import Arrow, TVar, TypeStore, display_type, infer_type, variable_name
from lambdagen.terms import Abs, App, Index, parse_term


def test_fresh_vars_are_distinct():
    s = TypeStore()
    seen = {s.fresh_var().id for _ in range(10 ** 6)}
    assert len(seen) == 10 ** 6


def test_fresh_after_rollback_never_reuses():
    s = TypeStore()
    a = s.fresh_var()
    mark = s.snapshot()
    b = s.fresh_var()
    assert s.unify(a, Arrow(b, b))
    s.rollback(mark)
    c = s.fresh_var()
    assert c.id not in (a.id, b.id)


def test_unify_binds():
    s = TypeStore()
    a, b = s.fresh_var(), s.fresh_var()
    assert s.unify(a, Arrow(b, b))
    assert s.substitute(a) == Arrow(b, b)


def test_occurs_check_fails_and_restores():
    s = TypeStore()
    a, b = s.fresh_var(), s.fresh_var()
    assert not s.unify(a, Arrow(a, b))
    assert s.live_bindings == 0


def test_unify_structural():
    s = TypeStore()
    a, b, c, d = (s.fresh_var() for _ in range(4))
    assert s.unify(Arrow(a, c), Arrow(b, Arrow(d, d)))
    assert s.resolve(a) == s.resolve(b)
    assert s.substitute(c) == Arrow(d, d)


def test_failed_unify_keeps_earlier_bindings():
    s = TypeStore()
    a, b, c = s.fresh_var(), s.fresh_var(), s.fresh_var()
    assert s.unify(a, b)
    before = s.live_bindings
    # the first pair binds, the second hits the occurs check; both undone
    assert not s.unify(Arrow(c, c), Arrow(b, Arrow(c, c)))
    assert s.live_bindings == before


def test_rollback_restores_exactly():
    s = TypeStore()
    vs = [s.fresh_var() for _ in range(6)]
    assert s.unify(vs[0], vs[1])
    mark = s.snapshot()
    assert s.unify(vs[2], Arrow(vs[3], vs[4]))
    assert s.unify(vs[5], vs[2])
    s.rollback(mark)
    assert s.live_bindings == 1
    assert s.resolve(vs[2]) == vs[2]


@pytest.mark.parametrize("text, expected", [
    ("l(l(s(0)))", "(A->B->A)"),
    ("l(a(0,0))", None),
    ("l(a(0,l(0)))", "(((A->A)->B)->B)"),
    ("l(0)", "(A->A)"),
    ("l(l(l(a(a(s(s(0)),0),a(s(0),0)))))", "((A->B->C)->(A->B)->A->C)"),
    ("0", None),
])
def test_infer_closed(text, expected):
    ty = infer_type(parse_term(text))
    assert (None if ty is None else display_type(ty)) == expected


def test_infer_open_shares_free_levels():
    # both occurrences of the free index 0 get the same type
    assert infer_type(parse_term("a(0,0)"), open_term=True) is None
    assert display_type(infer_type(parse_term("a(0,s(0))"), open_term=True)) == "A"
    assert display_type(infer_type(parse_term("l(s(0))"), open_term=True)) == "(A->B)"


def test_display_rules():
    a, b = TVar(7), TVar(3)
    assert display_type(a) == "A"
    assert display_type(Arrow(Arrow(a, b), a)) == "((A->B)->A)"
    assert display_type(Arrow(a, Arrow(b, a))) == "(A->B->A)"
    assert [variable_name(i) for i in (0, 25, 26, 27, 52)] == ["A", "Z", "A1", "B1", "A2"]


def test_deep_types():
    t = Index(0)
    for _ in range(3000):
        t = Abs(t)
    ty = infer_type(t)
    assert display_type(ty).count("->") == 3000


pairs = st.recursive(st.integers(0, 3).map(TVar), lambda sub: st.builds(Arrow, sub, sub), max_leaves=8)


@given(pairs, pairs)
def test_unify_symmetric(a, b):
    s1, s2 = TypeStore(), TypeStore()
    for s in (s1, s2):
        for _ in range(4):
            s.fresh_var()
    r1 = s1.unify(a, b)
    r2 = s2.unify(b, a)
    assert r1 == r2
    if r1:
        assert s1.substitute(a) == s1.substitute(b)
        assert display_type(s1.substitute(a)) == display_type(s2.substitute(a))
    else:
        assert s1.live_bindings == 0 and s2.live_bindings == 0


@given(pairs, pairs)
def test_resolution_terminates(a, b):
    s = TypeStore()
    for _ in range(4):
        s.fresh_var()
    if s.unify(a, b):
        for i in range(4):
            steps = 0
            t = TVar(i)
            while type(t) is TVar and t.id in s._bindings:
                t = s._bindings[t.id]
                steps += 1
                assert steps <= s.live_bindings
