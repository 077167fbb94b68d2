import pytest
from hypothesis import given
from hypothesis import strategies as st

from extvar.types import INT, Atom, Coprod, FixT, Kind, Var, apply_subst, free_vars
from extvar.unify import (
    UnifyError,
    apart,
    compile_builder,
    compile_matcher,
    match_onto,
    match_pairs,
    mgu,
    unifiable_infinitary,
    unify_into,
)

from strategies import ground, open_types

A, B = Atom("A"), Atom("B")
f, g, h = Var("f"), Var("g"), Var("h")


def test_mgu_basic():
    s = mgu(Coprod(f, B), Coprod(A, g))
    assert s == {"f": A, "g": B}
    assert mgu(A, B) is None
    assert mgu(f, Coprod(f, A)) is None


def test_mgu_is_idempotent_on_chains():
    s = mgu(Coprod(f, g), Coprod(g, Coprod(h, A)))
    for v, t in s.items():
        assert apply_subst(s, t) == t


def test_kind_mismatch_is_failure():
    assert mgu(f, INT) is None
    assert mgu(Var("a", Kind.STAR), INT) == {"a": INT}


def test_rigid_variables():
    with pytest.raises(UnifyError, match="rigid"):
        unify_into({}, f, A, rigid=frozenset({"f"}))
    s = {}
    unify_into(s, f, g, rigid=frozenset({"f"}))
    assert s == {"g": f}


def test_error_message_is_rendered():
    with pytest.raises(UnifyError) as info:
        unify_into({}, Coprod(A, f), Coprod(B, f))
    assert str(info.value) == "cannot unify A with B"


def test_matching_is_one_way():
    assert match_onto(Coprod(f, f), Coprod(A, A)) == {"f": A}
    assert match_onto(Coprod(f, f), Coprod(A, B)) is None
    # target variables are constants
    assert match_onto(A, f) is None
    assert match_pairs([(f, g), (f, g)]) == {"f": g}


def test_infinitary_unification():
    # f ~ f :+: A has only a cyclic solution
    assert mgu(f, Coprod(f, A)) is None
    assert unifiable_infinitary(f, Coprod(f, A))
    assert unifiable_infinitary(Coprod(f, f), Coprod(g, Coprod(g, A)))
    assert apart(Coprod(f, A), Coprod(g, B))
    assert not apart(FixT(f), FixT(Coprod(f, A)))


@given(open_types, open_types)
def test_mgu_unifies(t1, t2):
    s = mgu(t1, t2)
    if s is not None:
        assert apply_subst(s, t1) == apply_subst(s, t2)


@given(open_types, open_types)
def test_finite_unifiable_implies_infinitary(t1, t2):
    if mgu(t1, t2) is not None:
        assert unifiable_infinitary(t1, t2)


@given(open_types, st.dictionaries(st.sampled_from("fgh"), ground))
def test_match_recovers_instances(p, s):
    target = apply_subst(s, p)
    found = match_onto(p, target)
    assert found is not None
    assert apply_subst(found, p) == target
    assert set(found) == free_vars(p)


@given(st.lists(open_types, min_size=1, max_size=3), st.lists(ground, min_size=3, max_size=3))
def test_compiled_matcher_agrees(patterns, targets):
    targets = targets[: len(patterns)]
    assert compile_matcher(tuple(patterns))(tuple(targets)) == match_pairs(list(zip(patterns, targets)))


@given(open_types, st.dictionaries(st.sampled_from("fgh"), ground))
def test_compiled_builder_agrees(t, s):
    assert compile_builder(t)(s) == apply_subst(s, t)
