import pytest
from hypothesis import given
from hypothesis import strategies as st

from extvar.chains import ChainSolver, SolverFlags, solve_chain
from extvar.families import (
    FAMILIES,
    NOPE,
    YEP,
    FamilySolver,
    Reduced,
    Rewriter,
    StuckAt,
    UnknownFamily,
    Unsupported,
    reduce,
    solve_tf,
)
from extvar.types import (
    Atom,
    Con,
    Coprod,
    Fails,
    FamApp,
    Holds,
    In,
    L,
    Le,
    Leq,
    MinusP,
    NotIn,
    Onr,
    Refl,
    Stuck,
    Var,
    coprod,
    has_app,
    out_of,
)

from oracles import ground_pairs
from strategies import ATOMS, coproducts

A, B, C, D = (Atom(n) for n in "ABCD")
f, g, h = Var("f"), Var("g"), Var("h")


def into(a, b):
    return FamApp("Into", (a, b))


def test_into_goldens():
    assert reduce(into(B, coprod(A, B, C))) == Reduced(Con("L", (Con("R", (Con("Refl"),)),)))
    assert reduce(into(D, Coprod(A, B))) == Reduced(NOPE)
    assert reduce(into(A, Coprod(A, B))) == Reduced(Con("L", (Con("Refl"),)))
    assert reduce(into(A, Coprod(A, A))) == Reduced(NOPE)


def test_into_intermediate_forms():
    rw = Rewriter()
    step = rw.step(into(A, Coprod(A, B)))
    assert step == FamApp(
        "Ifi", (into(A, A), FamApp("IsIn", (A, B)), into(A, B), FamApp("IsIn", (A, A)))
    )
    assert rw.normalize(FamApp("Ifi", (Con("Refl"), NOPE, NOPE, YEP))) == Con("L", (Con("Refl"),))
    # both sides found: the duplicate case
    assert rw.normalize(FamApp("Ifi", (Con("Refl"), YEP, Con("Refl"), YEP))) == NOPE


def test_minus_golden():
    m = FamApp("Minus", (coprod(A, B, C), B))
    assert reduce(m) == Reduced(Con("Le", (C, Con("Onr", (A,)))))
    assert reduce(FamApp("OutOf", (m,))) == Reduced(Coprod(A, C))
    assert solve_tf(MinusP(coprod(A, B, C), B, h)) == Holds(Le(C, Onr(A)), Coprod(A, C))


def test_stuck_on_variables():
    out = reduce(into(f, Coprod(f, g)))
    assert isinstance(out, StuckAt)
    assert isinstance(solve_tf(Leq(f, Coprod(f, g))), Stuck)
    assert isinstance(solve_tf(Leq(f, Coprod(f, g)), {NotIn(f, g)}), Stuck)


def test_non_ground_divergence():
    givens = {NotIn(f, g)}
    assert solve_chain(Leq(f, Coprod(f, g)), givens) == Holds(L(Refl()))
    assert isinstance(solve_tf(Leq(f, Coprod(f, g)), givens), Stuck)


def test_unifiable_equation_blocks_later_ones():
    # IsIn f A: the first equation (f, f) does not match but unifies
    events = []
    out = reduce(FamApp("IsIn", (f, A)), trace=events.append)
    assert isinstance(out, StuckAt)
    assert [(e.clause, e.outcome) for e in events] == [("IsIn.1", "stuck")]


def test_apartness_is_infinitary():
    # IsIn f (f :+: A): equation 1 needs f = f :+: A, which only a cyclic type satisfies
    events = []
    reduce(FamApp("IsIn", (f, Coprod(f, A))), trace=events.append)
    assert events[0].outcome == "stuck"


def test_errors():
    with pytest.raises(UnknownFamily):
        reduce(FamApp("Nope", (A,)))
    with pytest.raises(Unsupported):
        FamilySolver(SolverFlags(generalized=True))


def test_equation_tables_in_order():
    assert len(FAMILIES["IsIn"]) == 3 and FAMILIES["IsIn"][-1].rhs == NOPE
    assert FAMILIES["Minus"][-1].rhs == NOPE
    assert set(FAMILIES) == {"IsIn", "Or", "Into", "Ifi", "Minus", "Ifm", "OutOf"}


SMALL = list(ground_pairs(5))


def test_ground_agreement_small():
    cs, fs = ChainSolver(), FamilySolver()
    for a, b in SMALL:
        for p in (In(a, b), NotIn(a, b), Leq(a, b), MinusP(a, b, h)):
            assert cs.solve(p) == fs.solve(p), p


def test_reduced_forms_are_app_free():
    rw = Rewriter()
    for a, b in SMALL:
        for fam in ("IsIn", "Into", "Minus"):
            out = reduce(FamApp(fam, (a, b)), rewriter=rw)
            assert isinstance(out, Reduced) and not has_app(out.type)


def test_outof_agrees_with_core():
    fs = FamilySolver()
    for a, b in SMALL:
        sol = fs.solve(MinusP(a, b, h))
        if isinstance(sol, Holds):
            assert sol.remainder == out_of(sol.evidence)


open_side = coproducts(st.one_of(ATOMS, st.just(f)), 4)


@given(open_side, open_side, st.sampled_from([In, Leq, MinusP]))
def test_solvers_never_disagree_when_both_decide(a, b, kind):
    p = kind(a, b, h) if kind is MinusP else kind(a, b)
    tf, ch = solve_tf(p), solve_chain(p)
    if not isinstance(tf, Stuck) and not isinstance(ch, Stuck):
        assert tf == ch


def test_each_solver_decides_some_goals_the_other_cannot():
    # the Or family ignores a stuck argument once the other is Yep
    assert solve_tf(In(A, Coprod(f, A))) == Holds()
    assert isinstance(solve_chain(In(A, Coprod(f, A))), Stuck)
    # Minus f f = Nope has no chain counterpart
    assert solve_tf(MinusP(f, f, h)) == Fails()
    assert isinstance(solve_chain(MinusP(f, f, h)), Stuck)
    # and in the other direction
    assert solve_chain(In(f, Coprod(f, A))) == Holds()
    assert isinstance(solve_tf(In(f, Coprod(f, A))), Stuck)
