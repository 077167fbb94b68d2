import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extvar import benchmarks as B
from extvar.chains import solve_chain
from extvar.defaulting import AmbiguityError
from extvar.lang import (
    LangFlags,
    ParseError,
    PatternFailure,
    TypeCheckError,
    canonical,
    check_program,
    evaluate,
    inject_value,
    parse_expr,
    parse_program,
    route_branch,
    show,
)
from extvar.lang.syntax import App, DataDecl, LetD, MainD, TypeAlias, parse_pred
from extvar.lang.values import (
    REMAINDER,
    SELECTED,
    VCon,
    VIn,
    VInl,
    VInr,
    VPair,
    fmap_value,
    fun,
    strip_tags,
)
from extvar.types import Atom, Coprod, FixT, Holds, L, Le, Leq, MinusP, Onl, Onr, R, Refl, Split, Var

from oracles import all_trees, constructors_in, direct_eval, leaf_of, tagged_values, term_source, terms

A, B_, C = Atom("A"), Atom("B"), Atom("C")
SOLVERS = ["chains", "families"]


# -- parsing


def test_parse_data_declaration():
    (d,) = parse_program("data Const = Const Int")
    assert isinstance(d, DataDecl) and (d.functor, d.con, d.fields) == ("Const", "Const", ["Int"])


def test_parse_parameterised_data_declaration():
    (d,) = parse_program("data Sum e = Plus e e")
    assert (d.functor, d.con, d.fields) == ("Sum", "Plus", ["self", "self"])


def test_parse_alias_and_main():
    alias, main = parse_program("type E1 = Fix (Const :+: Sum)\nmain = eval1 x\n")
    assert isinstance(alias, TypeAlias) and alias.name == "E1"
    assert alias.type == FixT(Coprod(Atom("Const"), Atom("Sum")))
    assert isinstance(main, MainD) and isinstance(main.expr, App)
    assert main.expr.fn.name == "eval1" and main.expr.arg.name == "x"


def test_parse_function_sugar():
    (d,) = parse_program("let evalSum (Plus a b) r = r a + r b")
    assert isinstance(d, LetD) and d.name == "evalSum" and len(d.expr.pats) == 2


def test_operator_precedence():
    e = parse_expr("a ? b ? c")
    assert e.fn.fn.name == "?" and e.arg.fn.fn.name == "?"  # right-nested
    e = parse_expr("f x + g y * z")
    assert e.fn.fn.name == "+" and e.arg.fn.fn.name == "*"
    e = parse_expr("a .?. b ? c")
    assert e.fn.fn.name == "?" and e.fn.arg.fn.fn.name == ".?."


def test_parse_error_position():
    with pytest.raises(ParseError) as e:
        parse_program("data Const = Const Int\nlet x = (1 +\n")
    assert (e.value.line, e.value.col) >= (2, 1)
    with pytest.raises(ParseError) as e:
        parse_program("main = 1 $ 2")
    assert (e.value.line, e.value.col) == (1, 10)


def test_declarations_start_in_column_one():
    with pytest.raises(ParseError):
        parse_program("  main = 1")


def test_comments_are_ignored():
    (d,) = parse_program("-- a comment\nmain = 1 -- trailing\n")
    assert d.expr.value == 1


def test_parse_predicates():
    assert parse_pred("Into B ((A :+: B) :+: C)") == Leq(B_, Coprod(Coprod(A, B_), C))
    p = parse_pred("(A :+: B) :-: A")
    assert isinstance(p, MinusP) and p.out.name == "out#"


# -- inference


@pytest.mark.parametrize("solver", SOLVERS)
@pytest.mark.parametrize("name", sorted(B.GOLDEN_SCHEMES))
def test_golden_schemes(solver, name):
    prog = check_program(B.LIBRARY, solver)
    assert canonical(prog.scheme(name)) == B.GOLDEN_SCHEMES[name]


def test_signature_lines():
    lines = check_program(B.LIBRARY).signatures()
    assert "eval1 : forall a. (a :-: Const = Sum) => Fix a -> Int" in lines
    assert "x : forall a. (Const :<: a, Sum :<: a) => Fix a" in lines


def test_eval2_prime_is_ambiguous_when_generalized():
    with pytest.raises(AmbiguityError) as e:
        check_program(B.LIBRARY + B.EVAL2_PRIME, "chains", LangFlags(generalized=True))
    assert e.value.variables


def test_eval2_prime_without_generalized_clauses():
    with pytest.raises((AmbiguityError, TypeCheckError)):
        check_program(B.LIBRARY + B.EVAL2_PRIME)


def test_failing_predicate_is_a_type_error_with_trace():
    src = B.PRELUDE + "main = (inj (Const 1) :: Sum Int)\n"
    with pytest.raises(TypeCheckError) as e:
        check_program(src)
    assert e.value.trace


def test_exposed_pattern_needs_flag():
    src = B.program("lefty x", extra=B.LEFTY)
    with pytest.raises(TypeCheckError, match="expose"):
        check_program(src)


def test_type_mismatch():
    with pytest.raises(TypeCheckError):
        check_program("main = 1 + (1, 2)")


def test_unbound_name():
    with pytest.raises(TypeCheckError, match="zz"):
        check_program("main = zz")


def test_signature_less_general_than_inferred_is_rejected():
    with pytest.raises(TypeCheckError):
        check_program(B.PRELUDE + B.TERMS + "let k : Int = x\n")


def test_signature_fixes_the_instantiation():
    src = B.PRELUDE + B.TERMS + B.EVALUATORS + "let e1 : E1 = x\nmain = eval1 e1\n"
    assert evaluate(src) == 3


def test_let_polymorphism():
    assert show(evaluate("let id v = v\nmain = (id 1, id True)\n")) == "(1, True)"


def test_recursive_binding_is_monomorphic():
    prog = check_program(B.LIBRARY)
    assert canonical(prog.scheme("desugarSqr")) == B.GOLDEN_SCHEMES["desugarSqr"]


# -- evaluation


@pytest.mark.parametrize("solver", SOLVERS)
@pytest.mark.parametrize("main", sorted(B.COHERENT_MAINS))
def test_benchmark_mains(solver, main):
    assert evaluate(B.program(main), solver) == B.COHERENT_MAINS[main]


@pytest.mark.parametrize("alias", ["E1", "E1'"])
def test_annotated_instantiations_need_no_default(alias):
    assert evaluate(B.program(f"eval1 (x :: {alias})", default=False)) == 3


def test_missing_default_reports_the_three_constraints():
    with pytest.raises(AmbiguityError) as e:
        check_program(B.program("eval1 x", default=False))
    text = str(e.value)
    for c in ("Sum :<: a", "Const :<: a", "a :-: Const = Sum"):
        assert c in text


def test_defaulting_can_be_switched_off():
    with pytest.raises(AmbiguityError):
        check_program(B.program("eval1 x"), "chains", LangFlags(defaulting=False))


@pytest.mark.parametrize("main,expected", sorted(B.LEFTY_MAINS.items()))
def test_lefty_sees_the_encoding(main, expected):
    flags = LangFlags(expose=True)
    assert show(evaluate(B.program(main, extra=B.LEFTY), "chains", flags)) == expected


def test_exposed_pattern_failure():
    src = B.PRELUDE + "let out = \\(Inl v) -> v\nmain = out (Inr (Const 1) :: (Sum :+: Const) Int)\n"
    with pytest.raises(PatternFailure):
        evaluate(src, "chains", LangFlags(expose=True))


def test_projection_round_trip_in_the_language():
    src = B.PRELUDE + "main = prj (inj (Const 7) :: (Sum :+: Const) Int) :: Maybe (Const Int)\n"
    assert show(evaluate(src)) == "Just (Const 7)"
    src = B.PRELUDE + "main = prj (inj (Plus 1 2) :: (Sum :+: Const) Int) :: Maybe (Const Int)\n"
    assert show(evaluate(src)) == "Nothing"


# -- evidence on values


def test_inject_examples():
    c1 = VCon("Const", (1,))
    assert inject_value(L(Refl()), c1) == VInl(c1)
    v = VCon("A")
    assert inject_value(R(L(Refl())), v) == VInr(VInl(v))
    assert inject_value(Split(R(Refl()), L(Refl())), VInl(v)) == VInr(v)


def test_route_examples():
    x = VCon("B")
    assert route_branch(Onl(B_), VInl(x)) == (SELECTED, x)
    a, b = VCon("A"), VCon("B")
    w = Le(C, Onr(A))
    assert route_branch(w, VInl(VInl(a))) == (REMAINDER, VInl(a))
    assert route_branch(w, VInl(VInr(b))) == (SELECTED, b)
    assert route_branch(w, VInr(VCon("C"))) == (REMAINDER, VInr(VCon("C")))


GROUND = [t for t in all_trees(4, ("A", "B", "C"))]


def test_injection_lands_on_the_same_atom():
    checked = 0
    for g, f in itertools.product(GROUND, all_trees(3, ("A", "B", "C"))):
        sol = solve_chain(Leq(f, g))
        if not isinstance(sol, Holds):
            continue
        checked += 1
        for v in tagged_values(f):
            assert leaf_of(inject_value(sol.evidence, v), g) == leaf_of(v, f)
    assert checked > 100


def test_branch_totality_and_coverage():
    checked = 0
    for f, g in itertools.product(GROUND, all_trees(2, ("A", "B", "C"))):
        sol = solve_chain(MinusP(f, g, Var("out")))
        if not isinstance(sol, Holds):
            continue
        checked += 1
        for v in tagged_values(f):
            side, out = route_branch(sol.evidence, v)
            atom = leaf_of(v, f)
            if side == SELECTED:
                assert leaf_of(out, g) == atom
            else:
                assert leaf_of(out, sol.remainder) == atom
    assert checked > 100


def test_split_matches_brute_force():
    # injecting A :+: B into B :+: A component-wise
    sol = solve_chain(Leq(Coprod(A, B_), Coprod(B_, A)), ())
    if isinstance(sol, Holds):  # only under the generalized clauses
        raise AssertionError("plain chains should not split")
    w = Split(R(Refl()), L(Refl()))
    for v in tagged_values(Coprod(A, B_)):
        assert leaf_of(inject_value(w, v), Coprod(B_, A)) == leaf_of(v, Coprod(A, B_))


# -- functor maps

SELVES = {"Const": (False,), "Plus": (True, True), "Times": (True, True), "Square": (True,)}


def test_fmap_examples():
    h = fun(lambda n: n + 1)
    assert fmap_value(SELVES, h, VCon("Plus", (1, 2))) == VCon("Plus", (2, 3))
    assert fmap_value(SELVES, h, VCon("Const", (3,))) == VCon("Const", (3,))
    assert fmap_value(SELVES, h, VInl(VCon("Plus", (1, 2)))) == VInl(VCon("Plus", (2, 3)))


@given(st.lists(st.booleans(), max_size=3), st.sampled_from(sorted(SELVES)), st.integers(-3, 3))
def test_fmap_identity(path, con, n):
    v = VCon(con, (n,) * len(SELVES[con]))
    for left in path:
        v = VInl(v) if left else VInr(v)
    assert fmap_value(SELVES, fun(lambda x: x), v) == v


# -- whole programs over enumerated terms


E1_TERMS = terms(3, ("Const", "Plus"))


@pytest.mark.parametrize("order", ["evalConst ? evalSum", "evalSum ? evalConst"])
def test_order_of_cases_is_irrelevant(order):
    for t in E1_TERMS[:40]:
        src = B.program(f"cases ({order}) (({term_source(t)}) :: E1)")
        assert evaluate(src) == direct_eval(t)


SQUARE_TERMS = terms(3, ("Const", "Times", "Square"))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(SQUARE_TERMS))
def test_desugar_removes_square(t):
    src = B.program(f"desugarSqr ({term_source(t)} :: Fix (Square :+: (Product :+: Const)))")
    out = evaluate(src)
    assert "Square" not in constructors_in(out)
    assert evaluate(B.program(f"eval2 (desugarSqr ({term_source(t)}))")) == direct_eval(t)


def test_show_literals():
    assert show(VPair(3, False)) == "(3, False)"
    assert show(VIn(VInr(VCon("Const", (1,))))) == "In (Inr (Const 1))"
    assert strip_tags(VIn(VInl(VCon("Const", (-1,))))) == VCon("Const", (-1,))
