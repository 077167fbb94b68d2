"""Instance-chain entailment for membership, injection and subtraction.

A chain is an ordered list of clauses.  For a goal, each clause head (renamed
apart) is compared with the goal:

* head and goal do not unify: the clause is skipped;
* they unify but the head does not match the goal: the goal is stuck, since
  a later instantiation could make this clause apply;
* the head matches: hypotheses are solved left to right.  A failed
  hypothesis skips the clause; otherwise a stuck one makes the goal stuck;
  if all hold, the clause is selected.

Selecting an asserting clause proves the goal, selecting a denying clause
refutes it, and running off the end of the chain refutes it as well.
Negation is closed-world: a whole program is checked at once.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .types import (
    Coprod,
    Dist,
    Fails,
    FamApp,
    FunctorP,
    Holds,
    In,
    L,
    Le,
    Leq,
    MinusP,
    NotIn,
    Onl,
    Onr,
    Pred,
    R,
    Refl,
    Ri,
    Solution,
    Split,
    Stuck,
    Var,
    Atom,
    apply_subst,
    children,
    free_vars,
    out_of,
    pred_args,
    render,
    render_pred,
    subst_pred,
)
from .unify import compile_builder, compile_matcher, mgu_pairs


class DepthExceeded(RuntimeError):
    pass


class ImprovementConflict(TypeError):
    """A subtraction's computed remainder disagrees with its stated result."""


@dataclass(frozen=True)
class SolverFlags:
    generalized: bool = False
    depth_limit: int = 10000

    def __post_init__(self):
        if self.depth_limit < 1:
            raise ValueError("depth_limit must be positive")


@dataclass(frozen=True)
class TraceEvent:
    clause: str
    goal: Pred
    outcome: str  # matched | apart | stuck | hyp-failed | given | exhausted

    def __str__(self) -> str:
        goal = render(self.goal) if isinstance(self.goal, FamApp) else render_pred(self.goal)
        return f"try {self.clause}: {self.outcome}  [{goal}]"


@dataclass(frozen=True)
class Clause:
    id: str
    head: Pred
    hyps: tuple = ()
    asserts: bool = True
    build: Optional[Callable] = None  # (subst over x#, y#..., evidence list) -> witness
    generalized: bool = False


_x, _y, _z = Var("x"), Var("y"), Var("z")
_k1, _k2 = Var("k1"), Var("k2")

IN_CHAIN = (
    Clause("in.1", In(_x, _x)),
    Clause("in.2", In(_x, Coprod(_y, _z)), (In(_x, _y),)),
    Clause("in.3", In(_x, Coprod(_y, _z)), (In(_x, _z),)),
    Clause("in.4", In(_x, _y), asserts=False),
)

INJ_CHAIN = (
    Clause("inj.1", Leq(_x, _x), build=lambda s, ev: Refl()),
    Clause("inj.2", Leq(_x, Coprod(_y, _z)), (Leq(_x, _y), NotIn(_x, _z)), build=lambda s, ev: L(ev[0])),
    Clause("inj.3", Leq(_x, Coprod(_y, _z)), (Leq(_x, _z), NotIn(_x, _y)), build=lambda s, ev: R(ev[0])),
    Clause(
        "inj.gen",
        Leq(Coprod(_x, _y), _z),
        (Leq(_x, _z), Leq(_y, _z)),
        build=lambda s, ev: Split(ev[0], ev[1]),
        generalized=True,
    ),
    Clause("inj.4", Leq(_x, _y), asserts=False),
)

MINUS_CHAIN = (
    Clause("minus.1", MinusP(Coprod(_x, _y), _x, _k1), build=lambda s, ev: Onl(s["y#"])),
    Clause("minus.2", MinusP(Coprod(_x, _y), _y, _k1), build=lambda s, ev: Onr(s["x#"])),
    Clause(
        "minus.gen",
        MinusP(_x, Coprod(_y, _z), _k2),
        (MinusP(_x, _y, _k1), MinusP(_k1, _z, _k2)),
        build=lambda s, ev: Dist(ev[0], ev[1]),
        generalized=True,
    ),
    Clause(
        "minus.3",
        MinusP(Coprod(_x, _y), _z, _k2),
        (NotIn(_z, _y), MinusP(_x, _z, _k1)),
        build=lambda s, ev: Le(s["y#"], ev[1]),
    ),
    Clause(
        "minus.4",
        MinusP(Coprod(_x, _y), _z, _k2),
        (NotIn(_z, _x), MinusP(_y, _z, _k1)),
        build=lambda s, ev: Ri(s["x#"], ev[1]),
    ),
)

def _clause_vars(clause: Clause) -> dict:
    kinds: dict = {}
    for p in (clause.head, *clause.hyps):
        for a in pred_args(p):
            _collect_kinds(a, kinds)
    return kinds


def _collect_kinds(t, out: dict) -> None:
    if isinstance(t, Var):
        out[t.name] = t.kind
    for c in children(t):
        _collect_kinds(c, out)


def _prepare(table: tuple) -> tuple:
    """Rename clause variables into a namespace user variables cannot reach."""
    out = []
    for clause in table:
        s = {v: Var(f"{v}#", k) for v, k in _clause_vars(clause).items()}
        out.append(
            Clause(
                clause.id,
                subst_pred(s, clause.head),
                tuple(subst_pred(s, h) for h in clause.hyps),
                clause.asserts,
                clause.build,
                clause.generalized,
            )
        )
    return tuple(out)


_PREPARED = {id(t): _prepare(t) for t in (IN_CHAIN, INJ_CHAIN, MINUS_CHAIN)}
_VARS = {c.id: tuple(_clause_vars(c).items()) for t in _PREPARED.values() for c in t}


def _selection_args(p: Pred) -> tuple:
    # the subtraction result is functionally determined, never matched on
    if type(p) is MinusP:
        return (p.f, p.g)
    return pred_args(p)


_TABLES = {
    (kind, gen): tuple(c for c in _PREPARED[id(table)] if gen or not c.generalized)
    for kind, table in ((In, IN_CHAIN), (Leq, INJ_CHAIN), (MinusP, MINUS_CHAIN))
    for gen in (False, True)
}
_SELECT = {c.id: _selection_args(c.head) for t in _PREPARED.values() for c in t}
_MATCH = {cid: compile_matcher(sel) for cid, sel in _SELECT.items()}
_HYPS = {
    c.id: tuple((h, type(h), tuple(compile_builder(a) for a in pred_args(h))) for h in c.hyps)
    for t in _PREPARED.values()
    for c in t
}


class ChainSolver:
    """Solves predicates by walking the fixed instance chains."""

    name = "chains"

    def __init__(self, flags: SolverFlags = SolverFlags(), trace: Optional[Callable] = None):
        self.flags = flags
        self.trace = trace
        self._memo: dict = {}

    def _emit(self, clause: str, goal: Pred, outcome: str) -> None:
        if self.trace is not None:
            self.trace(TraceEvent(clause, goal, outcome))

    def _table(self, goal: Pred) -> Iterable[Clause]:
        table = _TABLES.get((type(goal), self.flags.generalized))
        if table is None:
            raise TypeError(f"no chain for {goal!r}")
        return table

    def solve(self, goal: Pred, givens: Iterable[Pred] = ()) -> Solution:
        givens = frozenset(givens)
        try:
            return self._solve(goal, givens, 0)
        except RecursionError as exc:
            raise DepthExceeded(f"derivation too deep for {render_pred(goal)}") from exc

    def _solve(self, goal: Pred, givens: frozenset, depth: int) -> Solution:
        if depth > self.flags.depth_limit:
            raise DepthExceeded(f"depth limit {self.flags.depth_limit} exceeded at {render_pred(goal)}")
        cls = type(goal)
        if cls is NotIn:
            sol = self._solve(In(goal.f, goal.g), givens, depth + 1)
            if type(sol) is Holds:
                return Fails()
            if type(sol) is Fails:
                return Holds()
            return sol
        if cls is FunctorP:
            return _solve_functor(goal.f, givens)
        if givens:
            given = _from_givens(goal, givens)
            if given is not None:
                self._emit("given", goal, "given")
                return given
        memo_key = sol = None
        args = (goal.f, goal.g) if cls is MinusP else pred_args(goal)
        if not givens and self.trace is None and not any(map(free_vars, args)):
            # a subtraction's outcome never depends on its result position
            memo_key = (cls, args)
            sol = self._memo.get(memo_key)
        if sol is None:
            sol = self._walk_chain(goal, args, givens, depth)
            if memo_key is not None:
                self._memo[memo_key] = sol
        return _check_result(goal, sol)

    def _walk_chain(self, goal: Pred, args: tuple, givens: frozenset, depth: int) -> Solution:
        ground = not any(map(free_vars, args))
        for clause in self._table(goal):
            s = _MATCH[clause.id](args)
            if s is None:
                # against a ground goal, unifying and matching coincide
                if ground or mgu_pairs(zip(_SELECT[clause.id], args)) is None:
                    if self.trace is not None:
                        self._emit(clause.id, goal, "apart")
                    continue
                self._emit(clause.id, goal, "stuck")
                return Stuck(f"{render_pred(goal)} unifies with but does not match {clause.id}")
            for v, k in _VARS[clause.id]:
                if v not in s:
                    # fresh per depth: a walk never leaks its own variables
                    s[v] = Var(f"{v[:-1]}#{depth}", k)
            evidence = []
            stuck: Optional[Stuck] = None
            failed = False
            for hyp, cls, builders in _HYPS[clause.id]:
                inst = cls(*[b(s) for b in builders])
                sol = self._solve(inst, givens, depth + 1)
                if type(sol) is Fails:
                    failed = True
                    break
                if type(sol) is Stuck:
                    stuck = stuck or sol
                    evidence.append(None)
                    continue
                evidence.append(sol.evidence)
                if type(hyp) is MinusP and type(hyp.out) is Var and sol.remainder is not None:
                    s[hyp.out.name] = sol.remainder
            if failed:
                if self.trace is not None:
                    self._emit(clause.id, goal, "hyp-failed")
                continue
            if stuck is not None:
                self._emit(clause.id, goal, "stuck")
                return Stuck(stuck.reason)
            self._emit(clause.id, goal, "matched")
            if not clause.asserts:
                return Fails()
            w = clause.build(s, evidence) if clause.build else None
            if type(goal) is MinusP:
                return Holds(w, out_of(w))
            if type(goal) is In:
                return Holds()
            return Holds(w)
        self._emit("end", goal, "exhausted")
        return Fails()


def _check_result(goal: Pred, sol: Solution) -> Solution:
    # a subtraction whose stated result is ground and differs from the remainder is false
    if type(goal) is MinusP and type(sol) is Holds and sol.remainder is not None:
        if not free_vars(goal.out) and sol.remainder != goal.out:
            return Fails()
    return sol


def _from_givens(goal: Pred, givens: frozenset) -> Optional[Solution]:
    if not givens:
        return None
    match goal:
        case In(f, g):
            if goal in givens:
                return Holds()
            if NotIn(f, g) in givens:
                return Fails()
        case Leq():
            if goal in givens:
                return Holds()
        case MinusP(f, g, _):
            for p in givens:
                if isinstance(p, MinusP) and p.f == f and p.g == g:
                    return Holds(None, p.out)
    return None


def _solve_functor(f, givens) -> Solution:
    if FunctorP(f) in givens:
        return Holds()
    match f:
        case Atom():
            return Holds()
        case Coprod(a, b):
            left, right = _solve_functor(a, givens), _solve_functor(b, givens)
            if isinstance(left, Fails) or isinstance(right, Fails):
                return Fails()
            if isinstance(left, Stuck) or isinstance(right, Stuck):
                return Stuck(f"Functor {render(f)}")
            return Holds()
        case Var():
            return Stuck(f"Functor {render(f)} needs an instantiation")
    return Fails()


def solve_chain(p: Pred, givens: Iterable[Pred] = (), flags: SolverFlags = SolverFlags(), trace=None) -> Solution:
    return ChainSolver(flags, trace).solve(p, givens)


def improve(p: MinusP, s: Optional[dict] = None, solution: Optional[Solution] = None, solver=None) -> dict:
    """Extend ``s`` with what the subtraction's result position must be.

    Raises ImprovementConflict when the proven remainder differs from a
    ground (or already fixed) result.
    """
    s = dict(s or {})
    if solution is None:
        # solve with the result position open, then compare
        solution = (solver or solve_chain)(MinusP(p.f, p.g, Var("out#")))
    if not isinstance(solution, Holds) or solution.remainder is None:
        raise ValueError(f"cannot improve unproven {render_pred(p)}")
    r = solution.remainder
    out = apply_subst(s, p.out)
    if isinstance(out, Var):
        s[out.name] = r
    elif out != r:
        raise ImprovementConflict(f"{render_pred(p)}: remainder is {render(r)}, not {render(out)}")
    return s
