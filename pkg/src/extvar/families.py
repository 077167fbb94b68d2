"""Closed type family rewriting for membership, injection and subtraction.

Each family is an ordered list of equations.  Arguments are rewritten
innermost-first; then the equations are scanned in order.  An equation whose
left-hand side matches fires.  One that does not match but is unifiable with
the goal over rational trees blocks every later equation, so the goal stays
unreduced.  Only equations apart from the goal are skipped.

Type-level results (``Yep``, ``Nope``, ``L (R Refl)``, ``Le C (Onr A)``)
are ``Con`` terms while rewriting and are converted to the shared witness
vocabulary on the way out.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .chains import SolverFlags, TraceEvent, _check_result, _solve_functor
from .types import (
    Con,
    Coprod,
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
    Stuck,
    TypeExpr,
    Var,
    children,
    free_vars,
    has_app,
    rebuild,
    render,
    render_pred,
)
from .unify import compile_builder, compile_matcher, unifiable_infinitary_pairs


class UnknownFamily(LookupError):
    pass


class Unsupported(ValueError):
    pass


YEP = Con("Yep")
NOPE = Con("Nope")


def _compile_rhs(t: TypeExpr) -> Callable:
    """Instantiate-and-normalise for a right-hand side.

    Pattern variables are bound to normal forms, so only the family
    applications the right-hand side itself introduces need rewriting; they
    are reduced as they are built, innermost first.
    """
    if type(t) is Var:
        name = t.name
        return lambda s, rw: s.get(name, t)
    if not free_vars(t) and not has_app(t):
        return lambda s, rw: t
    subs = [_compile_rhs(k) for k in children(t)]
    if type(t) is FamApp:
        fam = t.family
        return lambda s, rw: rw.reduce_app(FamApp(fam, tuple([b(s, rw) for b in subs])))
    return lambda s, rw: rebuild(t, tuple([b(s, rw) for b in subs]))


@dataclass(frozen=True)
class FamilyEquation:
    lhs: tuple
    rhs: TypeExpr

    def __post_init__(self):
        object.__setattr__(self, "match", compile_matcher(self.lhs))
        object.__setattr__(self, "build", compile_builder(self.rhs))
        object.__setattr__(self, "reduce", _compile_rhs(self.rhs))


@dataclass(frozen=True)
class Reduced:
    type: TypeExpr


@dataclass(frozen=True)
class StuckAt:
    app: FamApp


def _v(name: str) -> Var:
    # pattern variables live in their own namespace, apart from goal variables
    return Var("%" + name)


def _c(name: str, *args) -> Con:
    return Con(name, tuple(args))


def _app(fam: str, *args) -> FamApp:
    return FamApp(fam, tuple(args))


def _eqs(*rows) -> tuple:
    return tuple(FamilyEquation(tuple(lhs), rhs) for lhs, rhs in rows)


f, g, h = _v("f"), _v("g"), _v("h")
b, c = _v("b"), _v("c")
lp, rp, inl, inr = _v("lp"), _v("rp"), _v("inl"), _v("inr")
x, p = _v("x"), _v("p")

FAMILIES: dict[str, tuple] = {
    "IsIn": _eqs(
        ((f, f), YEP),
        ((f, Coprod(g, h)), _app("Or", _app("IsIn", f, g), _app("IsIn", f, h))),
        ((f, g), NOPE),
    ),
    "Or": _eqs(
        ((NOPE, NOPE), NOPE),
        ((b, c), YEP),
    ),
    "Into": _eqs(
        ((f, f), _c("Refl")),
        ((f, Coprod(g, h)), _app("Ifi", _app("Into", f, g), _app("IsIn", f, h), _app("Into", f, h), _app("IsIn", f, g))),
        ((f, g), NOPE),
    ),
    "Ifi": _eqs(
        ((NOPE, inr, NOPE, inl), NOPE),
        ((NOPE, inr, rp, NOPE), _c("R", rp)),
        ((lp, NOPE, rp, inl), _c("L", lp)),
        ((lp, inr, rp, inl), NOPE),
    ),
    "Minus": _eqs(
        ((f, f), NOPE),
        ((Coprod(f, g), f), _c("Onl", g)),
        ((Coprod(f, g), g), _c("Onr", f)),
        ((Coprod(f, g), h), _app("Ifm", g, _app("Minus", f, h), _app("IsIn", h, g), f, _app("Minus", g, h), _app("IsIn", h, f))),
        ((f, g), NOPE),
    ),
    "Ifm": _eqs(
        ((g, NOPE, inr, f, NOPE, inl), NOPE),
        ((g, NOPE, inr, f, rp, NOPE), _c("Ri", f, rp)),
        ((g, lp, NOPE, f, rp, inl), _c("Le", g, lp)),
        ((g, lp, inr, f, rp, inl), NOPE),
    ),
    "OutOf": _eqs(
        ((_c("Onl", x),), x),
        ((_c("Onr", x),), x),
        ((_c("Le", f, p),), Coprod(_app("OutOf", p), f)),
        ((_c("Ri", f, p),), Coprod(f, _app("OutOf", p))),
    ),
}

_fresh = itertools.count()


def _opaque(t: TypeExpr) -> TypeExpr:
    """Replace unreduced family applications by fresh variables (for apartness)."""
    if not has_app(t):
        return t
    if isinstance(t, FamApp):
        return Var(f"%app{next(_fresh)}")
    kids = children(t)
    if not kids:
        return t
    return rebuild(t, tuple(_opaque(k) for k in kids))


class Rewriter:
    def __init__(self, trace: Optional[Callable] = None):
        self.trace = trace
        self._memo: Optional[dict] = {} if trace is None else None

    def _emit(self, fam: str, index: int, app: FamApp, outcome: str) -> None:
        if self.trace is not None:
            self.trace(TraceEvent(f"{fam}.{index}", app, outcome))

    def normalize(self, t: TypeExpr) -> TypeExpr:
        """Rewrite to normal form; irreducible applications are left in place."""
        if not has_app(t):
            return t
        kids = children(t)
        new = tuple([self.normalize(k) for k in kids])
        out = t if new == kids else rebuild(t, new)
        return self.reduce_app(out) if type(out) is FamApp else out

    def reduce_app(self, app: FamApp) -> TypeExpr:
        """Normal form of an application whose arguments are already normal."""
        memo = self._memo
        if memo is not None:
            hit = memo.get(app)
            if hit is not None:
                return hit
        out = self._fire(app, normalizing=True)
        if out is None:
            out = app
        # ground applications always rewrite the same way
        if memo is not None and not free_vars(app):
            memo[app] = out
        return out

    def step(self, app: FamApp) -> Optional[TypeExpr]:
        """One rewrite of ``app`` at the root, or None when it is blocked."""
        return self._fire(app, normalizing=False)

    def _fire(self, app: FamApp, normalizing: bool) -> Optional[TypeExpr]:
        eqs = FAMILIES.get(app.family)
        if eqs is None:
            raise UnknownFamily(app.family)
        args = app.args
        trace = self.trace
        opaque = None
        for i, eq in enumerate(eqs, start=1):
            s = eq.match(args)
            if s is not None:
                if trace is not None:
                    self._emit(app.family, i, app, "matched")
                return eq.reduce(s, self) if normalizing else eq.build(s)
            if opaque is None:
                opaque = tuple([_opaque(a) for a in args])
                ground = not any(map(free_vars, opaque))
            # with nothing left to instantiate, not matching means apart
            if not ground and unifiable_infinitary_pairs(zip(eq.lhs, opaque)):
                if trace is not None:
                    self._emit(app.family, i, app, "stuck")
                return None
            if trace is not None:
                self._emit(app.family, i, app, "apart")
        return None


def _first_app(t: TypeExpr) -> Optional[FamApp]:
    for k in children(t):
        found = _first_app(k)
        if found is not None:
            return found
    return t if isinstance(t, FamApp) else None


def reduce(t: TypeExpr, trace: Optional[Callable] = None, rewriter: Optional[Rewriter] = None):
    """Reduced(normal form) or StuckAt(the innermost blocked application)."""
    nf = (rewriter or Rewriter(trace)).normalize(t)
    app = _first_app(nf) if has_app(nf) else None
    if app is not None:
        return StuckAt(app)
    return Reduced(nf)


def to_witness(t: TypeExpr):
    match t:
        case Con("Refl", ()):
            return Refl()
        case Con("L", (w,)):
            return L(to_witness(w))
        case Con("R", (w,)):
            return R(to_witness(w))
        case Con("Onl", (rest,)):
            return Onl(rest)
        case Con("Onr", (rest,)):
            return Onr(rest)
        case Con("Le", (sib, w)):
            return Le(sib, to_witness(w))
        case Con("Ri", (sib, w)):
            return Ri(sib, to_witness(w))
    raise ValueError(f"not a witness: {render(t)}")


class FamilySolver:
    """Solves predicates by rewriting the closed families."""

    name = "families"

    def __init__(self, flags: SolverFlags = SolverFlags(), trace: Optional[Callable] = None):
        if flags.generalized:
            raise Unsupported("the generalized clauses have no type family translation")
        self.flags = flags
        self.trace = trace
        self._rw = Rewriter(trace)

    def _reduce(self, t: TypeExpr):
        return reduce(t, rewriter=self._rw)

    def solve(self, goal: Pred, givens: Iterable[Pred] = ()) -> Solution:
        givens = frozenset(givens)
        match goal:
            case FunctorP(fn):
                return _solve_functor(fn, givens)
            case In(a, b2):
                return self._membership(a, b2, givens)
            case NotIn(a, b2):
                sol = self._membership(a, b2, givens)
                if isinstance(sol, Holds):
                    return Fails()
                if isinstance(sol, Fails):
                    return Holds()
                return sol
            case Leq(a, b2):
                if goal in givens:
                    return Holds()
                out = self._reduce(FamApp("Into", (a, b2)))
                if isinstance(out, StuckAt):
                    return Stuck(f"{render(out.app)} does not reduce")
                if out.type == NOPE:
                    return Fails()
                return Holds(to_witness(out.type))
            case MinusP(a, b2, _):
                for gv in givens:
                    if isinstance(gv, MinusP) and (gv.f, gv.g) == (a, b2):
                        return Holds(None, gv.out)
                out = self._reduce(FamApp("Minus", (a, b2)))
                if isinstance(out, StuckAt):
                    return Stuck(f"{render(out.app)} does not reduce")
                if out.type == NOPE:
                    return Fails()
                rem = self._reduce(FamApp("OutOf", (out.type,)))
                if isinstance(rem, StuckAt):
                    return Stuck(f"{render(rem.app)} does not reduce")
                return _check_result(goal, Holds(to_witness(out.type), rem.type))
        raise TypeError(f"unsupported goal {render_pred(goal)}")

    def _membership(self, a, b2, givens) -> Solution:
        if In(a, b2) in givens:
            return Holds()
        out = self._reduce(FamApp("IsIn", (a, b2)))
        if isinstance(out, StuckAt):
            return Stuck(f"{render(out.app)} does not reduce")
        return Holds() if out.type == YEP else Fails()


def solve_tf(p: Pred, givens: Iterable[Pred] = (), flags: SolverFlags = SolverFlags(), trace=None) -> Solution:
    return FamilySolver(flags, trace).solve(p, givens)
