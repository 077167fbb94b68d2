"""Ambiguity detection and generalized defaulting.

A quantified variable is ambiguous when it occurs in a scheme's predicates
but is neither mentioned by the body nor determined from it through the
subtraction dependency ``f g -> out``.  A default declaration names a
predicate shape and a template: a predicate of that shape whose head is an
ambiguous variable, and whose other fields are ground, instantiates the
variable by the template.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .types import (
    Coprod,
    Holds,
    MinusP,
    Pred,
    Scheme,
    Stuck,
    Var,
    apply_subst,
    free_vars,
    pred_args,
    pred_vars,
    render,
    render_pred,
    subst_pred,
)
from .unify import match_pairs


class DefaultingError(TypeError):
    pass


class AmbiguityError(DefaultingError):
    def __init__(self, variables: Iterable[str], preds: Iterable[Pred], detail: str = ""):
        self.variables = tuple(sorted(variables))
        self.preds = tuple(preds)
        self.detail = detail
        msg = "ambiguous type variable" + ("s " if len(self.variables) > 1 else " ")
        msg += ", ".join(self.variables)
        if self.preds:
            msg += " with constraints " + ", ".join(render_pred(p) for p in self.preds)
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ConflictError(DefaultingError):
    pass


class ResidualError(DefaultingError):
    pass


@dataclass(frozen=True)
class DefaultDecl:
    pattern: Pred
    head: str
    template: object
    text: str = field(default="", compare=False)

    def __post_init__(self):
        names = pred_vars(self.pattern)
        if self.head not in names:
            raise DefaultingError(f"default head {self.head} does not occur in its pattern")
        if not free_vars(self.template) <= names:
            extra = ", ".join(sorted(free_vars(self.template) - names))
            raise DefaultingError(f"default template mentions {extra}, which the pattern does not bind")
        if self.head in free_vars(self.template):
            raise DefaultingError(f"default template mentions its own head {self.head}")

    @property
    def head_index(self) -> int:
        for i, a in enumerate(pred_args(self.pattern)):
            if a == Var(self.head):
                return i
        raise DefaultingError(f"default head {self.head} is not a whole field of its pattern")

    def __str__(self) -> str:
        return self.text or f"default ({render_pred(subst_pred({self.head: self.template}, self.pattern))})"


def subtraction_default(g: str = "g", h: str = "h", head: str = "f#") -> DefaultDecl:
    """``default ((g :+: h) :-: g = h)`` with the given variable names."""
    gv, hv = Var(g), Var(h)
    return DefaultDecl(MinusP(Var(head), gv, hv), head, Coprod(gv, hv))


SUBTRACTION_DEFAULT = subtraction_default()


def validate(decl: DefaultDecl, solver) -> None:
    """The template, put back into the pattern, must hold schematically."""
    decl.head_index
    goal = subst_pred({decl.head: decl.template}, decl.pattern)
    if isinstance(goal, MinusP):
        sol = solver.solve(MinusP(goal.f, goal.g, Var("out#")))
        if not isinstance(sol, Holds) or sol.remainder != goal.out:
            raise DefaultingError(f"{decl} is not sensible: {render_pred(goal)} does not hold")
        return
    if not isinstance(solver.solve(goal), Holds):
        raise DefaultingError(f"{decl} is not sensible: {render_pred(goal)} does not hold")


def find_ambiguous(s: Scheme, env_vars: Iterable[str] = ()) -> set[str]:
    quantified = {v.name for v in s.vars}
    known = set(free_vars(s.body)) | (set().union(*(pred_vars(p) for p in s.preds)) - quantified)
    known |= set(env_vars)
    changed = True
    while changed:
        changed = False
        for p in s.preds:
            if isinstance(p, MinusP) and (free_vars(p.f) | free_vars(p.g)) <= known:
                new = free_vars(p.out) - known
                if new:
                    known |= new
                    changed = True
    mentioned = set().union(*(pred_vars(p) for p in s.preds)) if s.preds else set()
    return (mentioned & quantified) - known


def _candidates(p: Pred, decl: DefaultDecl, s: dict, ambiguous: set) -> Optional[tuple]:
    if type(p) is not type(decl.pattern):
        return None
    args = [apply_subst(s, a) for a in pred_args(p)]
    i = decl.head_index
    head = args[i]
    if not isinstance(head, Var) or head.name not in ambiguous or head.name in s:
        return None
    pattern = pred_args(decl.pattern)
    pairs = [(pattern[j], a) for j, a in enumerate(args) if j != i]
    if any(free_vars(a) for _, a in pairs):
        return None  # partial matches never fire
    m = match_pairs(pairs)
    if m is None:
        return None
    return head.name, apply_subst(m, decl.template)


def apply_defaults(preds: Iterable[Pred], ambiguous: Iterable[str], decls: Iterable[DefaultDecl], solver) -> dict:
    """Instantiate every ambiguous variable from the declarations.

    Returns the substitution on the ambiguous variables.  Every predicate
    must hold afterwards; results of subtractions improve their out position.
    """
    preds = list(preds)
    ambiguous = set(ambiguous)
    decls = list(decls)
    s: dict = {}
    while True:
        found: dict = {}
        for p in preds:
            for d in decls:
                c = _candidates(p, d, s, ambiguous)
                if c is not None:
                    found.setdefault(c[0], {})[c[1]] = (p, d)
        if not found:
            break
        for v in sorted(found):
            options = found[v]
            if len(options) > 1:
                shown = "; ".join(f"{render(t)} from {d}" for t, (_, d) in sorted(options.items(), key=lambda kv: render(kv[0])))
                raise ConflictError(f"defaults disagree on {v}: {shown}")
            s[v] = next(iter(options))
        # an instantiation can ground the fields of another candidate
        s = {v: apply_subst(s, t) for v, t in s.items()}
    left = ambiguous - set(s)
    if left:
        blame = [p for p in preds if pred_vars(p) & left]
        why = "no default declaration applies" if decls else "no default declarations"
        raise AmbiguityError(left, blame, why)
    full = _resolve(preds, dict(s), solver)
    return {v: t for v, t in full.items() if v in ambiguous}


def _resolve(preds: list, s: dict, solver) -> dict:
    pending = list(preds)
    while pending:
        progress = False
        rest = []
        for p in pending:
            q = subst_pred(s, p)
            if isinstance(q, MinusP) and isinstance(q.out, Var) and not (free_vars(q.f) | free_vars(q.g)):
                sol = solver.solve(MinusP(q.f, q.g, Var("out#")))
                if isinstance(sol, Holds):
                    s[q.out.name] = sol.remainder
                    s = {v: apply_subst({q.out.name: sol.remainder}, t) for v, t in s.items()}
                    progress = True
                    continue
                raise ResidualError(f"after defaulting, {render_pred(q)} {'is stuck' if isinstance(sol, Stuck) else 'fails'}")
            if pred_vars(q):
                rest.append(p)
                continue
            sol = solver.solve(q)
            if not isinstance(sol, Holds):
                raise ResidualError(f"after defaulting, {render_pred(q)} {'is stuck' if isinstance(sol, Stuck) else 'fails'}")
            progress = True
        if not progress:
            q = subst_pred(s, rest[0])
            raise ResidualError(f"after defaulting, {render_pred(q)} is stuck")
        pending = rest
    return s


__all__ = [
    "AmbiguityError",
    "ConflictError",
    "DefaultDecl",
    "DefaultingError",
    "SUBTRACTION_DEFAULT",
    "ResidualError",
    "apply_defaults",
    "find_ambiguous",
    "subtraction_default",
    "validate",
]
