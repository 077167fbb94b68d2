"""First-order unification, one-way matching and rational-tree unifiability.

Substitutions built here are *triangular* while under construction (a
binding may mention other bound variables); ``resolve`` flattens them.  The
public ``mgu`` returns an idempotent substitution.
"""
from __future__ import annotations

from typing import Callable, Optional

from .types import (
    _CLASS_KIND,
    Atom,
    Con,
    FamApp,
    TypeExpr,
    Var,
    apply_subst,
    children,
    free_vars,
    kind_of,
    rebuild,
    render,
)


class UnifyError(Exception):
    """Raised with the offending terms; the message is rendered on demand."""

    def __init__(self, template: str, *terms, subst=None):
        super().__init__(template)
        self.template = template
        self.terms = terms
        self.subst = subst or {}

    def __str__(self) -> str:
        return self.template.format(*(render(resolve(self.subst, t)) for t in self.terms))


def walk(s: dict, t: TypeExpr) -> TypeExpr:
    while isinstance(t, Var) and t.name in s:
        t = s[t.name]
    return t


def resolve(s: dict, t: TypeExpr) -> TypeExpr:
    """Apply a triangular substitution all the way down."""
    t = walk(s, t)
    kids = children(t)
    if not kids:
        return t
    return rebuild(t, tuple(resolve(s, c) for c in kids))


def occurs(s: dict, name: str, t: TypeExpr) -> bool:
    t = walk(s, t)
    if isinstance(t, Var):
        return t.name == name
    return any(occurs(s, name, c) for c in children(t))


def _same_head(a: TypeExpr, b: TypeExpr) -> bool:
    cls = type(a)
    if cls is not type(b):
        return False
    if cls is Atom or cls is Var:
        return a.name == b.name and a.kind is b.kind
    if cls is Con:
        return a.name == b.name and len(a.args) == len(b.args)
    if cls is FamApp:
        return a.family == b.family and len(a.args) == len(b.args)
    return True


def _bind(s: dict, v: Var, t: TypeExpr, check_occurs: bool, rigid) -> None:
    if v.name in rigid:
        raise UnifyError(f"rigid type variable {v.name} cannot be instantiated to {{}}", t, subst=s)
    k = kind_of(t)
    if k is not None and k is not v.kind:
        raise UnifyError(f"kind mismatch: {v.name} :: {v.kind.value} against {{}} :: {k.value}", t)
    if check_occurs and free_vars(t) and occurs(s, v.name, t):
        raise UnifyError(f"occurs check: {v.name} ~ {{}}", t, subst=s)
    s[v.name] = t


def unify_into(s: dict, t1: TypeExpr, t2: TypeExpr, *, check_occurs: bool = True, rigid=frozenset()) -> None:
    """Extend the triangular substitution ``s`` (in place) to unify ``t1`` and ``t2``.

    Raises UnifyError on failure; ``s`` may then hold partial bindings.
    """
    seen: set = set()
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a, b = walk(s, a), walk(s, b)
        if a == b:
            continue
        if not check_occurs:
            # rational trees: a pair already assumed equal is coinductively fine
            key = (a, b)
            if key in seen:
                continue
            seen.add(key)
        if isinstance(a, Var) and a.name not in rigid:
            _bind(s, a, b, check_occurs, rigid)
        elif isinstance(b, Var) and b.name not in rigid:
            _bind(s, b, a, check_occurs, rigid)
        elif isinstance(a, Var) or isinstance(b, Var):
            v, other = (a, b) if isinstance(a, Var) else (b, a)
            _bind(s, v, other, check_occurs, rigid)
        elif _same_head(a, b):
            stack.extend(zip(children(a), children(b)))
        else:
            raise UnifyError("cannot unify {} with {}", a, b, subst=s)


def mgu(t1: TypeExpr, t2: TypeExpr) -> Optional[dict]:
    """Most general unifier over finite trees, or None."""
    s: dict = {}
    try:
        unify_into(s, t1, t2)
    except UnifyError:
        return None
    return {v: resolve(s, t) for v, t in s.items()}


def mgu_pairs(pairs) -> Optional[dict]:
    s: dict = {}
    try:
        for a, b in pairs:
            unify_into(s, a, b)
    except UnifyError:
        return None
    return {v: resolve(s, t) for v, t in s.items()}


def match_onto(pattern: TypeExpr, target: TypeExpr) -> Optional[dict]:
    """Substitution over pattern variables with ``pattern[s] == target``, or None.

    Target variables are treated as constants; pattern variables must be
    disjoint from them.
    """
    s: dict = {}
    if _match(s, pattern, target):
        return s
    return None


def match_pairs(pairs) -> Optional[dict]:
    s: dict = {}
    for p, t in pairs:
        if not _match(s, p, t):
            return None
    return s


def _match(s: dict, p: TypeExpr, t: TypeExpr) -> bool:
    if type(p) is Var:
        bound = s.get(p.name)
        if bound is not None:
            return bound == t
        k = kind_of(t)
        if k is not None and k is not p.kind:
            return False
        s[p.name] = t
        return True
    if not _same_head(p, t):
        return False
    if not free_vars(p):
        return p == t
    for a, b in zip(children(p), children(t)):
        if not _match(s, a, b):
            return False
    return True


def compile_matcher(patterns: tuple) -> Callable[[tuple], Optional[dict]]:
    """Specialise ``match_pairs`` to a fixed tuple of patterns.

    The returned function takes the target tuple and gives the matching
    substitution or None.  Relies on terms being hash-consed.
    """
    seen: set = set()

    def comp(p: TypeExpr):
        cls = type(p)
        if cls is Var:
            name, kind = p.name, p.kind
            if name in seen:
                return lambda t, s: s[name] is t
            seen.add(name)

            def bind(t, s):
                cls = type(t)
                k = t.kind if cls is Atom or cls is Var else _CLASS_KIND.get(cls)
                if k is not None and k is not kind:
                    return False
                s[name] = t
                return True

            return bind
        if not free_vars(p):
            return lambda t, s: t is p
        subs = [comp(c) for c in children(p)]
        n = len(subs)
        head = p

        def node(t, s):
            if not _same_head(head, t):
                return False
            kids = children(t)
            for i in range(n):
                if not subs[i](kids[i], s):
                    return False
            return True

        return node

    parts = [comp(p) for p in patterns]

    def run(targets: tuple) -> Optional[dict]:
        s: dict = {}
        for m, t in zip(parts, targets):
            if not m(t, s):
                return None
        return s

    return run


def compile_builder(template: TypeExpr) -> Callable[[dict], TypeExpr]:
    """Specialise ``apply_subst(s, template)`` to a fixed template."""
    if type(template) is Var:
        name = template.name
        return lambda s: s.get(name, template)
    if not free_vars(template):
        return lambda s: template
    subs = [compile_builder(c) for c in children(template)]
    return lambda s: rebuild(template, tuple([b(s) for b in subs]))


def unifiable_infinitary(t1: TypeExpr, t2: TypeExpr) -> bool:
    """Whether ``t1`` and ``t2`` unify once cyclic (regular-tree) solutions are allowed."""
    try:
        unify_into({}, t1, t2, check_occurs=False)
    except UnifyError:
        return False
    return True


def unifiable_infinitary_pairs(pairs) -> bool:
    s: dict = {}
    try:
        for a, b in pairs:
            unify_into(s, a, b, check_occurs=False)
    except UnifyError:
        return False
    return True


def apart(t1: TypeExpr, t2: TypeExpr) -> bool:
    return not unifiable_infinitary(t1, t2)


__all__ = [
    "UnifyError",
    "apart",
    "apply_subst",
    "compile_builder",
    "compile_matcher",
    "match_onto",
    "match_pairs",
    "mgu",
    "mgu_pairs",
    "resolve",
    "unifiable_infinitary",
    "unifiable_infinitary_pairs",
    "unify_into",
    "walk",
]
