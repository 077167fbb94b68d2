"""Kinded type expressions, predicates, substitutions and evidence.

Everything here is an immutable value.  Both solvers, the inference engine
and the evaluator share this vocabulary, so a witness produced by one solver
can be compared for equality with a witness produced by the other.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Union


class Kind(Enum):
    STAR = "*"
    FUNCTOR = "* -> *"

    __hash__ = object.__hash__


class KindError(TypeError):
    pass


# ---------------------------------------------------------------------------
# Type expressions
#
# Terms are hash-consed: building a term equal to an existing one returns the
# existing object, so equality and hashing are by identity.  The solvers'
# memo tables and the ground differential depend on this being cheap.

_TERMS: dict = {}


def _make(cls, args: tuple):
    obj = object.__new__(cls)
    for name, value in zip(cls._fields, args):
        object.__setattr__(obj, name, value)
    object.__setattr__(obj, "_fv", None)
    object.__setattr__(obj, "_app", None)
    _TERMS[(cls, *args)] = obj
    return obj


class _Term:
    __slots__ = ("_fv", "_app")
    _fields: tuple = ()
    _defaults: tuple = ()

    def __new__(cls, *args, **kwargs):
        if kwargs or len(args) != len(cls._fields):
            args = cls._complete(args, kwargs)
        obj = _TERMS.get((cls, *args))
        return obj if obj is not None else _make(cls, args)

    @classmethod
    def _complete(cls, args, kwargs):
        n = len(cls._fields)
        if len(args) > n:
            raise TypeError(f"{cls.__name__} takes {n} fields, got {len(args)}")
        values = list(args) + [None] * (n - len(args))
        filled = [True] * len(args) + [False] * (n - len(args))
        for k, v in kwargs.items():
            if k not in cls._fields:
                raise TypeError(f"{cls.__name__} has no field {k!r}")
            i = cls._fields.index(k)
            values[i], filled[i] = v, True
        first_default = n - len(cls._defaults)
        for i in range(n):
            if not filled[i]:
                if i < first_default:
                    raise TypeError(f"{cls.__name__} missing {cls._fields[i]!r}")
                values[i] = cls._defaults[i - first_default]
        return tuple(values)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __reduce__(self):
        return (type(self), tuple(getattr(self, f) for f in self._fields))

    def __repr__(self) -> str:
        inner = ", ".join(repr(getattr(self, f)) for f in self._fields)
        return f"{type(self).__name__}({inner})"

    def __str__(self) -> str:
        return render(self)


class Atom(_Term):
    __slots__ = ("name", "kind")
    _fields = __match_args__ = ("name", "kind")
    _defaults = (Kind.FUNCTOR,)


class Var(_Term):
    __slots__ = ("name", "kind")
    _fields = __match_args__ = ("name", "kind")
    _defaults = (Kind.FUNCTOR,)


class Coprod(_Term):
    __slots__ = ("left", "right")
    _fields = __match_args__ = ("left", "right")

    def __new__(cls, left, right):
        obj = _TERMS.get((cls, left, right))
        return obj if obj is not None else _make(cls, (left, right))


class FixT(_Term):
    __slots__ = ("functor",)
    _fields = __match_args__ = ("functor",)


class FunT(_Term):
    __slots__ = ("arg", "result")
    _fields = __match_args__ = ("arg", "result")


class IntT(_Term):
    __slots__ = ()


class BoolT(_Term):
    __slots__ = ()


class PairT(_Term):
    __slots__ = ("fst", "snd")
    _fields = __match_args__ = ("fst", "snd")


class MaybeT(_Term):
    __slots__ = ("item",)
    _fields = __match_args__ = ("item",)


class AppT(_Term):
    """A functor applied to its recursion argument, ``f e``."""

    __slots__ = ("functor", "arg")
    _fields = __match_args__ = ("functor", "arg")


class Con(_Term):
    """Type-level data constructor (``Yep``, ``L x``, ``Le g p`` ...).

    Only the family solver builds these, as intermediate rewrite results.
    """

    __slots__ = ("name", "args")
    _fields = __match_args__ = ("name", "args")
    _defaults = ((),)


class FamApp(_Term):
    __slots__ = ("family", "args")
    _fields = __match_args__ = ("family", "args")

    def __new__(cls, family, args):
        obj = _TERMS.get((cls, family, args))
        return obj if obj is not None else _make(cls, (family, args))


TypeExpr = Union[Atom, Var, Coprod, FixT, FunT, IntT, BoolT, PairT, MaybeT, AppT, Con, FamApp]

INT = IntT()
BOOL = BoolT()


def coprod(*parts: TypeExpr) -> TypeExpr:
    """Left-nested coproduct of ``parts``: ``coprod(A, B, C) == (A :+: B) :+: C``."""
    if not parts:
        raise ValueError("empty coproduct")
    out = parts[0]
    for p in parts[1:]:
        out = Coprod(out, p)
    return out


_CLASS_KIND = {Coprod: Kind.FUNCTOR, **{c: Kind.STAR for c in (FixT, FunT, IntT, BoolT, PairT, MaybeT, AppT)}}


def kind_of(t: TypeExpr) -> Optional[Kind]:
    """Kind of ``t``; None for forms whose kind the engine does not track."""
    cls = type(t)
    if cls is Atom or cls is Var:
        return t.kind
    return _CLASS_KIND.get(cls)


def check_kinds(t: TypeExpr) -> Kind:
    """Strict kind check used by the surface language."""
    match t:
        case Atom(_, k) | Var(_, k):
            return k
        case Coprod(l, r):
            for part in (l, r):
                if check_kinds(part) is not Kind.FUNCTOR:
                    raise KindError(f"coproduct component {render(part)} is not a functor")
            return Kind.FUNCTOR
        case FixT(f):
            if check_kinds(f) is not Kind.FUNCTOR:
                raise KindError(f"Fix applied to non-functor {render(f)}")
            return Kind.STAR
        case AppT(f, a):
            if check_kinds(f) is not Kind.FUNCTOR:
                raise KindError(f"{render(f)} applied as a functor")
            if check_kinds(a) is not Kind.STAR:
                raise KindError(f"functor argument {render(a)} is not ground")
            return Kind.STAR
        case FunT(a, b) | PairT(a, b):
            for part in (a, b):
                if check_kinds(part) is not Kind.STAR:
                    raise KindError(f"{render(part)} is a functor, expected a ground type")
            return Kind.STAR
        case MaybeT(a):
            if check_kinds(a) is not Kind.STAR:
                raise KindError(f"{render(a)} is a functor, expected a ground type")
            return Kind.STAR
        case IntT() | BoolT():
            return Kind.STAR
    raise KindError(f"cannot kind {t!r}")


_CHILDREN = {
    Coprod: lambda t: (t.left, t.right),
    FunT: lambda t: (t.arg, t.result),
    PairT: lambda t: (t.fst, t.snd),
    AppT: lambda t: (t.functor, t.arg),
    FixT: lambda t: (t.functor,),
    MaybeT: lambda t: (t.item,),
    Con: lambda t: tuple(t.args),
    FamApp: lambda t: tuple(t.args),
}


def _leaf(t) -> tuple:
    return ()


def children(t: TypeExpr) -> tuple:
    return _CHILDREN.get(type(t), _leaf)(t)


_REBUILD = {
    Coprod: lambda t, k: Coprod(*k),
    FunT: lambda t, k: FunT(*k),
    PairT: lambda t, k: PairT(*k),
    AppT: lambda t, k: AppT(*k),
    FixT: lambda t, k: FixT(*k),
    MaybeT: lambda t, k: MaybeT(*k),
    Con: lambda t, k: Con(t.name, tuple(k)),
    FamApp: lambda t, k: FamApp(t.family, tuple(k)),
}


def rebuild(t: TypeExpr, kids: tuple) -> TypeExpr:
    fn = _REBUILD.get(type(t))
    return t if fn is None else fn(t, kids)


# ---------------------------------------------------------------------------
# Rendering


def _atomic(t: TypeExpr) -> bool:
    match t:
        case Atom() | Var() | IntT() | BoolT() | PairT():
            return True
        case Con(_, args):
            return not args
    return False


def _arg(t: TypeExpr) -> str:
    s = render(t)
    return s if _atomic(t) else f"({s})"


def render(t: TypeExpr) -> str:
    match t:
        case Atom(name) | Var(name):
            return name
        case IntT():
            return "Int"
        case BoolT():
            return "Bool"
        case Coprod(l, r):
            ls = f"({render(l)})" if isinstance(l, (Coprod, FunT)) else render(l)
            rs = f"({render(r)})" if isinstance(r, (Coprod, FunT)) else render(r)
            return f"{ls} :+: {rs}"
        case FixT(f):
            return f"Fix {_arg(f)}"
        case MaybeT(a):
            return f"Maybe {_arg(a)}"
        case AppT(f, a):
            head = render(f) if isinstance(f, (Atom, Var, AppT)) else f"({render(f)})"
            return f"{head} {_arg(a)}"
        case FunT(a, b):
            left = f"({render(a)})" if isinstance(a, FunT) else render(a)
            return f"{left} -> {render(b)}"
        case PairT(a, b):
            return f"({render(a)}, {render(b)})"
        case Con(name, args) | FamApp(name, args):
            return " ".join([name, *(_arg(a) for a in args)])
    raise TypeError(f"not a type: {t!r}")


# ---------------------------------------------------------------------------
# Substitutions

Subst = Mapping[str, TypeExpr]


def has_app(t: TypeExpr) -> bool:
    """Whether a type family application occurs anywhere in ``t``."""
    out = t._app
    if out is None:
        out = type(t) is FamApp or any(map(has_app, children(t)))
        object.__setattr__(t, "_app", out)
    return out


def free_vars(t: TypeExpr) -> frozenset[str]:
    out = t._fv
    if out is None:
        if type(t) is Var:
            out = frozenset((t.name,))
        else:
            kids = children(t)
            out = frozenset().union(*map(free_vars, kids)) if kids else frozenset()
        object.__setattr__(t, "_fv", out)
    return out


def apply_subst(s: Subst, t: TypeExpr) -> TypeExpr:
    if not s or not free_vars(t):
        return t
    if isinstance(t, Var):
        if t.name not in s:
            return t
        new = s[t.name]
        k = kind_of(new)
        if k is not None and k is not t.kind:
            raise KindError(f"cannot substitute {render(new)} ({k.value}) for {t.name} ({t.kind.value})")
        return new
    return rebuild(t, tuple([apply_subst(s, c) for c in children(t)]))


def compose(s2: Subst, s1: Subst) -> dict[str, TypeExpr]:
    """Substitution equivalent to applying ``s1`` then ``s2``."""
    out = {v: apply_subst(s2, t) for v, t in s1.items()}
    for v, t in s2.items():
        out.setdefault(v, t)
    return out


# ---------------------------------------------------------------------------
# Predicates


@dataclass(frozen=True)
class In:
    f: TypeExpr
    g: TypeExpr


@dataclass(frozen=True)
class NotIn:
    f: TypeExpr
    g: TypeExpr


@dataclass(frozen=True)
class Leq:
    f: TypeExpr
    g: TypeExpr


@dataclass(frozen=True)
class MinusP:
    f: TypeExpr
    g: TypeExpr
    out: TypeExpr


@dataclass(frozen=True)
class FunctorP:
    f: TypeExpr


Pred = Union[In, NotIn, Leq, MinusP, FunctorP]


_PRED_ARGS = {
    In: lambda p: (p.f, p.g),
    NotIn: lambda p: (p.f, p.g),
    Leq: lambda p: (p.f, p.g),
    MinusP: lambda p: (p.f, p.g, p.out),
    FunctorP: lambda p: (p.f,),
}


def pred_args(p: Pred) -> tuple:
    fn = _PRED_ARGS.get(type(p))
    if fn is None:
        raise TypeError(p)
    return fn(p)


def map_pred(fn, p: Pred) -> Pred:
    return type(p)(*map(fn, pred_args(p)))


def subst_pred(s: Subst, p: Pred) -> Pred:
    return type(p)(*[apply_subst(s, a) for a in pred_args(p)])


def pred_vars(p: Pred) -> set[str]:
    out: set[str] = set()
    for a in pred_args(p):
        out |= free_vars(a)
    return out


def render_pred(p: Pred) -> str:
    match p:
        case In(f, g):
            return f"In {_arg(f)} {_arg(g)}"
        case NotIn(f, g):
            return f"In {_arg(f)} {_arg(g)} fails"
        case Leq(f, g):
            return f"{_side(f)} :<: {_side(g)}"
        case MinusP(f, g, h):
            return f"{_side(f)} :-: {_side(g)} = {_side(h)}"
        case FunctorP(f):
            return f"Functor {_arg(f)}"
    raise TypeError(p)


def _side(t: TypeExpr) -> str:
    return f"({render(t)})" if isinstance(t, Coprod) else render(t)


@dataclass(frozen=True)
class Scheme:
    vars: tuple  # of Var
    preds: tuple  # of Pred
    body: TypeExpr

    def __str__(self) -> str:
        head = ""
        if self.vars:
            head = "forall " + " ".join(v.name for v in self.vars) + ". "
        ctx = ""
        if self.preds:
            ctx = "(" + ", ".join(render_pred(p) for p in self.preds) + ") => "
        return head + ctx + render(self.body)


# ---------------------------------------------------------------------------
# Evidence


@dataclass(frozen=True)
class Refl:
    pass


@dataclass(frozen=True)
class L:
    inner: "InjWitness"


@dataclass(frozen=True)
class R:
    inner: "InjWitness"


@dataclass(frozen=True)
class Split:
    """Injection of a coproduct, one component at a time."""

    left_case: "InjWitness"
    right_case: "InjWitness"


InjWitness = Union[Refl, L, R, Split]


@dataclass(frozen=True)
class Onl:
    rest: TypeExpr


@dataclass(frozen=True)
class Onr:
    rest: TypeExpr


@dataclass(frozen=True)
class Le:
    sibling: TypeExpr
    inner: "MinusWitness"


@dataclass(frozen=True)
class Ri:
    sibling: TypeExpr
    inner: "MinusWitness"


@dataclass(frozen=True)
class Dist:
    """Subtraction of a coproduct: remove its left part, then its right part."""

    first: "MinusWitness"
    second: "MinusWitness"


MinusWitness = Union[Onl, Onr, Le, Ri, Dist]
Witness = Union[InjWitness, MinusWitness]


def render_witness(w: Witness) -> str:
    def arg(x) -> str:
        s = render_witness(x) if not _is_type(x) else render(x)
        plain = isinstance(x, Refl) or (_is_type(x) and _atomic(x))
        return s if plain else f"({s})"

    match w:
        case Refl():
            return "Refl"
        case L(i):
            return f"L {arg(i)}"
        case R(i):
            return f"R {arg(i)}"
        case Split(a, b):
            return f"Split {arg(a)} {arg(b)}"
        case Onl(t):
            return f"Onl {arg(t)}"
        case Onr(t):
            return f"Onr {arg(t)}"
        case Le(g, p):
            return f"Le {arg(g)} {arg(p)}"
        case Ri(f, p):
            return f"Ri {arg(f)} {arg(p)}"
        case Dist(a, b):
            return f"Dist {arg(a)} {arg(b)}"
    raise TypeError(w)


def _is_type(x) -> bool:
    return not isinstance(x, (Refl, L, R, Split, Onl, Onr, Le, Ri, Dist))


# ---------------------------------------------------------------------------
# Solver outcomes


@dataclass(frozen=True)
class Holds:
    evidence: Optional[Witness] = None
    remainder: Optional[TypeExpr] = None


@dataclass(frozen=True)
class Fails:
    pass


@dataclass(frozen=True)
class Stuck:
    reason: str = field(default="", compare=False)


Solution = Union[Holds, Fails, Stuck]


def render_solution(sol: Solution) -> str:
    match sol:
        case Holds(ev, rem):
            out = "holds"
            if ev is not None:
                out += " " + render_witness(ev)
            if rem is not None:
                out += "; remainder " + render(rem)
            return out
        case Fails():
            return "fails"
        case Stuck():
            return "stuck"
    raise TypeError(sol)


# ---------------------------------------------------------------------------
# Coproduct structure


def flatten(t: TypeExpr) -> list:
    """In-order leaves of a coproduct tree."""
    k = kind_of(t)
    if k is Kind.STAR:
        raise KindError(f"flatten expects a functor, got {render(t)}")
    if isinstance(t, Coprod):
        return flatten(t.left) + flatten(t.right)
    return [t]


def occurrences(f: TypeExpr, g: TypeExpr) -> int:
    """How many subtrees of ``g`` (``g`` included) are syntactically ``f``."""
    n = 1 if f == g else 0
    if isinstance(g, Coprod):
        n += occurrences(f, g.left) + occurrences(f, g.right)
    return n


def out_of(w: MinusWitness) -> TypeExpr:
    """The coproduct left over after the subtraction ``w`` witnesses."""
    match w:
        case Onl(rest) | Onr(rest):
            return rest
        case Le(g, p):
            return Coprod(out_of(p), g)
        case Ri(f, p):
            return Coprod(f, out_of(p))
        case Dist(_, second):
            return out_of(second)
    raise TypeError(f"not a subtraction witness: {w!r}")


def atoms(*names: str) -> tuple:
    return tuple(Atom(n) for n in names)


def is_ground(t: TypeExpr) -> bool:
    return not free_vars(t)


def preds_vars(preds: Iterable[Pred]) -> set[str]:
    out: set[str] = set()
    for p in preds:
        out |= pred_vars(p)
    return out
