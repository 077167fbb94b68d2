"""Qualified-type inference for the surface language.

Inference is Hindley-Milner over a single triangular substitution, with
predicates collected at uses of the overloaded primitives.  At each
top-level binding the collected predicates are reduced: those the solver
proves are discharged (a proven subtraction also fixes its result), those
it refutes are type errors, and stuck ones are kept in the binding's
scheme.  Two kept subtractions with the same inputs must agree on their
result.

Bindings are generalized over every variable they mention; a recursive
binding is monomorphic in its own body.  An ambiguous scheme is rejected,
except at ``main``, where default declarations may resolve it.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Optional

from ..chains import ChainSolver, SolverFlags
from ..defaulting import AmbiguityError, ConflictError, DefaultingError, apply_defaults, find_ambiguous, validate
from ..families import FamilySolver
from ..types import (
    BOOL,
    INT,
    AppT,
    Atom,
    Coprod,
    Fails,
    FixT,
    FunctorP,
    FunT,
    Holds,
    Kind,
    KindError,
    Leq,
    MaybeT,
    MinusP,
    PairT,
    Scheme,
    Var,
    apply_subst,
    check_kinds,
    children,
    free_vars,
    pred_args,
    rebuild,
    render,
    render_pred,
    subst_pred,
)
from ..unify import UnifyError, resolve, unify_into
from .syntax import (
    EXPOSED,
    Ann,
    App,
    DataDecl,
    DefaultD,
    Lam,
    Let,
    LetD,
    Lit,
    MainD,
    Name,
    PCon,
    Pair,
    PVar,
    PWild,
    TypeAlias,
    kinded,
    parse_program,
)


class TypeCheckError(TypeError):
    def __init__(self, msg: str, pos=None, trace: tuple = ()):
        where = f"{pos[0]}:{pos[1]}: " if pos and pos[0] else ""
        super().__init__(where + msg)
        self.pos = pos
        self.trace = tuple(trace)


@dataclass(frozen=True)
class LangFlags:
    generalized: bool = False
    defaulting: bool = True
    expose: bool = False


def make_solver(name: str = "chains", generalized: bool = False, trace=None):
    flags = SolverFlags(generalized=generalized)
    if name == "chains":
        return ChainSolver(flags, trace)
    if name == "families":
        return FamilySolver(flags, trace)
    raise ValueError(f"unknown solver {name!r}")


@dataclass
class Binding:
    name: str
    expr: object
    ann: Optional[Scheme] = None
    pos: tuple = (0, 0)
    scheme: Optional[Scheme] = None
    mono: object = None
    checking: bool = False


@dataclass
class MainInfo:
    expr: object
    type: object
    preds: tuple
    theta: dict
    ambiguous: frozenset
    pos: tuple = (0, 0)


@dataclass
class CheckedProgram:
    datas: dict = field(default_factory=dict)  # functor -> DataDecl
    cons: dict = field(default_factory=dict)  # constructor -> DataDecl
    aliases: dict = field(default_factory=dict)
    defaults: list = field(default_factory=list)
    bindings: dict = field(default_factory=dict)
    main: Optional[MainInfo] = None
    subst: dict = field(default_factory=dict)
    solver: object = None
    flags: LangFlags = LangFlags()
    counter: object = field(default_factory=lambda: itertools.count(1))

    def scheme(self, name: str) -> Scheme:
        return self.bindings[name].scheme

    def signatures(self) -> list:
        return [f"{name} : {canonical(b.scheme)}" for name, b in self.bindings.items()]


# ---------------------------------------------------------------------------
# Canonical printing


def _ordered_vars(t, out: list) -> None:
    if isinstance(t, Var):
        if t not in out:
            out.append(t)
        return
    for c in children(t):
        _ordered_vars(c, out)


def _blind(p) -> str:
    # rendering with every variable hidden, for a name-independent order
    return render_pred(subst_pred({v: Atom("_") for v in _pred_var_names(p)}, p))


def _pred_var_names(p) -> set:
    out: set = set()
    for a in pred_args(p):
        out |= free_vars(a)
    return out


def _names():
    for n in itertools.count():
        for c in "abcdefghijklmnopqrstuvwxyz":
            yield c if n == 0 else f"{c}{n}"


def canonical_renaming(body, preds, taken=()) -> dict:
    order: list = []
    if body is not None:
        _ordered_vars(body, order)
    for p in sorted(preds, key=_blind):
        for a in pred_args(p):
            _ordered_vars(a, order)
    names = (n for n in _names() if n not in taken)
    return {v.name: Var(next(names), v.kind) for v in order}


def canonical(s: Scheme) -> str:
    ren = canonical_renaming(s.body, s.preds)
    body = apply_subst(ren, s.body)
    preds = sorted(render_pred(subst_pred(ren, p)) for p in s.preds)
    head = ""
    if ren:
        head = "forall " + " ".join(v.name for v in ren.values()) + ". "
    ctx = f"({', '.join(preds)}) => " if preds else ""
    return head + ctx + render(body)


# ---------------------------------------------------------------------------
# Checker


class Checker:
    def __init__(self, solver="chains", flags: LangFlags = LangFlags()):
        self.flags = flags
        self.solver = make_solver(solver, flags.generalized) if isinstance(solver, str) else solver
        self.solver_name = solver if isinstance(solver, str) else getattr(solver, "name", "chains")
        self.prog = CheckedProgram(solver=self.solver, flags=flags)
        self.s = self.prog.subst
        self.wanted: list = []

    # -- helpers

    def fresh(self, kind: Kind = Kind.STAR) -> Var:
        return Var(f"%{next(self.prog.counter)}", kind)

    def zonk(self, t):
        return resolve(self.s, t)

    def zonk_pred(self, p):
        return type(p)(*(self.zonk(a) for a in pred_args(p)))

    def pretty(self, *ts) -> tuple:
        """Render types with inference variables named a, b, c ...

        Also returns a function applying the same naming to free text.
        """
        ts = [self.zonk(t) for t in ts]
        order: list = []
        for t in ts:
            _ordered_vars(t, order)
        taken = {v.name for v in order}
        names = (n for n in _names() if n not in taken)
        ren = {v.name: next(names) for v in order if v.name.startswith("%")}

        def text(msg: str) -> str:
            return re.sub(r"%\d+", lambda m: ren.setdefault(m.group(), next(names)), msg)

        kinds = {v.name: v.kind for v in order}
        return [render(apply_subst({k: Var(n, kinds[k]) for k, n in ren.items()}, t)) for t in ts], text

    def unify(self, a, b, pos, what: str = "") -> None:
        try:
            unify_into(self.s, a, b)
        except UnifyError as exc:
            (sa, sb), text = self.pretty(a, b)
            lead = f"{what}: " if what else ""
            raise TypeCheckError(text(f"{lead}cannot match {sa} with {sb} ({exc})"), pos) from None

    # -- declarations

    def check(self, decls: list) -> CheckedProgram:
        for d in decls:
            match d:
                case DataDecl():
                    self.data(d)
                case TypeAlias():
                    self.alias(d)
                case DefaultD():
                    self.default(d)
                case LetD():
                    self.binding(d)
                case MainD():
                    if self.prog.main is not None:
                        raise TypeCheckError("main is defined twice", d.pos)
                    self.main(d)
        return self.prog

    def data(self, d: DataDecl) -> None:
        if d.functor in self.prog.datas or d.functor in self.prog.aliases or d.functor in ("Int", "Bool", "Fix", "Maybe"):
            raise TypeCheckError(f"type {d.functor} is already defined", d.pos)
        if d.con in self.prog.cons or d.con in BUILTIN_CONS:
            raise TypeCheckError(f"constructor {d.con} is already defined", d.pos)
        self.prog.datas[d.functor] = d
        self.prog.cons[d.con] = d

    def alias(self, d: TypeAlias) -> None:
        if d.name in self.prog.datas or d.name in self.prog.aliases:
            raise TypeCheckError(f"type {d.name} is already defined", d.pos)
        t = self.resolve_type(d.type, d.pos)
        if free_vars(t):
            raise TypeCheckError(f"type synonym {d.name} must be closed", d.pos)
        self.prog.aliases[d.name] = t

    def default(self, d: DefaultD) -> None:
        # schematic: under families Minus (g :+: h) g is stuck on its first equation
        try:
            validate(d.decl, make_solver("chains", self.flags.generalized))
        except DefaultingError as exc:
            raise TypeCheckError(str(exc), d.pos) from None
        self.prog.defaults.append(d.decl)

    def resolve_type(self, t, pos, kind: Optional[Kind] = Kind.STAR, seen: Optional[dict] = None):
        """Expand synonyms, check names and kinds of an annotation."""

        def go(t):
            match t:
                case Atom(name):
                    if name in self.prog.aliases:
                        return self.prog.aliases[name]
                    if name in self.prog.datas:
                        return Atom(name, Kind.FUNCTOR)
                    raise TypeCheckError(f"unknown type {name}", pos)
            kids = children(t)
            if not kids:
                return t
            return rebuild(t, tuple(go(c) for c in kids))

        out = go(t)
        if kind is not None:
            try:
                out = kinded(out, kind, seen)
                check_kinds(out)
            except (KindError, SyntaxError) as exc:
                raise TypeCheckError(str(exc).split(": ", 1)[-1], pos) from None
        return out

    # -- bindings

    def binding(self, d: LetD) -> None:
        if d.name in self.prog.bindings:
            raise TypeCheckError(f"{d.name} is defined twice", d.pos)
        if d.name in BUILTINS:
            raise TypeCheckError(f"{d.name} is a primitive and cannot be redefined", d.pos)
        b = Binding(d.name, d.expr, pos=d.pos)
        if d.ann is not None:
            b.ann = self.resolve_scheme(d.ann, d.pos)
        self.prog.bindings[d.name] = b
        b.mono = self.fresh()
        b.checking = True
        self.wanted = []
        try:
            t = self.infer(d.expr, {})
            self.unify(b.mono, t, d.pos, d.name)
            if b.ann is not None:
                b.scheme = self.check_against(b, t)
            else:
                b.scheme = self.generalize(b, t)
        except Exception:
            del self.prog.bindings[d.name]
            raise
        finally:
            b.checking = False

    def resolve_scheme(self, s: Scheme, pos) -> Scheme:
        body = self.resolve_type(s.body, pos, None)
        preds = tuple(type(p)(*(self.resolve_type(a, pos, None) for a in pred_args(p))) for p in s.preds)
        try:
            for p in preds:
                for a in pred_args(p):
                    if check_kinds(a) is not Kind.FUNCTOR:
                        raise KindError(f"{render(a)} is not a functor")
            check_kinds(body)
        except KindError as exc:
            raise TypeCheckError(str(exc), pos) from None
        return Scheme(s.vars, preds, body)

    def check_against(self, b: Binding, t) -> Scheme:
        ann = b.ann
        rigid = frozenset(v.name for v in ann.vars)
        try:
            unify_into(self.s, t, ann.body, rigid=rigid)
        except UnifyError as exc:
            (shown,), text = self.pretty(t)
            msg = f"{b.name}: inferred type {shown} is less general than the signature {render(ann.body)} ({exc})"
            raise TypeCheckError(text(msg), b.pos) from None
        kept = self.reduce(self.wanted, givens=ann.preds, pos=b.pos)
        if kept:
            raise TypeCheckError(
                f"{b.name}: the signature does not entail {', '.join(render_pred(p) for p in kept)}", b.pos
            )
        return ann

    def generalize(self, b: Binding, t) -> Scheme:
        kept = self.reduce(self.wanted, pos=b.pos)
        body = self.zonk(t)
        order: list = []
        _ordered_vars(body, order)
        for p in kept:
            for a in pred_args(p):
                _ordered_vars(a, order)
        scheme = Scheme(tuple(order), tuple(kept), body)
        amb = find_ambiguous(scheme)
        if amb:
            raise self.ambiguity(amb, kept, f"in the type of {b.name}", pos=b.pos)
        return scheme

    def ambiguity(self, amb, preds, detail: str, pos=None) -> AmbiguityError:
        ren = canonical_renaming(None, preds)
        names = sorted(ren[v].name for v in amb if v in ren)
        shown = sorted((subst_pred(ren, p) for p in preds if _pred_var_names(p) & set(amb)), key=render_pred)
        err = AmbiguityError(names, shown, detail)
        err.pos = pos
        return err

    # -- context reduction

    def reduce(self, wanted: list, givens=(), pos=None) -> list:
        preds = list(wanted)
        while True:
            before = len(self.s)
            kept: list = []
            for p, where in preds:
                q = self.zonk_pred(p)
                sol = self.solver.solve(q, givens)
                if isinstance(sol, Holds):
                    if isinstance(q, MinusP) and sol.remainder is not None:
                        self.unify(q.out, sol.remainder, where, f"improving {render_pred(q)}")
                    continue
                if isinstance(sol, Fails):
                    raise self.unsatisfiable(q, givens, where)
                kept.append((q, where))
            # the subtraction's dependency: equal inputs, equal results
            seen: dict = {}
            for q, where in kept:
                if isinstance(q, MinusP):
                    key = (self.zonk(q.f), self.zonk(q.g))
                    if key in seen:
                        self.unify(seen[key], q.out, where, f"improving {render_pred(q)}")
                    else:
                        seen[key] = q.out
            preds = kept
            if len(self.s) == before:
                break
        out: list = []
        for q, _ in preds:
            q = self.zonk_pred(q)
            if q not in out:
                out.append(q)
        return out

    def unsatisfiable(self, q, givens, pos) -> TypeCheckError:
        lines: list = []
        solver = make_solver(self.solver_name, self.flags.generalized, trace=lambda e: lines.append(str(e)))
        solver.solve(q, givens)
        ren = canonical_renaming(None, [q])
        return TypeCheckError(f"unsatisfiable constraint {render_pred(subst_pred(ren, q))}", pos, lines)

    # -- main

    def main(self, d: MainD) -> None:
        self.wanted = []
        t = self.infer(d.expr, {})
        kept = self.reduce(self.wanted, pos=d.pos)
        body = self.zonk(t)
        order: list = []
        for p in kept:
            for a in pred_args(p):
                _ordered_vars(a, order)
        # main's result is observed, so every constrained variable must be fixed
        amb = find_ambiguous(Scheme(tuple(order), tuple(kept), INT))
        theta: dict = {}
        if amb:
            if not (self.flags.defaulting and self.prog.defaults):
                why = "defaulting is off" if not self.flags.defaulting else "no default declarations"
                raise self.ambiguity(amb, kept, why, pos=d.pos)
            try:
                theta = apply_defaults(kept, amb, self.prog.defaults, self.solver)
            except AmbiguityError as exc:
                raise self.ambiguity(amb, kept, exc.detail, pos=d.pos) from None
            except ConflictError as exc:
                raise self.ambiguity(amb, kept, str(exc), pos=d.pos) from None
            except DefaultingError as exc:
                raise TypeCheckError(str(exc), d.pos) from None
        self.prog.main = MainInfo(d.expr, apply_subst(theta, body), tuple(kept), theta, frozenset(amb), d.pos)

    # -- expressions

    def infer(self, e, env: dict):
        match e:
            case Lit(value):
                return BOOL if isinstance(value, bool) else INT
            case Name(name):
                return self.name(e, env)
            case App(fn, arg):
                tf = self.infer(fn, env)
                ta = self.infer(arg, env)
                r = self.fresh()
                self.unify(tf, FunT(ta, r), arg.pos if hasattr(arg, "pos") else e.pos, "in an application")
                return r
            case Lam(pats, body):
                local = dict(env)
                bound: dict = {}
                tys = [self.pattern(p, bound) for p in pats]
                local.update(bound)
                t = self.infer(body, local)
                for pt in reversed(tys):
                    t = FunT(pt, t)
                return t
            case Let(name, rhs, body):
                t1 = self.infer(rhs, env)
                return self.infer(body, {**env, name: t1})
            case Pair(a, b):
                return PairT(self.infer(a, env), self.infer(b, env))
            case Ann(expr, ty):
                t = self.infer(expr, env)
                want = self.resolve_type(ty, e.pos)
                # annotation variables are flexible: each stands for some type
                ren = {n: self.fresh(k) for n, k in _var_kinds(want).items()}
                self.unify(t, apply_subst(ren, want), e.pos, "annotation")
                return t
        raise TypeCheckError(f"cannot type {e!r}", getattr(e, "pos", None))

    def name(self, e: Name, env: dict):
        n = e.name
        if n in env:
            return env[n]
        b = self.prog.bindings.get(n)
        if b is not None:
            if b.checking:
                e.rec = True
                return b.mono
            inst = {v.name: self.fresh(v.kind) for v in b.scheme.vars}
            e.inst = inst
            for p in b.scheme.preds:
                self.wanted.append((subst_pred(inst, p), e.pos))
            return apply_subst(inst, b.scheme.body)
        if n in BUILTINS:
            if n in EXPOSED_EXPRS and not self.flags.expose:
                raise TypeCheckError(f"{n} is abstract; pass --expose-constructors to use it", e.pos)
            t, pred = BUILTINS[n](self)
            e.ty, e.pred = t, pred
            if pred is not None:
                self.wanted.append((pred, e.pos))
            return t
        d = self.prog.cons.get(n)
        if d is not None:
            x = self.fresh()
            t = AppT(Atom(d.functor), x)
            for f in reversed(d.fields):
                t = FunT(self.field_type(f, x), t)
            return t
        raise TypeCheckError(f"unbound name {n}", e.pos)

    @staticmethod
    def field_type(f: str, self_type):
        return {"self": self_type, "Int": INT, "Bool": BOOL}[f]

    def pattern(self, p, bound: dict):
        match p:
            case PVar(name):
                if name in bound:
                    raise TypeCheckError(f"{name} is bound twice in one pattern", p.pos)
                t = bound[name] = self.fresh()
                return t
            case PWild():
                return self.fresh()
            case PCon(con, args) if con in EXPOSED:
                if not self.flags.expose:
                    raise TypeCheckError(f"pattern {con} needs --expose-constructors", p.pos)
                if len(args) != 1:
                    raise TypeCheckError(f"{con} takes one argument", p.pos)
                inner = self.pattern(args[0], bound)
                f, g, x = self.fresh(Kind.FUNCTOR), self.fresh(Kind.FUNCTOR), self.fresh()
                if con == "In":
                    self.unify(inner, AppT(f, FixT(f)), p.pos, "pattern In")
                    return FixT(f)
                self.unify(inner, AppT(f if con == "Inl" else g, x), p.pos, f"pattern {con}")
                return AppT(Coprod(f, g), x)
            case PCon("Just", args):
                if len(args) != 1:
                    raise TypeCheckError("Just takes one argument", p.pos)
                return MaybeT(self.pattern(args[0], bound))
            case PCon("Nothing", args):
                if args:
                    raise TypeCheckError("Nothing takes no arguments", p.pos)
                return MaybeT(self.fresh())
            case PCon(con, args):
                d = self.prog.cons.get(con)
                if d is None:
                    raise TypeCheckError(f"unknown constructor {con}", p.pos)
                if len(args) != len(d.fields):
                    raise TypeCheckError(f"{con} takes {len(d.fields)} arguments, pattern has {len(args)}", p.pos)
                x = self.fresh()
                for a, f in zip(args, d.fields):
                    self.unify(self.pattern(a, bound), self.field_type(f, x), p.pos, f"pattern {con}")
                return AppT(Atom(d.functor), x)
        raise TypeCheckError(f"bad pattern {p!r}", getattr(p, "pos", None))


def _var_kinds(t) -> dict:
    order: list = []
    _ordered_vars(t, order)
    return {v.name: v.kind for v in order}


# ---------------------------------------------------------------------------
# Primitive types


def _F(c: Checker) -> Var:
    return c.fresh(Kind.FUNCTOR)


def _S(c: Checker) -> Var:
    return c.fresh()


def _fn(*ts):
    out = ts[-1]
    for t in reversed(ts[:-1]):
        out = FunT(t, out)
    return out


def _inj(c):
    f, g, e = _F(c), _F(c), _S(c)
    return _fn(AppT(f, e), AppT(g, e)), Leq(f, g)


def _inj_fix(c):
    f, g = _F(c), _F(c)
    return _fn(AppT(f, FixT(g)), FixT(g)), Leq(f, g)


def _fix_in(c):
    f = _F(c)
    return _fn(AppT(f, FixT(f)), FixT(f)), None


def _branch(c):
    f, g, h, e, a = _F(c), _F(c), _F(c), _S(c), _S(c)
    return _fn(_fn(AppT(g, e), a), _fn(AppT(h, e), a), AppT(f, e), a), MinusP(f, g, h)


def _raw_branch(c):
    f, g, e, a = _F(c), _F(c), _S(c), _S(c)
    return _fn(_fn(AppT(f, e), a), _fn(AppT(g, e), a), AppT(Coprod(f, g), e), a), None


def _cases(c):
    f, a = _F(c), _S(c)
    fix = FixT(f)
    return _fn(_fn(AppT(f, fix), _fn(fix, a), a), fix, a), None


def _prj(c):
    f, g, h, e = _F(c), _F(c), _F(c), _S(c)
    return _fn(AppT(g, e), MaybeT(AppT(f, e))), MinusP(g, f, h)


def _fmap(c):
    f, a, b = _F(c), _S(c), _S(c)
    return _fn(_fn(a, b), AppT(f, a), AppT(f, b)), FunctorP(f)


def _tag(left: bool):
    def prim(c):
        f, g, e = _F(c), _F(c), _S(c)
        return _fn(AppT(f if left else g, e), AppT(Coprod(f, g), e)), None

    return prim


def _const(c):
    a, b = _S(c), _S(c)
    return _fn(a, b, a), None


def _just(c):
    a = _S(c)
    return _fn(a, MaybeT(a)), None


def _nothing(c):
    return MaybeT(_S(c)), None


def _arith(c):
    return _fn(INT, INT, INT), None


def _proj(first: bool):
    def prim(c):
        a, b = _S(c), _S(c)
        return _fn(PairT(a, b), a if first else b), None

    return prim


BUILTINS = {
    "inj": _inj,
    "inj'": _inj_fix,
    "In": _fix_in,
    "?": _branch,
    ".?.": _raw_branch,
    "cases": _cases,
    "prj": _prj,
    "fmap": _fmap,
    "Inl": _tag(True),
    "Inr": _tag(False),
    "const": _const,
    "Just": _just,
    "Nothing": _nothing,
    "+": _arith,
    "*": _arith,
    "fst": _proj(True),
    "snd": _proj(False),
}
BUILTIN_CONS = {"In", "Inl", "Inr", "Just", "Nothing", "True", "False"}
EXPOSED_EXPRS = {"Inl", "Inr"}


# ---------------------------------------------------------------------------
# Entry points


def check_program(source, solver="chains", flags: LangFlags = LangFlags()) -> CheckedProgram:
    decls = parse_program(source) if isinstance(source, str) else source
    return Checker(solver, flags).check(decls)


def infer(program: CheckedProgram, expr) -> Scheme:
    """Scheme of an expression in the environment of a checked program."""
    c = Checker(program.solver, program.flags)
    c.prog, c.s = program, program.subst
    b = LetD("it", None, expr)
    c.binding(b)
    return program.bindings.pop("it").scheme


__all__ = [
    "BUILTINS",
    "Binding",
    "CheckedProgram",
    "Checker",
    "LangFlags",
    "MainInfo",
    "TypeCheckError",
    "canonical",
    "canonical_renaming",
    "check_program",
    "infer",
    "make_solver",
]
