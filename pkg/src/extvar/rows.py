"""Row-typed baseline for the benchmark programs.

Variants are typed with labelled rows and lacks predicates in the style of
Gaster and Jones.  Labels are constructor names, so the positional
structure of a coproduct is forgotten: ``Const :+: Sum`` and
``Sum :+: Const`` both denote the closed row ``(Const, Plus)``.

The language subset is the one the benchmark programs use.  The label an
injection adds is read from the constructor it is applied to, and the label
a branch ``m ? n`` removes is read from ``m``'s pattern.  A right operand
that itself takes a single constructor handles exactly that label, which
closes the row (as if it were written ``n ? noMatch``).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

from .lang.evaluate import match_pattern
from .lang.syntax import (
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
    parse_program,
)
from .lang.values import VCon, VIn, VJust, VNothing, VPair, apply, fmap_value, fun
from .types import AppT, Atom, BoolT, Coprod, FixT, FunT, IntT, MaybeT, PairT, Var


class RowTypeError(TypeError):
    def __init__(self, msg: str, pos=None):
        where = f"{pos[0]}:{pos[1]}: " if pos and pos[0] else ""
        super().__init__(where + msg)
        self.pos = pos


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class TV:
    name: str


@dataclass(frozen=True)
class TBase:
    name: str


@dataclass(frozen=True)
class TArrow:
    arg: object
    res: object


@dataclass(frozen=True)
class TPair:
    fst: object
    snd: object


@dataclass(frozen=True)
class TMaybe:
    item: object


@dataclass(frozen=True)
class LV:
    """A label not yet known."""

    name: str


@dataclass(frozen=True)
class TCon:
    """One constructor's payload at recursion argument ``arg``."""

    label: Union[str, LV]
    arg: object


@dataclass(frozen=True)
class Row:
    labels: frozenset
    tail: Optional[str] = None  # a row variable; None for a closed row


@dataclass(frozen=True)
class TSum:
    row: Row
    arg: object


@dataclass(frozen=True)
class TFix:
    row: Row


INT, BOOL = TBase("Int"), TBase("Bool")
EMPTY = Row(frozenset())


@dataclass(frozen=True)
class LacksPred:
    row: str
    label: str

    def __str__(self) -> str:
        return f"{self.row} \\ {self.label}"


@dataclass(frozen=True)
class RowScheme:
    tvars: tuple
    rvars: tuple
    lacks: tuple  # of LacksPred
    body: object

    def __str__(self) -> str:
        return render_scheme(self)


def _fn(*ts):
    out = ts[-1]
    for t in reversed(ts[:-1]):
        out = TArrow(t, out)
    return out


# ---------------------------------------------------------------------------
# Printing


def render_row(r: Row) -> str:
    inner = ", ".join(sorted(r.labels))
    if r.tail is not None:
        inner = f"{inner} | {r.tail}" if inner else r.tail
    return f"Σ({inner})"


def render(t) -> str:
    match t:
        case TV(n) | TBase(n):
            return n
        case TArrow(a, b):
            left = f"({render(a)})" if isinstance(a, TArrow) else render(a)
            return f"{left} -> {render(b)}"
        case TPair(a, b):
            return f"({render(a)}, {render(b)})"
        case TMaybe(a):
            return f"Maybe {_arg(a)}"
        case TCon(label, a):
            return f"{label.name if isinstance(label, LV) else label} {_arg(a)}"
        case TSum(row, a):
            return f"{render_row(row)} {_arg(a)}"
        case TFix(row):
            return f"Fix {render_row(row)}"
        case Row():
            return render_row(t)
    raise TypeError(t)


def _arg(t) -> str:
    return render(t) if isinstance(t, (TV, TBase, TPair)) else f"({render(t)})"


def render_scheme(s: RowScheme) -> str:
    names = [*s.tvars, *s.rvars]
    head = f"forall {' '.join(names)}. " if names else ""
    ctx = ""
    if s.lacks:
        ctx = "(" + ", ".join(sorted(map(str, s.lacks))) + ") => "
    return head + ctx + render(s.body)


# ---------------------------------------------------------------------------
# Checker


@dataclass
class RowBinding:
    name: str
    expr: object
    scheme: Optional[RowScheme] = None
    mono: object = None
    checking: bool = False


class RowChecker:
    def __init__(self):
        self.s: dict = {}
        self.lacks: dict = {}
        self.counter = itertools.count(1)
        self.cons: dict = {}
        self.aliases: dict = {}
        self.datas: dict = {}
        self.bindings: dict = {}
        self.labels: dict = {}  # id(node) -> label, for branches and projections
        self.deferred: list = []
        self.main = None
        self.main_type = None

    # -- variables

    def tv(self) -> TV:
        return TV(f"%t{next(self.counter)}")

    def rv(self, lacks=()) -> str:
        name = f"%r{next(self.counter)}"
        self.lacks[name] = set(lacks)
        return name

    def lv(self) -> LV:
        return LV(f"%l{next(self.counter)}")

    def walk(self, t):
        while isinstance(t, (TV, LV)) and t.name in self.s:
            t = self.s[t.name]
        return t

    def norm(self, r: Row) -> Row:
        labels, tail = set(r.labels), r.tail
        while tail is not None and tail in self.s:
            nxt = self.s[tail]
            labels |= nxt.labels
            tail = nxt.tail
        return Row(frozenset(labels), tail)

    def zonk(self, t):
        t = self.walk(t)
        match t:
            case TArrow(a, b):
                return TArrow(self.zonk(a), self.zonk(b))
            case TPair(a, b):
                return TPair(self.zonk(a), self.zonk(b))
            case TMaybe(a):
                return TMaybe(self.zonk(a))
            case TCon(label, a):
                return TCon(self.walk(label), self.zonk(a))
            case TSum(row, a):
                return TSum(self.norm(row), self.zonk(a))
            case TFix(row):
                return TFix(self.norm(row))
        return t

    # -- unification

    def occurs(self, name: str, t) -> bool:
        t = self.walk(t)
        match t:
            case TV(n):
                return n == name
            case TArrow(a, b) | TPair(a, b):
                return self.occurs(name, a) or self.occurs(name, b)
            case TMaybe(a) | TCon(_, a) | TSum(_, a):
                return self.occurs(name, a)
        return False

    def unify(self, a, b, pos) -> None:
        a, b = self.walk(a), self.walk(b)
        if a == b:
            return
        if isinstance(a, TV) or isinstance(b, TV):
            v, t = (a, b) if isinstance(a, TV) else (b, a)
            if self.occurs(v.name, t):
                raise RowTypeError(f"occurs check: {render(self.zonk(v))} ~ {render(self.zonk(t))}", pos)
            self.s[v.name] = t
            return
        match a, b:
            case TArrow(a1, a2), TArrow(b1, b2):
                self.unify(a1, b1, pos)
                self.unify(a2, b2, pos)
                return
            case TPair(a1, a2), TPair(b1, b2):
                self.unify(a1, b1, pos)
                self.unify(a2, b2, pos)
                return
            case TMaybe(a1), TMaybe(b1):
                self.unify(a1, b1, pos)
                return
            case TCon(l1, a1), TCon(l2, a2):
                self.unify_label(l1, l2, pos)
                self.unify(a1, a2, pos)
                return
            case TSum(r1, a1), TSum(r2, a2):
                self.unify_row(r1, r2, pos)
                self.unify(a1, a2, pos)
                return
            case TFix(r1), TFix(r2):
                self.unify_row(r1, r2, pos)
                return
        raise RowTypeError(f"cannot match {render(self.zonk(a))} with {render(self.zonk(b))}", pos)

    def unify_label(self, l1, l2, pos) -> None:
        l1, l2 = self.walk(l1), self.walk(l2)
        if l1 == l2:
            return
        if isinstance(l1, LV):
            self.s[l1.name] = l2
        elif isinstance(l2, LV):
            self.s[l2.name] = l1
        else:
            raise RowTypeError(f"label {l1} does not match {l2}", pos)

    def unify_row(self, r1: Row, r2: Row, pos) -> None:
        r1, r2 = self.norm(r1), self.norm(r2)
        only1, only2 = r1.labels - r2.labels, r2.labels - r1.labels
        if r1.tail == r2.tail:
            if only1 or only2:
                raise RowTypeError(f"rows {render_row(r1)} and {render_row(r2)} differ", pos)
            return
        if r1.tail is None or r2.tail is None:
            closed, open_, extra_open = (r1, r2, only2) if r1.tail is None else (r2, r1, only1)
            if extra_open:
                raise RowTypeError(
                    f"row {render_row(closed)} has no label {', '.join(sorted(extra_open))}", pos
                )
            # most general inserter: the open tail takes the missing labels
            self.bind_row(open_.tail, Row(closed.labels - open_.labels), pos)
            return
        rest = self.rv(self.lacks.get(r1.tail, set()) | self.lacks.get(r2.tail, set()))
        self.bind_row(r1.tail, Row(only2, rest), pos)
        self.bind_row(r2.tail, Row(only1, rest), pos)

    def bind_row(self, var: str, row: Row, pos) -> None:
        clash = self.lacks.get(var, set()) & row.labels
        if clash:
            raise RowTypeError(f"row lacks {', '.join(sorted(clash))} but would have to contain it", pos)
        if row.tail is not None:
            self.lacks.setdefault(row.tail, set()).update(self.lacks.get(var, set()))
        self.s[var] = row

    def extend(self, label: str, pos) -> Row:
        """``(label | r)`` with a fresh ``r`` that lacks ``label``."""
        return Row(frozenset({label}), self.rv({label}))

    # -- declarations

    def check(self, decls: list) -> None:
        for d in decls:
            match d:
                case DataDecl():
                    if d.functor in self.datas or d.con in self.cons:
                        raise RowTypeError(f"{d.functor} is already defined", d.pos)
                    self.datas[d.functor] = d
                    self.cons[d.con] = d
                case TypeAlias():
                    self.aliases[d.name] = d.type
                case DefaultD():
                    pass  # rows leave nothing ambiguous to default
                case LetD():
                    if d.ann is not None:
                        raise RowTypeError("signatures are not part of the row baseline", d.pos)
                    self.binding(d)
                case MainD():
                    self.deferred = []
                    t = self.infer(d.expr, {})
                    self.settle(d.pos)
                    self.main, self.main_type = d.expr, self.zonk(t)

    def binding(self, d: LetD) -> None:
        if d.name in self.bindings:
            raise RowTypeError(f"{d.name} is defined twice", d.pos)
        b = RowBinding(d.name, d.expr, mono=self.tv(), checking=True)
        self.bindings[d.name] = b
        self.deferred = []
        t = self.infer(d.expr, {})
        self.unify(b.mono, t, d.pos)
        self.settle(d.pos)
        b.checking = False
        b.scheme = self.generalize(self.zonk(t))

    def settle(self, pos) -> None:
        """Discharge projections whose label became known."""
        while self.deferred:
            ready = [(lab, row, at) for lab, row, at in self.deferred if not isinstance(self.walk(lab), LV)]
            if not ready:
                raise RowTypeError("the label a projection selects is not determined", self.deferred[0][2])
            self.deferred = [x for x in self.deferred if x not in ready]
            for lab, row, at in ready:
                label = self.walk(lab)
                self.unify_row(row, self.extend(label, at), at)

    def generalize(self, t) -> RowScheme:
        tvars: list = []
        rvars: list = []
        self._collect(t, tvars, rvars)
        ren = {}
        for i, n in enumerate(tvars):
            ren[n] = _name("abcdefghijklmnopq", i)
        for i, n in enumerate(rvars):
            ren[n] = _name("rstuvwxyz", i)
        lacks = tuple(LacksPred(ren[r], l) for r in rvars for l in sorted(self.lacks.get(r, ())))
        return RowScheme(tuple(ren[n] for n in tvars), tuple(ren[n] for n in rvars), lacks, _rename(t, ren))

    def _collect(self, t, tvars: list, rvars: list) -> None:
        match t:
            case TV(n):
                if n not in tvars:
                    tvars.append(n)
            case TArrow(a, b) | TPair(a, b):
                self._collect(a, tvars, rvars)
                self._collect(b, tvars, rvars)
            case TMaybe(a) | TCon(_, a):
                self._collect(a, tvars, rvars)
            case TSum(row, a):
                if row.tail is not None and row.tail not in rvars:
                    rvars.append(row.tail)
                self._collect(a, tvars, rvars)
            case TFix(row):
                if row.tail is not None and row.tail not in rvars:
                    rvars.append(row.tail)

    def instantiate(self, s: RowScheme):
        ren = {n: self.tv().name for n in s.tvars}
        for r in s.rvars:
            ren[r] = self.rv()
        for p in s.lacks:
            self.lacks[ren[p.row]].add(p.label)
        return _rename(s.body, ren)

    # -- annotations

    def ann_type(self, t, pos, fresh: dict):
        match t:
            case Atom(name) if name in self.aliases:
                return self.ann_type(self.aliases[name], pos, fresh)
            case IntT():
                return INT
            case BoolT():
                return BOOL
            case Var(name):
                if name not in fresh:
                    fresh[name] = self.tv()
                return fresh[name]
            case FunT(a, b):
                return TArrow(self.ann_type(a, pos, fresh), self.ann_type(b, pos, fresh))
            case PairT(a, b):
                return TPair(self.ann_type(a, pos, fresh), self.ann_type(b, pos, fresh))
            case MaybeT(a):
                return TMaybe(self.ann_type(a, pos, fresh))
            case FixT(f):
                return TFix(self.ann_row(f, pos))
            case AppT(Atom(name), a) if name in self.datas:
                return TCon(self.datas[name].con, self.ann_type(a, pos, fresh))
            case AppT(f, a):
                return TSum(self.ann_row(f, pos), self.ann_type(a, pos, fresh))
        raise RowTypeError(f"annotation {t} has no row reading", pos)

    def ann_row(self, f, pos) -> Row:
        labels: list = []

        def go(f):
            match f:
                case Coprod(a, b):
                    go(a)
                    go(b)
                case Atom(name) if name in self.datas:
                    labels.append(self.datas[name].con)
                case _:
                    raise RowTypeError(f"{f} is not a coproduct of declared functors", pos)

        go(f)
        if len(set(labels)) != len(labels):
            raise RowTypeError("a row may not repeat a label", pos)
        return Row(frozenset(labels))

    # -- expressions

    def infer(self, e, env: dict):
        match e:
            case Lit(v):
                return BOOL if isinstance(v, bool) else INT
            case App(App(Name("?") as op, m), n):
                return self.branch(op, m, n, env)
            case App(Name("inj'") as op, arg):
                t = self.infer(arg, env)
                label, x = self.payload(t, op)
                row = self.extend(label, op.pos)
                self.unify(x, TFix(row), op.pos)
                return TFix(row)
            case App(Name("inj") as op, arg):
                t = self.infer(arg, env)
                label, x = self.payload(t, op)
                return TSum(self.extend(label, op.pos), x)
            case Name(n):
                return self.name(e, env)
            case App(fn, arg):
                tf = self.infer(fn, env)
                ta = self.infer(arg, env)
                r = self.tv()
                self.unify(tf, TArrow(ta, r), getattr(arg, "pos", e.pos))
                return r
            case Lam(pats, body):
                local = dict(env)
                tys = [self.pattern(p, local) for p in pats]
                t = self.infer(body, local)
                for pt in reversed(tys):
                    t = TArrow(pt, t)
                return t
            case Let(name, rhs, body):
                return self.infer(body, {**env, name: self.infer(rhs, env)})
            case Pair(a, b):
                return TPair(self.infer(a, env), self.infer(b, env))
            case Ann(expr, ty):
                t = self.infer(expr, env)
                self.unify(t, self.ann_type(ty, e.pos, {}), e.pos)
                return t
        raise RowTypeError(f"not in the row baseline: {type(e).__name__}", getattr(e, "pos", None))

    def payload(self, t, node) -> tuple:
        t = self.walk(t)
        if isinstance(t, TCon) and not isinstance(self.walk(t.label), LV):
            return self.walk(t.label), t.arg
        raise RowTypeError(f"{node.name} needs a constructor application to read its label from", node.pos)

    def branch(self, op: Name, m, n, env):
        tm = self.zonk(self.infer(m, env))
        if not (isinstance(tm, TArrow) and isinstance(tm.arg, TCon) and not isinstance(tm.arg.label, LV)):
            raise RowTypeError("the left operand of ? must take a single constructor", op.pos)
        label, x, a = tm.arg.label, tm.arg.arg, tm.res
        self.labels[id(op)] = label
        tn = self.zonk(self.infer(n, env))
        if isinstance(tn, TArrow) and isinstance(tn.arg, TCon) and not isinstance(tn.arg.label, LV):
            other = tn.arg.label
            if other == label:
                raise RowTypeError(f"both branches handle {label}", op.pos)
            self.labels[id(n)] = ("close", other)
            self.unify(tn.arg.arg, x, op.pos)
            self.unify(tn.res, a, op.pos)
            rest = Row(frozenset({other}))
        else:
            rest = Row(frozenset(), self.rv({label}))
            self.unify(tn, TArrow(TSum(rest, x), a), op.pos)
            rest = self.norm(rest)
            if label in rest.labels:
                raise RowTypeError(f"the remainder already handles {label}", op.pos)
            if rest.tail is not None:
                self.lacks.setdefault(rest.tail, set()).add(label)
        return TArrow(TSum(Row(rest.labels | {label}, rest.tail), x), a)

    def name(self, e: Name, env: dict):
        n = e.name
        if n in env:
            return env[n]
        b = self.bindings.get(n)
        if b is not None:
            if b.checking:
                return b.mono
            return self.instantiate(b.scheme)
        d = self.cons.get(n)
        if d is not None:
            x = self.tv()
            t = TCon(d.con, x)
            for f in reversed(d.fields):
                t = TArrow({"self": x, "Int": INT, "Bool": BOOL}[f], t)
            return t
        prim = _PRIMS.get(n)
        if prim is None:
            if n in ("inj", "inj'", "?"):
                raise RowTypeError(f"{n} must be applied directly in the row baseline", e.pos)
            raise RowTypeError(f"{n} is not available in the row baseline", e.pos)
        return prim(self, e)

    def pattern(self, p, env: dict):
        match p:
            case PVar(name):
                t = env[name] = self.tv()
                return t
            case PWild():
                return self.tv()
            case PCon(con, args) if con in self.cons:
                d = self.cons[con]
                if len(args) != len(d.fields):
                    raise RowTypeError(f"{con} takes {len(d.fields)} arguments", p.pos)
                x = self.tv()
                for a, f in zip(args, d.fields):
                    self.unify(self.pattern(a, env), {"self": x, "Int": INT, "Bool": BOOL}[f], p.pos)
                return TCon(con, x)
        raise RowTypeError(f"pattern {getattr(p, 'con', p)} is not in the row baseline", getattr(p, "pos", None))


def _name(alphabet: str, i: int) -> str:
    k, j = divmod(i, len(alphabet))
    return alphabet[j] + (str(k) if k else "")


def _rename(t, ren: dict):
    match t:
        case TV(n):
            return TV(ren.get(n, n))
        case TArrow(a, b):
            return TArrow(_rename(a, ren), _rename(b, ren))
        case TPair(a, b):
            return TPair(_rename(a, ren), _rename(b, ren))
        case TMaybe(a):
            return TMaybe(_rename(a, ren))
        case TCon(label, a):
            return TCon(label, _rename(a, ren))
        case TSum(row, a):
            return TSum(Row(row.labels, ren.get(row.tail, row.tail)), _rename(a, ren))
        case TFix(row):
            return TFix(Row(row.labels, ren.get(row.tail, row.tail)))
    return t


def _p_in(c: RowChecker, e):
    r = Row(frozenset(), c.rv())
    return _fn(TSum(r, TFix(r)), TFix(r))


def _p_cases(c: RowChecker, e):
    r, a = Row(frozenset(), c.rv()), c.tv()
    fix = TFix(r)
    return _fn(_fn(TSum(r, fix), _fn(fix, a), a), fix, a)


def _p_fmap(c: RowChecker, e):
    r, a, b = Row(frozenset(), c.rv()), c.tv(), c.tv()
    return _fn(_fn(a, b), TSum(r, a), TSum(r, b))


def _p_prj(c: RowChecker, e):
    r, x, lab = Row(frozenset(), c.rv()), c.tv(), c.lv()
    c.deferred.append((lab, r, e.pos))
    c.labels[id(e)] = lab
    return _fn(TSum(r, x), TMaybe(TCon(lab, x)))


def _p_nomatch(c: RowChecker, e):
    return _fn(TSum(EMPTY, c.tv()), c.tv())


def _p_arith(c, e):
    return _fn(INT, INT, INT)


def _p_const(c, e):
    a, b = c.tv(), c.tv()
    return _fn(a, b, a)


def _p_just(c, e):
    a = c.tv()
    return _fn(a, TMaybe(a))


def _p_nothing(c, e):
    return TMaybe(c.tv())


def _p_proj(first: bool):
    def prim(c, e):
        a, b = c.tv(), c.tv()
        return _fn(TPair(a, b), a if first else b)

    return prim


_PRIMS = {
    "In": _p_in,
    "cases": _p_cases,
    "fmap": _p_fmap,
    "prj": _p_prj,
    "noMatch": _p_nomatch,
    "+": _p_arith,
    "*": _p_arith,
    "const": _p_const,
    "Just": _p_just,
    "Nothing": _p_nothing,
    "fst": _p_proj(True),
    "snd": _p_proj(False),
}


# ---------------------------------------------------------------------------
# Entry points


@dataclass
class RowProgram:
    checker: RowChecker

    @property
    def bindings(self) -> dict:
        return self.checker.bindings

    def scheme(self, name: str) -> RowScheme:
        return self.checker.bindings[name].scheme

    def signatures(self) -> list:
        return [f"{n} : {b.scheme}" for n, b in self.checker.bindings.items()]

    @property
    def main_type(self):
        return self.checker.main_type


def infer_row(source) -> RowProgram:
    decls = parse_program(source) if isinstance(source, str) else source
    c = RowChecker()
    c.check(decls)
    return RowProgram(c)


class RowEvaluator:
    """Label-directed evaluation: branching compares constructor names."""

    def __init__(self, program: RowProgram):
        self.c = program.checker
        self.values: dict = {}
        self.selves = {d.con: tuple(f == "self" for f in d.fields) for d in self.c.cons.values()}

    def global_(self, name: str):
        if name not in self.values:
            self.values[name] = None
            self.values[name] = self.eval(self.c.bindings[name].expr, {})
        v = self.values[name]
        if v is None:
            raise RuntimeError(f"{name} is defined in terms of itself")
        return v

    def main(self):
        if self.c.main is None:
            raise RuntimeError("the program has no main")
        return self.eval(self.c.main, {})

    def eval(self, e, env: dict):
        match e:
            case Lit(v):
                return v
            case App(App(Name("?") as op, m), n):
                label = self.c.labels[id(op)]
                mv, nv = self.eval(m, env), self.eval(n, env)
                return fun(lambda v: apply(mv if isinstance(v, VCon) and v.con == label else nv, v), "?")
            case App(Name("inj'"), arg):
                return VIn(self.eval(arg, env))
            case App(Name("inj"), arg):
                return self.eval(arg, env)
            case Name(n):
                if n in env:
                    return env[n]
                if n in self.c.bindings:
                    return self.global_(n)
                d = self.c.cons.get(n)
                if d is not None:
                    return _con_value(d.con, len(d.fields))
                return self.prim(e)
            case App(fn, arg):
                return apply(self.eval(fn, env), self.eval(arg, env))
            case Lam(pats, body):
                return self.closure(pats, body, env)
            case Let(name, rhs, body):
                return self.eval(body, {**env, name: self.eval(rhs, env)})
            case Pair(a, b):
                return VPair(self.eval(a, env), self.eval(b, env))
            case Ann(expr, _):
                return self.eval(expr, env)
        raise RuntimeError(f"cannot evaluate {e!r}")

    def closure(self, pats, body, env):
        def take(i, local):
            def step(v):
                inner = dict(local)
                match_pattern(pats[i], v, inner)
                return self.eval(body, inner) if i + 1 == len(pats) else take(i + 1, inner)

            return fun(step)

        return take(0, env)

    def prim(self, e: Name):
        match e.name:
            case "In":
                return fun(VIn, "In")
            case "cases":

                def cases(cs):
                    def unroll(v):
                        return apply(apply(cs, v.value), rec)

                    rec = fun(unroll, "cases")
                    return rec

                return fun(cases, "cases")
            case "fmap":
                return fun(lambda h: fun(lambda v: fmap_value(self.selves, h, v)), "fmap")
            case "prj":
                label = self.c.walk(self.c.labels[id(e)])
                return fun(lambda v: VJust(v) if v.con == label else VNothing(), "prj")
            case "noMatch":
                return fun(lambda v: (_ for _ in ()).throw(RuntimeError("noMatch reached")), "noMatch")
            case "+":
                return fun(lambda a: fun(lambda b: a + b), "+")
            case "*":
                return fun(lambda a: fun(lambda b: a * b), "*")
            case "const":
                return fun(lambda a: fun(lambda _: a), "const")
            case "Just":
                return fun(VJust, "Just")
            case "Nothing":
                return VNothing()
            case "fst":
                return fun(lambda p: p.fst, "fst")
            case "snd":
                return fun(lambda p: p.snd, "snd")
        raise RuntimeError(f"unbound name {e.name}")


def _con_value(name: str, arity: int):
    if arity == 0:
        return VCon(name)

    def collect(args):
        def step(v):
            out = args + (v,)
            return VCon(name, out) if len(out) == arity else fun(collect(out), name)

        return step

    return fun(collect(()), name)


def evaluate_rows(source):
    program = source if isinstance(source, RowProgram) else infer_row(source)
    return RowEvaluator(program).main()


__all__ = [
    "LacksPred",
    "Row",
    "RowProgram",
    "RowScheme",
    "RowTypeError",
    "TCon",
    "TFix",
    "TSum",
    "evaluate_rows",
    "infer_row",
    "render",
    "render_row",
]
