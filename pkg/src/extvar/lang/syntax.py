"""Abstract syntax and parser for the surface language.

Declarations start in the first column; any indented line continues the
previous declaration.  Comments run from ``--`` to the end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from ..defaulting import DefaultDecl, DefaultingError
from ..types import (
    BOOL,
    INT,
    Atom,
    AppT,
    BoolT,
    Coprod,
    FixT,
    FunctorP,
    FunT,
    IntT,
    In,
    Kind,
    Leq,
    MaybeT,
    MinusP,
    NotIn,
    PairT,
    Scheme,
    Var,
)


class ParseError(SyntaxError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line, self.col = line, col


Pos = tuple  # (line, col)


# ---------------------------------------------------------------------------
# Expressions and patterns
#
# Nodes compare by identity: the checker hangs types and evidence requests
# off individual occurrences.


@dataclass(eq=False)
class Lit:
    value: Union[int, bool]
    pos: Pos = (0, 0)


@dataclass(eq=False)
class Name:
    name: str
    pos: Pos = (0, 0)
    # filled in by the checker
    ty: object = None
    pred: object = None
    inst: Optional[dict] = None
    rec: bool = False


@dataclass(eq=False)
class App:
    fn: object
    arg: object
    pos: Pos = (0, 0)


@dataclass(eq=False)
class Lam:
    pats: list
    body: object
    pos: Pos = (0, 0)


@dataclass(eq=False)
class Let:
    name: str
    rhs: object
    body: object
    pos: Pos = (0, 0)


@dataclass(eq=False)
class Pair:
    fst: object
    snd: object
    pos: Pos = (0, 0)


@dataclass(eq=False)
class Ann:
    expr: object
    type: object
    pos: Pos = (0, 0)


Expr = Union[Lit, Name, App, Lam, Let, Pair, Ann]


@dataclass(eq=False)
class PVar:
    name: str
    pos: Pos = (0, 0)


@dataclass(eq=False)
class PWild:
    pos: Pos = (0, 0)


@dataclass(eq=False)
class PCon:
    con: str
    args: list
    pos: Pos = (0, 0)


Pattern = Union[PVar, PWild, PCon]

EXPOSED = ("In", "Inl", "Inr")


# ---------------------------------------------------------------------------
# Declarations


@dataclass
class DataDecl:
    functor: str
    con: str
    fields: list  # of "self" | "Int" | "Bool"
    pos: Pos = (0, 0)


@dataclass
class TypeAlias:
    name: str
    type: object
    pos: Pos = (0, 0)


@dataclass
class DefaultD:
    decl: DefaultDecl
    pos: Pos = (0, 0)


@dataclass
class LetD:
    name: str
    ann: Optional[Scheme]
    expr: object
    pos: Pos = (0, 0)


@dataclass
class MainD:
    expr: object
    pos: Pos = (0, 0)


Decl = Union[DataDecl, TypeAlias, DefaultD, LetD, MainD]


# ---------------------------------------------------------------------------
# Lexer

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>--[^\n]*)
  | (?P<nl>\n)
  | (?P<int>\d+)
  | (?P<op>:\+:|:-:|:<:|\.\?\.|::|->|=>|[?=\\(),+*:_.])
  | (?P<name>[A-Za-z][A-Za-z0-9_']*)
  | (?P<bad>.)
    """,
    re.VERBOSE,
)

KEYWORDS = {"data", "type", "default", "let", "in", "main", "forall"}


@dataclass(frozen=True)
class Token:
    kind: str  # int | op | name | kw | end
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    out = []
    line, start = 1, 0
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        col = m.start() - start + 1
        if kind == "nl":
            line += 1
            start = m.end()
            continue
        if kind in ("ws", "comment"):
            continue
        if kind == "bad":
            raise ParseError(f"unexpected character {m.group()!r}", line, col)
        tok = m.group()
        if kind == "name" and tok in KEYWORDS:
            kind = "kw"
        out.append(Token(kind, tok, line, col))
    return out


def split_decls(tokens: list) -> list:
    """Group tokens into declarations: a token in column 1 starts a new one."""
    groups: list = []
    for t in tokens:
        if t.col == 1 or not groups:
            if t.col != 1:
                raise ParseError("declaration must start in the first column", t.line, t.col)
            groups.append([])
        groups[-1].append(t)
    return groups


# ---------------------------------------------------------------------------
# Parser


_PRIMS = {"Int": INT, "Bool": BOOL}


class Parser:
    def __init__(self, tokens: list):
        self.toks = tokens
        self.i = 0
        last = tokens[-1] if tokens else Token("end", "", 1, 1)
        self.end = Token("end", "<end of declaration>", last.line, last.col + len(last.text))

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i] if self.i < len(self.toks) else self.end

    def peek(self, k: int = 1) -> Token:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else self.end

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw", "name") and t.text == text

    def error(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text!r}")
        t = self.tok
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def ident(self, upper: Optional[bool] = None) -> Token:
        t = self.tok
        if t.kind != "name" or (upper is not None and t.text[0].isupper() != upper):
            want = "a name" if upper is None else ("a capitalised name" if upper else "a lower-case name")
            self.error(f"expected {want}, found {t.text!r}")
        self.i += 1
        return t

    def done(self) -> None:
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.text!r}")

    # -- declarations

    def decl(self) -> Decl:
        t = self.tok
        pos = (t.line, t.col)
        if self.accept("data"):
            return self.data_decl(pos)
        if self.accept("type"):
            name = self.ident(upper=True).text
            self.expect("=")
            ty = self.type()
            self.done()
            return TypeAlias(name, ty, pos)
        if self.accept("default"):
            return self.default_decl(pos)
        if self.accept("let"):
            name = self.ident(upper=False).text
            ann = None
            if self.accept(":"):
                ann = self.scheme()
            pats = []
            while not self.at("="):
                pats.append(self.apattern())
            self.expect("=")
            body = self.expr()
            self.done()
            if pats:
                body = Lam(pats, body, pos)
            return LetD(name, ann, body, pos)
        if self.accept("main"):
            self.expect("=")
            e = self.expr()
            self.done()
            return MainD(e, pos)
        self.error(f"expected a declaration, found {t.text!r}")

    def data_decl(self, pos) -> DataDecl:
        functor = self.ident(upper=True).text
        param = None
        if self.tok.kind == "name" and not self.tok.text[0].isupper():
            param = self.ident().text
        self.expect("=")
        con = self.ident(upper=True).text
        fields = []
        while self.tok.kind != "end":
            t = self.ident()
            if t.text in ("self", param):
                fields.append("self")
            elif t.text in ("Int", "Bool"):
                fields.append(t.text)
            else:
                self.error(f"field must be self, Int or Bool, found {t.text!r}", t)
        return DataDecl(functor, con, fields, pos)

    def default_decl(self, pos) -> DefaultD:
        start = self.expect("(")
        p = self.pred()
        self.expect(")")
        self.done()
        if not isinstance(p, MinusP):
            self.error("a default declaration has the form ((g :+: h) :-: g = h)", start)
        p = MinusP(*(kinded(a, Kind.FUNCTOR) for a in (p.f, p.g, p.out)))
        head = "f#"
        text = f"default ({self.source(start)})"
        try:
            return DefaultD(DefaultDecl(MinusP(Var(head), p.g, p.out), head, p.f, text), pos)
        except DefaultingError as exc:
            self.error(str(exc), start)

    def source(self, start: Token) -> str:
        j = self.toks.index(start)
        return " ".join(t.text for t in self.toks[j + 1 : self.i - 1]).replace("( ", "(").replace(" )", ")")

    # -- types

    def scheme(self) -> Scheme:
        names = []
        if self.accept("forall"):
            while not self.accept("."):
                names.append(self.ident(upper=False).text)
        preds: list = []
        save = self.i
        if self.at("(") or self.at("Functor") or self.at("In"):
            try:
                preds = self.context()
                self.expect("=>")
            except ParseError:
                self.i, preds = save, []
        body = self.type()
        body, preds = kind_scheme(body, preds)
        found = {}
        for t in [body, *[a for p in preds for a in _pargs(p)]]:
            for v in _vars(t):
                found.setdefault(v.name, v)
        missing = [n for n in names if n not in found]
        if missing:
            self.error(f"quantified variable {missing[0]} is not used")
        return Scheme(tuple(found.values()), tuple(preds), body)

    def context(self) -> list:
        if self.accept("("):
            preds = [self.pred()]
            while self.accept(","):
                preds.append(self.pred())
            self.expect(")")
            return preds
        return [self.pred()]

    def pred(self):
        if self.accept("Functor"):
            return FunctorP(self.atype())
        if self.at("In") and not self.peek().text.startswith(":"):
            self.i += 1
            a, b = self.atype(), self.atype()
            if self.tok.kind == "name" and self.tok.text == "fails":
                self.i += 1
                return NotIn(a, b)
            return In(a, b)
        left = self.btype()
        if self.accept(":<:"):
            return Leq(left, self.btype())
        if self.accept(":-:"):
            right = self.btype()
            self.expect("=")
            return MinusP(left, right, self.btype())
        self.error("expected :<: or :-: in a predicate")

    def type(self):
        left = self.btype()
        if self.accept("->"):
            return FunT(left, self.type())
        return left

    def btype(self):
        t = self.ctype()
        while self.accept(":+:"):
            t = Coprod(t, self.ctype())
        return t

    def ctype(self):
        if self.accept("Fix"):
            return FixT(self.atype())
        if self.accept("Maybe"):
            return MaybeT(self.atype())
        t = self.atype()
        if self.tok.kind == "name" or self.at("("):
            return AppT(t, self.atype())
        return t

    def atype(self):
        t = self.tok
        if self.accept("("):
            inner = self.type()
            if self.accept(","):
                inner = PairT(inner, self.type())
            self.expect(")")
            return inner
        if t.kind == "name":
            self.i += 1
            if t.text in _PRIMS:
                return _PRIMS[t.text]
            if t.text[0].isupper():
                return Atom(t.text)
            return Var(t.text, Kind.STAR)
        self.error(f"expected a type, found {t.text!r}")

    # -- expressions

    def expr(self):
        e = self.branch()
        if self.at("::"):
            t = self.expect("::")
            return Ann(e, self.type(), (t.line, t.col))
        return e

    def _binop(self, op: Token, left, right):
        return App(App(Name(op.text, (op.line, op.col)), left, (op.line, op.col)), right, (op.line, op.col))

    def branch(self):
        left = self.raw_branch()
        if self.at("?"):
            op = self.expect("?")
            return self._binop(op, left, self.branch())
        return left

    def raw_branch(self):
        left = self.additive()
        if self.at(".?."):
            op = self.expect(".?.")
            return self._binop(op, left, self.raw_branch())
        return left

    def additive(self):
        e = self.multiplicative()
        while self.at("+"):
            op = self.expect("+")
            e = self._binop(op, e, self.multiplicative())
        return e

    def multiplicative(self):
        e = self.application()
        while self.at("*"):
            op = self.expect("*")
            e = self._binop(op, e, self.application())
        return e

    def _starts_atom(self) -> bool:
        t = self.tok
        return t.kind in ("int", "name") or self.at("(") or self.at("\\") or self.at("let")

    def application(self):
        e = self.atom()
        while self._starts_atom():
            if self.at("\\") or self.at("let"):
                return App(e, self.atom(), getattr(e, "pos", (0, 0)))
            e = App(e, self.atom(), e.pos)
        return e

    def atom(self):
        t = self.tok
        pos = (t.line, t.col)
        if t.kind == "int":
            self.i += 1
            return Lit(int(t.text), pos)
        if t.kind == "name":
            self.i += 1
            if t.text in ("True", "False"):
                return Lit(t.text == "True", pos)
            return Name(t.text, pos)
        if self.accept("\\"):
            pats = [self.apattern()]
            while not self.at("->"):
                pats.append(self.apattern())
            self.expect("->")
            return Lam(pats, self.expr(), pos)
        if self.accept("let"):
            name = self.ident(upper=False).text
            pats = []
            while not self.at("="):
                pats.append(self.apattern())
            self.expect("=")
            rhs = self.expr()
            if pats:
                rhs = Lam(pats, rhs, pos)
            self.expect("in")
            return Let(name, rhs, self.expr(), pos)
        if self.accept("("):
            if self.tok.kind == "op" and self.tok.text in ("?", ".?.", "+", "*") and self.peek().text == ")":
                op = self.tok
                self.i += 2
                return Name(op.text, pos)
            e = self.expr()
            if self.accept(","):
                e = Pair(e, self.expr(), pos)
            self.expect(")")
            return e
        self.error(f"expected an expression, found {t.text!r}")

    # -- patterns

    def apattern(self):
        t = self.tok
        pos = (t.line, t.col)
        if self.accept("_"):
            return PWild(pos)
        if t.kind == "name" and not t.text[0].isupper():
            self.i += 1
            return PVar(t.text, pos)
        if t.kind == "name":
            self.i += 1
            return PCon(t.text, [], pos)
        if self.accept("("):
            con = self.ident(upper=True).text
            args = []
            while not self.at(")"):
                args.append(self.apattern())
            self.expect(")")
            return PCon(con, args, pos)
        self.error(f"expected a pattern, found {t.text!r}")


# ---------------------------------------------------------------------------
# Kinds of annotation variables


def _pargs(p) -> tuple:
    if isinstance(p, FunctorP):
        return (p.f,)
    if isinstance(p, MinusP):
        return (p.f, p.g, p.out)
    return (p.f, p.g)


def _vars(t):
    if isinstance(t, Var):
        yield t
    for c in _kids(t):
        yield from _vars(c)


def _kids(t) -> tuple:
    match t:
        case Coprod(a, b) | FunT(a, b) | PairT(a, b) | AppT(a, b):
            return (a, b)
        case FixT(a) | MaybeT(a):
            return (a,)
    return ()


def kinded(t, kind: Kind, seen: Optional[dict] = None):
    """Give every variable the kind its position demands.

    The parser reads variables as ground-kinded; ``seen`` records the kind
    chosen for each name so conflicting uses are reported.
    """
    seen = {} if seen is None else seen
    match t:
        case Var(name):
            prev = seen.setdefault(name, kind)
            if prev is not kind:
                raise ParseError(f"type variable {name} is used at two kinds", 0, 0)
            return Var(name, kind)
        case Atom(name):
            return Atom(name, Kind.FUNCTOR)
        case Coprod(a, b):
            return Coprod(kinded(a, Kind.FUNCTOR, seen), kinded(b, Kind.FUNCTOR, seen))
        case FixT(a):
            return FixT(kinded(a, Kind.FUNCTOR, seen))
        case AppT(a, b):
            return AppT(kinded(a, Kind.FUNCTOR, seen), kinded(b, Kind.STAR, seen))
        case FunT(a, b):
            return FunT(kinded(a, Kind.STAR, seen), kinded(b, Kind.STAR, seen))
        case PairT(a, b):
            return PairT(kinded(a, Kind.STAR, seen), kinded(b, Kind.STAR, seen))
        case MaybeT(a):
            return MaybeT(kinded(a, Kind.STAR, seen))
        case IntT() | BoolT() if kind is Kind.FUNCTOR:
            # at functor kind these can only be atom names
            return Atom("Int" if isinstance(t, IntT) else "Bool", Kind.FUNCTOR)
    return t


def kind_scheme(body, preds: list) -> tuple:
    seen: dict = {}
    out = []
    for p in preds:
        out.append(type(p)(*(kinded(a, Kind.FUNCTOR, seen) for a in _pargs(p))))
    return kinded(body, Kind.STAR, seen), out


def kind_type(t):
    return kinded(t, Kind.STAR)


# ---------------------------------------------------------------------------
# Entry points


def parse_program(text: str) -> list:
    decls = []
    for group in split_decls(tokenize(text)):
        decls.append(Parser(group).decl())
    return decls


def parse_expr(text: str):
    p = Parser(tokenize(text))
    e = p.expr()
    p.done()
    return e


def parse_type(text: str):
    p = Parser(tokenize(text))
    t = p.type()
    p.done()
    return t


def parse_pred(text: str):
    """A solver goal: ``f :<: g``, ``f :-: g`` (result left open), ``In f g [fails]`` or ``Into f g``."""
    p = Parser(tokenize(text))
    if p.tok.kind == "name" and p.tok.text in ("Into", "Minus"):
        fam = p.tok.text
        p.i += 1
        a, b = p.atype(), p.atype()
        p.done()
        a, b = kinded(a, Kind.FUNCTOR), kinded(b, Kind.FUNCTOR)
        return Leq(a, b) if fam == "Into" else MinusP(a, b, Var("out#"))
    if p.at("In") and not p.peek().text.startswith(":"):
        goal = p.pred()
    else:
        left = p.btype()
        if p.accept(":<:"):
            goal = Leq(left, p.btype())
        elif p.accept(":-:"):
            right = p.btype()
            out = Var("out#")
            if p.accept("="):
                out = p.btype()
            goal = MinusP(left, right, out)
        else:
            p.error("expected :<: or :-:")
    p.done()
    seen: dict = {}
    return type(goal)(*(kinded(a, Kind.FUNCTOR, seen) for a in _pargs(goal)))


__all__ = [
    "Ann",
    "App",
    "DataDecl",
    "Decl",
    "DefaultD",
    "EXPOSED",
    "Lam",
    "Let",
    "LetD",
    "Lit",
    "MainD",
    "Name",
    "PCon",
    "PVar",
    "PWild",
    "Pair",
    "ParseError",
    "TypeAlias",
    "kind_type",
    "kinded",
    "parse_expr",
    "parse_pred",
    "parse_program",
    "parse_type",
    "tokenize",
]
