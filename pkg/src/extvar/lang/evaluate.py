"""Evidence-directed evaluation.

Each top-level binding is specialised per ground instantiation of its
scheme: evaluating a reference to ``eval1`` at ``f = Const :+: Sum``
evaluates ``eval1``'s body with every overloaded primitive inside it
resolved by the solver at that instantiation.  Specialisations are cached
on the binding name and the instantiation.
"""
from __future__ import annotations

from ..types import Holds, MinusP, Var, apply_subst, free_vars, pred_args, render_pred, subst_pred
from ..unify import resolve
from .infer import CheckedProgram, check_program, LangFlags
from .syntax import Ann, App, Lam, Let, Lit, Name, PCon, Pair, PVar, PWild
from .values import (
    PatternFailure,
    VCon,
    VIn,
    VInl,
    VInr,
    VJust,
    VNothing,
    VPair,
    apply,
    branch,
    fmap_value,
    fun,
    inject_value,
    raw_branch,
)


class EvalError(RuntimeError):
    pass


_BUSY = object()


class _Spec:
    """One instantiation of one binding: ground types for its variables."""

    __slots__ = ("theta", "evidence")

    def __init__(self, theta: dict):
        self.theta = theta
        self.evidence: dict = {}


class Evaluator:
    def __init__(self, program: CheckedProgram, solver=None):
        self.prog = program
        self.solver = solver or program.solver
        self.cache: dict = {}
        self.selves = {d.con: tuple(f == "self" for f in d.fields) for d in program.cons.values()}

    # -- types at a specialisation

    def ground(self, spec: _Spec, t):
        return apply_subst(spec.theta, resolve(self.prog.subst, t))

    def witness(self, spec: _Spec, node: Name):
        hit = spec.evidence.get(id(node))
        if hit is not None:
            return hit
        p = subst_pred(spec.theta, type(node.pred)(*(resolve(self.prog.subst, a) for a in pred_args(node.pred))))
        goal = MinusP(p.f, p.g, Var("out#")) if isinstance(p, MinusP) and free_vars(p.out) else p
        sol = self.solver.solve(goal)
        if not isinstance(sol, Holds):
            raise EvalError(f"{node.name} at {node.pos[0]}:{node.pos[1]}: {render_pred(p)} is not resolved at run time")
        spec.evidence[id(node)] = sol.evidence
        return sol.evidence

    # -- bindings

    def binding(self, name: str, theta: dict):
        b = self.prog.bindings[name]
        theta = {v.name: theta.get(v.name, v) for v in b.scheme.vars}
        key = (name, tuple(theta.values()))
        hit = self.cache.get(key)
        if hit is _BUSY:
            raise EvalError(f"{name} is defined in terms of itself")
        if hit is not None:
            return hit
        self.cache[key] = _BUSY
        try:
            v = self.eval(b.expr, {}, _Spec(theta))
        except BaseException:
            del self.cache[key]
            raise
        self.cache[key] = v
        return v

    def main(self):
        m = self.prog.main
        if m is None:
            raise EvalError("the program has no main")
        return self.eval(m.expr, {}, _Spec(dict(m.theta)))

    # -- expressions

    def eval(self, e, env: dict, spec: _Spec):
        match e:
            case Lit(value):
                return value
            case Name(name):
                if name in env:
                    return env[name]
                if e.rec:
                    return self.binding(name, spec.theta)
                if e.inst is not None:
                    return self.binding(name, {v: self.ground(spec, t) for v, t in e.inst.items()})
                return self.name(e, spec)
            case App(fn, arg):
                f = self.eval(fn, env, spec)
                return apply(f, self.eval(arg, env, spec))
            case Lam(pats, body):
                return self.closure(pats, body, env, spec)
            case Let(name, rhs, body):
                return self.eval(body, {**env, name: self.eval(rhs, env, spec)}, spec)
            case Pair(a, b):
                return VPair(self.eval(a, env, spec), self.eval(b, env, spec))
            case Ann(expr, _):
                return self.eval(expr, env, spec)
        raise EvalError(f"cannot evaluate {e!r}")

    def closure(self, pats: list, body, env: dict, spec: _Spec):
        def take(i: int, local: dict):
            def step(v):
                inner = dict(local)
                match_pattern(pats[i], v, inner)
                if i + 1 == len(pats):
                    return self.eval(body, inner, spec)
                return take(i + 1, inner)

            return fun(step)

        return take(0, env)

    def name(self, e: Name, spec: _Spec):
        n = e.name
        d = self.prog.cons.get(n)
        if d is not None:
            return _constructor(n, len(d.fields))
        match n:
            case "inj":
                w = self.witness(spec, e)
                return fun(lambda v: inject_value(w, v), "inj")
            case "inj'":
                w = self.witness(spec, e)
                return fun(lambda v: VIn(inject_value(w, v)), "inj'")
            case "?":
                w = self.witness(spec, e)
                return fun(lambda m: fun(lambda k: branch(w, m, k)))
            case "prj":
                w = self.witness(spec, e)
                return branch(w, fun(VJust), fun(lambda _: VNothing()))
            case "In":
                return fun(VIn, "In")
            case "Inl":
                return fun(VInl, "Inl")
            case "Inr":
                return fun(VInr, "Inr")
            case ".?.":
                return fun(lambda f: fun(lambda g: raw_branch(f, g)))
            case "cases":
                return fun(_cases, "cases")
            case "fmap":
                return fun(lambda h: fun(lambda v: fmap_value(self.selves, h, v)), "fmap")
            case "const":
                return fun(lambda a: fun(lambda _: a), "const")
            case "Just":
                return fun(VJust, "Just")
            case "Nothing":
                return VNothing()
            case "+":
                return fun(lambda a: fun(lambda b: a + b), "+")
            case "*":
                return fun(lambda a: fun(lambda b: a * b), "*")
            case "fst":
                return fun(lambda p: p.fst, "fst")
            case "snd":
                return fun(lambda p: p.snd, "snd")
        raise EvalError(f"unbound name {n}")


def _cases(cs):
    def unroll(v):
        if not isinstance(v, VIn):
            raise EvalError("cases expects a fixed-point value")
        return apply(apply(cs, v.value), rec)

    rec = fun(unroll, "cases")
    return rec


def _constructor(name: str, arity: int):
    if arity == 0:
        return VCon(name)

    def collect(args: tuple):
        def step(v):
            out = args + (v,)
            return VCon(name, out) if len(out) == arity else fun(collect(out), name)

        return step

    return fun(collect(()), name)


def match_pattern(p, v, env: dict) -> None:
    match p:
        case PVar(name):
            env[name] = v
            return
        case PWild():
            return
        case PCon("In", [q]):
            if not isinstance(v, VIn):
                raise PatternFailure(f"{p.pos[0]}:{p.pos[1]}: pattern In does not match")
            return match_pattern(q, v.value, env)
        case PCon("Inl", [q]):
            if not isinstance(v, VInl):
                raise PatternFailure(f"{p.pos[0]}:{p.pos[1]}: pattern Inl does not match")
            return match_pattern(q, v.value, env)
        case PCon("Inr", [q]):
            if not isinstance(v, VInr):
                raise PatternFailure(f"{p.pos[0]}:{p.pos[1]}: pattern Inr does not match")
            return match_pattern(q, v.value, env)
        case PCon("Just", [q]):
            if not isinstance(v, VJust):
                raise PatternFailure(f"{p.pos[0]}:{p.pos[1]}: pattern Just does not match")
            return match_pattern(q, v.value, env)
        case PCon("Nothing", []):
            if not isinstance(v, VNothing):
                raise PatternFailure(f"{p.pos[0]}:{p.pos[1]}: pattern Nothing does not match")
            return
        case PCon(con, args):
            if not isinstance(v, VCon) or v.con != con:
                raise PatternFailure(f"{p.pos[0]}:{p.pos[1]}: pattern {con} does not match")
            for q, a in zip(args, v.args):
                match_pattern(q, a, env)
            return
    raise EvalError(f"bad pattern {p!r}")


def evaluate(program, solver="chains", flags: LangFlags = LangFlags()):
    """Value of ``main``; ``program`` is source text or a checked program."""
    if not isinstance(program, CheckedProgram):
        program = check_program(program, solver, flags)
    return Evaluator(program).main()


__all__ = ["EvalError", "Evaluator", "evaluate", "match_pattern"]
