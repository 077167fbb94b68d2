"""Command-line front end.

    extvar check FILE      print the inferred scheme of every let binding
    extvar run FILE        print the value of main
    extvar solve PRED      decide one predicate and print the solution

Exit codes: 0 success, 2 parse or usage error, 3 type error, 4 ambiguity,
5 run-time failure.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from typing import Optional

from .chains import DepthExceeded
from .defaulting import AmbiguityError, ConflictError
from .lang.evaluate import evaluate
from .lang.infer import LangFlags, check_program, make_solver
from .lang.syntax import ParseError, parse_pred
from .lang.values import show
from .rows import evaluate_rows, infer_row
from .types import render_solution
from .unify import UnifyError

EXIT_OK, EXIT_USAGE, EXIT_TYPE, EXIT_AMBIGUOUS, EXIT_RUNTIME = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    command: str
    solver: str = "chains"
    generalized: bool = False
    defaulting: bool = True
    expose: bool = False
    trace: bool = False
    path: Optional[str] = None
    text: Optional[str] = None
    givens: tuple = ()

    def __post_init__(self):
        if self.generalized and self.solver == "families":
            raise UsageError("--generalized has no family translation; use --solver=chains")
        if self.solver == "rows" and self.command == "solve":
            raise UsageError("the row baseline has no predicate solver; use check or run")

    @property
    def flags(self) -> LangFlags:
        return LangFlags(self.generalized, self.defaulting, self.expose)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="extvar", description="Extensible variants with instance chains or type families.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--solver", choices=("chains", "families", "rows"), default="chains")
    common.add_argument("--generalized", action="store_true", help="admit the generalized injection and subtraction clauses")
    common.add_argument("--no-default", dest="defaulting", action="store_false", help="do not apply default declarations")
    common.add_argument("--expose-constructors", dest="expose", action="store_true", help="allow In/Inl/Inr in patterns")
    common.add_argument("--trace", action="store_true", help="print solver steps")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("check", "print inferred schemes"), ("run", "evaluate main")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("path")
    p = sub.add_parser("solve", parents=[common], help="decide one predicate")
    p.add_argument("input", nargs="?", help="predicate text, or a file holding it")
    p.add_argument("-e", dest="text", help="predicate text")
    p.add_argument("--given", action="append", default=[], help="a hypothesis, e.g. 'In f g fails'")
    return ap


def config_from(ns: argparse.Namespace) -> CliConfig:
    text = path = None
    if ns.command == "solve":
        if ns.text is not None:
            text = ns.text
        elif ns.input is None:
            raise UsageError("solve needs a predicate")
        elif os.path.isfile(ns.input):
            path = ns.input
        else:
            text = ns.input
    else:
        path = ns.path
    return CliConfig(
        ns.command,
        ns.solver,
        ns.generalized,
        ns.defaulting,
        ns.expose,
        ns.trace,
        path,
        text,
        tuple(getattr(ns, "given", ())),
    )


def _read(cfg: CliConfig) -> str:
    if cfg.text is not None:
        return cfg.text
    try:
        with open(cfg.path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {cfg.path}: {e.strerror}") from None


def cmd_check(cfg: CliConfig, out=sys.stdout) -> int:
    source = _read(cfg)
    if cfg.solver == "rows":
        program = infer_row(source)
    else:
        program = check_program(source, cfg.solver, cfg.flags)
    for line in program.signatures():
        print(line, file=out)
    return EXIT_OK


def cmd_run(cfg: CliConfig, out=sys.stdout) -> int:
    source = _read(cfg)
    if cfg.solver == "rows":
        value = evaluate_rows(source)
    else:
        value = evaluate(check_program(source, cfg.solver, cfg.flags))
    print(show(value), file=out)
    return EXIT_OK


def cmd_solve(cfg: CliConfig, out=sys.stdout) -> int:
    goal = parse_pred(_read(cfg).strip())
    givens = [parse_pred(g) for g in cfg.givens]
    trace = (lambda ev: print(ev, file=out)) if cfg.trace else None
    solver = make_solver(cfg.solver, cfg.generalized, trace)
    print(render_solution(solver.solve(goal, givens)), file=out)
    return EXIT_OK


COMMANDS = {"check": cmd_check, "run": cmd_run, "solve": cmd_solve}


def run(argv=None, out=sys.stdout, err=sys.stderr) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        cfg = config_from(ns)
        return COMMANDS[cfg.command](cfg, out)
    except UsageError as e:
        print(f"extvar: {e}", file=err)
        return EXIT_USAGE
    except ParseError as e:
        print(f"parse error: {e}", file=err)
        return EXIT_USAGE
    except (AmbiguityError, ConflictError) as e:
        print(f"ambiguous: {e}", file=err)
        return EXIT_AMBIGUOUS
    except (TypeError, DepthExceeded, UnifyError) as e:
        print(f"type error: {e}", file=err)
        for line in getattr(e, "trace", ()) if ns.trace else ():
            print(f"  {line}", file=err)
        return EXIT_TYPE
    except RecursionError:
        print("run-time error: recursion too deep", file=err)
        return EXIT_RUNTIME
    except RuntimeError as e:  # pattern failure and other evaluation errors
        print(f"run-time error: {e}", file=err)
        return EXIT_RUNTIME
    except (ValueError, LookupError) as e:
        print(f"extvar: {e}", file=err)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
