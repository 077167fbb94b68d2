"""The surface language: parser, checker and evaluator."""
from .evaluate import EvalError, Evaluator, evaluate
from .infer import CheckedProgram, LangFlags, TypeCheckError, canonical, check_program, infer, make_solver
from .syntax import ParseError, parse_expr, parse_program, parse_pred, parse_type
from .values import PatternFailure, inject_value, route_branch, show

__all__ = [
    "CheckedProgram",
    "EvalError",
    "Evaluator",
    "LangFlags",
    "ParseError",
    "PatternFailure",
    "TypeCheckError",
    "canonical",
    "check_program",
    "evaluate",
    "infer",
    "inject_value",
    "make_solver",
    "parse_expr",
    "parse_pred",
    "parse_program",
    "parse_type",
    "route_branch",
    "show",
]
