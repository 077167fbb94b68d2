"""Extensible variants as coproducts of functors, with two entailment engines.

``extvar.chains`` decides membership, injection and subtraction predicates by
instance chains; ``extvar.families`` decides them by closed type family
rewriting.  ``extvar.lang`` is a small functional language on top.
"""
from .types import (
    Atom,
    Coprod,
    Fails,
    FamApp,
    Holds,
    In,
    Leq,
    MinusP,
    NotIn,
    Stuck,
    Var,
    coprod,
    render,
    render_pred,
    render_solution,
)
from .chains import SolverFlags, solve_chain
from .families import solve_tf

__all__ = [
    "Atom",
    "Coprod",
    "Fails",
    "FamApp",
    "Holds",
    "In",
    "Leq",
    "MinusP",
    "NotIn",
    "SolverFlags",
    "Stuck",
    "Var",
    "coprod",
    "render",
    "render_pred",
    "render_solution",
    "solve_chain",
    "solve_tf",
]
