"""Runtime values and the operations evidence drives.

Integers and booleans are plain Python values; everything else is one of
the small immutable records below.  A value of a coproduct type is a path
of ``VInl``/``VInr`` tags ending in a constructor; ``VIn`` wraps the
recursion points of a fixed point.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from ..types import Dist, L, Le, Onl, Onr, R, Refl, Ri, Split, render_witness


class ShapeError(RuntimeError):
    """A value does not have the shape its evidence promises."""


class PatternFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class VCon:
    con: str
    args: tuple = ()


@dataclass(frozen=True)
class VInl:
    value: object


@dataclass(frozen=True)
class VInr:
    value: object


@dataclass(frozen=True)
class VIn:
    value: object


@dataclass(frozen=True)
class VPair:
    fst: object
    snd: object


@dataclass(frozen=True)
class VJust:
    value: object


@dataclass(frozen=True)
class VNothing:
    pass


@dataclass(frozen=True, eq=False)
class VFun:
    fn: Callable
    name: str = "<function>"

    def __call__(self, v):
        return self.fn(v)


def apply(f, v):
    if not isinstance(f, VFun):
        raise ShapeError(f"cannot apply {show(f)}")
    return f.fn(v)


def fun(fn: Callable, name: str = "<function>") -> VFun:
    return VFun(fn, name)


# ---------------------------------------------------------------------------
# Evidence


def inject_value(w, v):
    match w:
        case Refl():
            return v
        case L(inner):
            return VInl(inject_value(inner, v))
        case R(inner):
            return VInr(inject_value(inner, v))
        case Split(left, right):
            if isinstance(v, VInl):
                return inject_value(left, v.value)
            if isinstance(v, VInr):
                return inject_value(right, v.value)
    raise ShapeError(f"cannot inject {show(v)} along {render_witness(w)}")


SELECTED, REMAINDER = "selected", "remainder"


def route_branch(w, v) -> tuple:
    """Which side of ``m ? n`` handles ``v``, and the value that side sees."""
    match w, v:
        case Onl(), VInl(x):
            return SELECTED, x
        case Onl(), VInr(y):
            return REMAINDER, y
        case Onr(), VInl(x):
            return REMAINDER, x
        case Onr(), VInr(y):
            return SELECTED, y
        case Le(), VInr(_):
            return REMAINDER, v
        case Le(_, p), VInl(x):
            side, out = route_branch(p, x)
            return (side, out) if side == SELECTED else (REMAINDER, VInl(out))
        case Ri(), VInl(_):
            return REMAINDER, v
        case Ri(_, p), VInr(y):
            side, out = route_branch(p, y)
            return (side, out) if side == SELECTED else (REMAINDER, VInr(out))
        case Dist(first, second), _:
            side, out = route_branch(first, v)
            if side == SELECTED:
                return SELECTED, VInl(out)
            side, out = route_branch(second, out)
            return (SELECTED, VInr(out)) if side == SELECTED else (REMAINDER, out)
    raise ShapeError(f"cannot route {show(v)} along {render_witness(w)}")


def branch(w, m, n):
    """``m ? n`` at the subtraction witnessed by ``w``."""

    def run(v):
        side, out = route_branch(w, v)
        return apply(m if side == SELECTED else n, out)

    return fun(run, "?")


def raw_branch(f, g):
    def run(v):
        if isinstance(v, VInl):
            return apply(f, v.value)
        if isinstance(v, VInr):
            return apply(g, v.value)
        raise ShapeError(f".?. expects a tagged value, got {show(v)}")

    return fun(run, ".?.")


def fmap_value(selves: Mapping[str, tuple], h, v):
    """Map ``h`` over the recursion positions of one layer.

    ``selves`` gives, per constructor, which fields are recursive.
    """
    match v:
        case VInl(x):
            return VInl(fmap_value(selves, h, x))
        case VInr(y):
            return VInr(fmap_value(selves, h, y))
        case VCon(con, args):
            mask = selves.get(con)
            if mask is None:
                raise ShapeError(f"no map for constructor {con}")
            return VCon(con, tuple(apply(h, a) if s else a for a, s in zip(args, mask)))
    raise ShapeError(f"fmap expects a functor layer, got {show(v)}")


# ---------------------------------------------------------------------------
# Printing


def _atomic(v) -> bool:
    return isinstance(v, (int, VPair, VNothing, VFun)) or (isinstance(v, VCon) and not v.args)


def _arg(v) -> str:
    return show(v) if _atomic(v) else f"({show(v)})"


def show(v) -> str:
    match v:
        case bool():
            return "True" if v else "False"
        case int():
            return str(v) if v >= 0 else f"({v})"
        case VPair(a, b):
            return f"({show(a)}, {show(b)})"
        case VCon(con, args):
            return " ".join([con, *map(_arg, args)])
        case VInl(x):
            return f"Inl {_arg(x)}"
        case VInr(x):
            return f"Inr {_arg(x)}"
        case VIn(x):
            return f"In {_arg(x)}"
        case VJust(x):
            return f"Just {_arg(x)}"
        case VNothing():
            return "Nothing"
        case VFun(_, name):
            return "<function>" if name == "<function>" else f"<function {name}>"
    raise TypeError(f"not a value: {v!r}")


def strip_tags(v):
    """Forget the coproduct encoding, leaving a plain constructor tree."""
    match v:
        case VIn(x) | VInl(x) | VInr(x):
            return strip_tags(x)
        case VCon(con, args):
            return VCon(con, tuple(strip_tags(a) for a in args))
        case VPair(a, b):
            return VPair(strip_tags(a), strip_tags(b))
        case VJust(x):
            return VJust(strip_tags(x))
    return v


__all__ = [
    "PatternFailure",
    "REMAINDER",
    "SELECTED",
    "ShapeError",
    "VCon",
    "VFun",
    "VIn",
    "VInl",
    "VInr",
    "VJust",
    "VNothing",
    "VPair",
    "apply",
    "branch",
    "fmap_value",
    "fun",
    "inject_value",
    "raw_branch",
    "route_branch",
    "show",
    "strip_tags",
]
