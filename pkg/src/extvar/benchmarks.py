"""Source text of the expression-problem programs used by tests and demos."""

PRELUDE = """\
data Const e = Const Int
data Sum e = Plus e e
data Product e = Times e e
data Square e = Square e

type E1 = Fix (Const :+: Sum)
type E1' = Fix (Sum :+: Const)
type E2 = Fix ((Const :+: Sum) :+: Product)
"""

DEFAULT = "default ((g :+: h) :-: g = h)\n"

TERMS = """\
let x = inj' (Plus (inj' (Const 1)) (inj' (Const 2)))
let y = inj' (Times (inj' (Const 3)) x)
"""

EVALUATORS = """\
let evalConst (Const n) r = n
let evalSum (Plus a b) r = r a + r b
let evalProduct (Times a b) r = r a * r b
let eval1 = cases (evalConst ? evalSum)
let eval2 = cases (evalProduct ? (evalSum ? evalConst))
"""

DESUGAR = """\
let desugarSqr = cases ((\\(Square e) r -> inj' (Times (r e) (r e)))
                        ? (\\e r -> In (fmap desugarSqr e)))
"""

EVAL2_PRIME = """\
let eval2' = cases ((evalConst ? evalSum) ? evalProduct)
"""

LEFTY = """\
let lefty = \\(In t) -> ((\\_ -> True) .?. (\\_ -> False)) t
"""

LIBRARY = PRELUDE + TERMS + EVALUATORS + DESUGAR


def program(main: str, *, default: bool = True, extra: str = "") -> str:
    """The library plus ``main = <main>``."""
    return LIBRARY + extra + (DEFAULT if default else "") + f"main = {main}\n"


# main expressions built only from the overloaded primitives
COHERENT_MAINS = {
    "eval1 x": 3,
    "eval2 x": 3,
    "eval2 y": 9,
    "eval2 (desugarSqr (inj' (Square (inj' (Const 4)))))": 16,
    "eval2 (desugarSqr (inj' (Plus (inj' (Square x)) y)))": 18,
}

# the lefty program at both annotations
LEFTY_MAINS = {
    "(\\y -> (eval1 y, lefty y)) (x :: E1)": "(3, False)",
    "(\\y -> (eval1 y, lefty y)) (x :: E1')": "(3, True)",
}

# the bindings whose schemes are quoted as golden types
GOLDEN_SCHEMES = {
    "x": "forall a. (Const :<: a, Sum :<: a) => Fix a",
    "y": "forall a. (Const :<: a, Product :<: a, Sum :<: a) => Fix a",
    "eval1": "forall a. (a :-: Const = Sum) => Fix a -> Int",
    "desugarSqr": "forall a b. (Functor b, Product :<: b, a :-: Square = b) => Fix a -> Fix b",
}
