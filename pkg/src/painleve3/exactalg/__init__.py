"""Exact arithmetic over Q(i)(x1, ..., xn): rational functions, derivations, linear solving."""

from .derivation import DerivationSpec, apply_derivation
from .gaussrat import I, GaussRat
from .linsolve import LinearSolution, NonlinearError, solve_linear
from .parsing import ParseError, parse, parse_gaussrat
from .ratfun import MultiPoly, RatFun, normalize, substitute, symbols

__all__ = [
    "DerivationSpec", "GaussRat", "I", "LinearSolution", "MultiPoly", "NonlinearError",
    "ParseError", "RatFun", "apply_derivation", "normalize", "parse", "parse_gaussrat",
    "solve_linear", "substitute", "symbols",
]
