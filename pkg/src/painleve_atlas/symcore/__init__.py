"""Exact multivariate polynomial and rational-function arithmetic over Q."""

from .parser import ParseError, parse, to_text
from .polynomial import NotDivisibleError, Polynomial, poly_gcd
from .rational import (
    SINGULAR_FLOOR,
    EvaluationPoleError,
    PoleCollapseError,
    RationalFunction,
    as_rf,
    equals,
    evaluate,
    partial_derivative,
    substitute,
)
from .variables import UnknownVariableError, Variable, var, variables

__all__ = [
    "ParseError",
    "parse",
    "to_text",
    "NotDivisibleError",
    "Polynomial",
    "poly_gcd",
    "SINGULAR_FLOOR",
    "EvaluationPoleError",
    "PoleCollapseError",
    "RationalFunction",
    "as_rf",
    "equals",
    "evaluate",
    "partial_derivative",
    "substitute",
    "UnknownVariableError",
    "Variable",
    "var",
    "variables",
]
