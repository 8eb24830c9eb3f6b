"""Exact expression core, canonical normalization and the equation DSL."""

from fractions import Fraction as Rational

from .expression import (
    Const,
    Deriv,
    Expr,
    Func,
    IntPow,
    Product,
    Sum,
    Symbol,
    SymbolKind,
    cosh,
    differentiate,
    eval_numeric,
    exp,
    expand,
    free_symbols,
    make_derivative,
    normalize,
    poly_to_expr,
    replace_atoms,
    sech,
    sinh,
    split_derivative,
    substitute,
    tanh,
    to_text,
)
from .parser import PdeEquation, parse_equation, parse_expression, symbol_for_name
from .polynomial import Poly

__all__ = [
    "Const", "Deriv", "Expr", "Func", "IntPow", "PdeEquation", "Poly", "Product", "Rational",
    "Sum", "Symbol", "SymbolKind", "cosh", "differentiate", "eval_numeric", "exp", "expand",
    "free_symbols", "make_derivative", "normalize", "parse_equation", "parse_expression",
    "poly_to_expr", "replace_atoms", "sech", "sinh", "split_derivative", "substitute",
    "symbol_for_name", "tanh", "to_text",
]
