"""Immutable expression trees with exact rational coefficients.

Trees are built from :class:`Const`, :class:`Symbol`, :class:`Sum`,
:class:`Product`, :class:`IntPow`, :class:`Deriv` and :class:`Func` nodes.
Python operators build raw (unsimplified) trees; :func:`normalize` maps any
tree to its canonical sum-of-products form by expanding it into a
:class:`~solwave.equation_model.polynomial.Poly` over *atoms* (symbols,
field-derivative atoms, hyperbolic function atoms and inverted sums) and
rendering it back.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import numpy as np

from ..errors import CyclicBinding, NonFiniteResult, UnboundSymbol
from .polynomial import Poly

HYPERBOLIC_KINDS = ("tanh", "sech", "sinh", "cosh", "exp")


class SymbolKind(enum.Enum):
    """Role of a symbol; the value is its rank in the canonical order."""

    PARAMETER = 0
    WAVE_SPEED = 1
    INTEGRATION_CONSTANT = 2
    ANSATZ_UNKNOWN = 3
    PHASE_SHIFT = 4
    INDEPENDENT_VAR = 5
    FIELD = 6


class Expr:
    """Base class of all expression nodes."""

    __slots__ = ()

    def _fields(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        return self is other or (hash(self) == hash(other) and self._fields() == other._fields())

    def __hash__(self):
        h = self.__dict__.get("_h")
        if h is None:
            h = hash((type(self).__name__,) + self._fields())
            object.__setattr__(self, "_h", h)
        return h

    def __add__(self, other):
        return Sum((self, as_expr(other)))

    def __radd__(self, other):
        return Sum((as_expr(other), self))

    def __sub__(self, other):
        return Sum((self, Product((Const(-1), as_expr(other)))))

    def __rsub__(self, other):
        return Sum((as_expr(other), Product((Const(-1), self))))

    def __mul__(self, other):
        return Product((self, as_expr(other)))

    def __rmul__(self, other):
        return Product((as_expr(other), self))

    def __truediv__(self, other):
        return Product((self, IntPow(as_expr(other), -1)))

    def __rtruediv__(self, other):
        return Product((as_expr(other), IntPow(self, -1)))

    def __neg__(self):
        return Product((Const(-1), self))

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer exponents are supported")
        return IntPow(self, n)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, eq=False)
class Const(Expr):
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))

    def _fields(self):
        return (self.value,)

    def __repr__(self):
        return f"Const({self.value})"


@dataclass(frozen=True, eq=False)
class Symbol(Expr):
    name: str
    kind: SymbolKind = SymbolKind.PARAMETER

    def _fields(self):
        return (self.name, self.kind)

    def sort_key(self):
        return (0, self.kind.value, self.name)

    def __repr__(self):
        return f"Symbol({self.name!r}, {self.kind.name})"


@dataclass(frozen=True, eq=False)
class Sum(Expr):
    terms: tuple

    def _fields(self):
        return self.terms

    def sort_key(self):
        return (3, to_text(self))

    def __repr__(self):
        return f"Sum({list(self.terms)!r})"


@dataclass(frozen=True, eq=False)
class Product(Expr):
    factors: tuple

    def _fields(self):
        return self.factors

    def __repr__(self):
        return f"Product({list(self.factors)!r})"


@dataclass(frozen=True, eq=False)
class IntPow(Expr):
    base: Expr
    exponent: int

    def _fields(self):
        return (self.base, self.exponent)

    def __repr__(self):
        return f"IntPow({self.base!r}, {self.exponent})"


@dataclass(frozen=True, eq=False)
class Deriv(Expr):
    target: Expr
    var: Symbol
    order: int = 1

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("derivative order must be positive")

    def _fields(self):
        return (self.target, self.var, self.order)

    def sort_key(self):
        field, orders = split_derivative(self)
        return (1, field.name, tuple((v.sort_key(), k) for v, k in orders.items()))

    def __repr__(self):
        return f"Deriv({self.target!r}, {self.var.name}, {self.order})"


@dataclass(frozen=True, eq=False)
class Func(Expr):
    kind: str
    arg: Expr

    def __post_init__(self):
        if self.kind not in HYPERBOLIC_KINDS:
            raise ValueError(f"unsupported function {self.kind!r}")

    def _fields(self):
        return (self.kind, self.arg)

    def sort_key(self):
        return (2, HYPERBOLIC_KINDS.index(self.kind), to_text(self.arg))

    def __repr__(self):
        return f"Func({self.kind}, {self.arg!r})"


ZERO = Const(0)
ONE = Const(1)


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Const(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an expression")


def tanh(e) -> Func:
    return Func("tanh", as_expr(e))


def sech(e) -> Func:
    return Func("sech", as_expr(e))


def sinh(e) -> Func:
    return Func("sinh", as_expr(e))


def cosh(e) -> Func:
    return Func("cosh", as_expr(e))


def exp(e) -> Func:
    return Func("exp", as_expr(e))


# --- derivative atoms ---------------------------------------------------

def split_derivative(d: Expr) -> tuple[Symbol, dict]:
    """Return ``(field, {var: order})`` for a (possibly nested) derivative atom."""
    orders: dict = {}
    node = d
    while isinstance(node, Deriv):
        orders[node.var] = orders.get(node.var, 0) + node.order
        node = node.target
    if not (isinstance(node, Symbol) and node.kind is SymbolKind.FIELD):
        raise ValueError("not a field derivative atom")
    return node, dict(sorted(orders.items(), key=lambda kv: kv[0].sort_key()))


def make_derivative(field: Symbol, orders: Mapping) -> Expr:
    """Canonical nested derivative atom, innermost variable first in key order."""
    node: Expr = field
    for var, k in sorted(orders.items(), key=lambda kv: kv[0].sort_key()):
        if k:
            node = Deriv(node, var, k)
    return node


def is_field_atom(a) -> bool:
    if isinstance(a, Symbol):
        return a.kind is SymbolKind.FIELD
    if isinstance(a, Deriv):
        try:
            split_derivative(a)
        except ValueError:
            return False
        return True
    return False


# --- canonical form -----------------------------------------------------

@lru_cache(maxsize=65536)
def expand(e: Expr) -> Poly:
    """Expand ``e`` into a polynomial over atoms (exact, Laurent exponents allowed)."""
    if isinstance(e, Const):
        return Poly.const(e.value)
    if isinstance(e, Symbol):
        return Poly.atom(e)
    if isinstance(e, Sum):
        out = Poly()
        for t in e.terms:
            out = out + expand(t)
        return out
    if isinstance(e, Product):
        out = Poly.const(1)
        for f in e.factors:
            out = out * expand(f)
            if out.is_zero():
                break
        return out
    if isinstance(e, IntPow):
        base = expand(e.base)
        n = e.exponent
        if n >= 0:
            return base ** n
        if base.is_zero():
            raise ZeroDivisionError("negative power of zero")
        if base.is_monomial():
            return base ** n
        c, prim = base.primitive()
        return Poly.atom(poly_to_expr(prim), n).scale(c ** n)
    if isinstance(e, Deriv):
        target = expand(e.target)
        if target.is_monomial():
            (m, coeff), = target.terms.items()
            if coeff == 1 and len(m) == 1 and m[0][1] == 1 and is_field_atom(m[0][0]):
                field, orders = split_derivative(Deriv(m[0][0], e.var, e.order))
                return Poly.atom(make_derivative(field, orders))
        result = poly_to_expr(target)
        for _ in range(e.order):
            result = differentiate(result, e.var)
        return expand(result)
    if isinstance(e, Func):
        arg = normalize(e.arg)
        if arg == ZERO:
            return Poly.const({"tanh": 0, "sinh": 0}.get(e.kind, 1))
        return Poly.atom(Func(e.kind, arg))
    raise TypeError(f"unknown node {e!r}")


def poly_to_expr(p: Poly) -> Expr:
    """Render a polynomial over atoms as a canonical expression tree."""
    terms = []
    for m, c in p.sorted_terms():
        factors = []
        if c != 1 or not m:
            factors.append(Const(c))
        for atom, k in m:
            factors.append(atom if k == 1 else IntPow(atom, k))
        terms.append(factors[0] if len(factors) == 1 else Product(tuple(factors)))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return Sum(tuple(terms))


def normalize(e: Expr) -> Expr:
    """Canonical sum-of-products form; idempotent."""
    return poly_to_expr(expand(e))


# --- calculus -----------------------------------------------------------

def _d(e: Expr, var: Symbol) -> Expr:
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Symbol):
        if e == var:
            return ONE
        if e.kind is SymbolKind.FIELD and var.kind is SymbolKind.INDEPENDENT_VAR:
            return Deriv(e, var, 1)
        return ZERO
    if isinstance(e, Sum):
        return Sum(tuple(_d(t, var) for t in e.terms))
    if isinstance(e, Product):
        fs = e.factors
        return Sum(tuple(
            Product(fs[:i] + (_d(f, var),) + fs[i + 1:]) for i, f in enumerate(fs)
        ))
    if isinstance(e, IntPow):
        if e.exponent == 0:
            return ZERO
        return Product((Const(e.exponent), IntPow(e.base, e.exponent - 1), _d(e.base, var)))
    if isinstance(e, Deriv):
        if is_field_atom(e):
            return Deriv(e, var, 1)
        return _d(normalize(e), var)
    if isinstance(e, Func):
        inner = _d(e.arg, var)
        z = e.arg
        outer = {
            "tanh": lambda: IntPow(Func("sech", z), 2),
            "sech": lambda: Product((Const(-1), Func("sech", z), Func("tanh", z))),
            "sinh": lambda: Func("cosh", z),
            "cosh": lambda: Func("sinh", z),
            "exp": lambda: Func("exp", z),
        }[e.kind]()
        return Product((outer, inner))
    raise TypeError(f"unknown node {e!r}")


def differentiate(e: Expr, var: Symbol, order: int = 1) -> Expr:
    """Exact derivative of ``e`` with respect to ``var``, normalized."""
    out = e
    for _ in range(order):
        out = normalize(_d(out, var))
    return out


# --- substitution -------------------------------------------------------

def free_symbols(e: Expr) -> set:
    if isinstance(e, Symbol):
        return {e}
    if isinstance(e, Const):
        return set()
    if isinstance(e, (Sum, Product)):
        out = set()
        for c in e._fields():
            out |= free_symbols(c)
        return out
    if isinstance(e, IntPow):
        return free_symbols(e.base)
    if isinstance(e, Deriv):
        return free_symbols(e.target)
    if isinstance(e, Func):
        return free_symbols(e.arg)
    raise TypeError(f"unknown node {e!r}")


def _check_acyclic(bindings: Mapping[Symbol, Expr]) -> None:
    graph = {s: free_symbols(as_expr(v)) & set(bindings) for s, v in bindings.items()}
    state: dict = {}

    def visit(s):
        if state.get(s) == 1:
            raise CyclicBinding(f"cyclic binding through {s.name}")
        if state.get(s) == 2:
            return
        state[s] = 1
        for t in sorted(graph[s], key=lambda x: x.sort_key()):
            visit(t)
        state[s] = 2

    for s in sorted(graph, key=lambda x: x.sort_key()):
        visit(s)


def _replace(e: Expr, bindings: Mapping) -> Expr:
    if isinstance(e, Symbol):
        return as_expr(bindings.get(e, e))
    if isinstance(e, Const):
        return e
    if isinstance(e, Sum):
        return Sum(tuple(_replace(t, bindings) for t in e.terms))
    if isinstance(e, Product):
        return Product(tuple(_replace(t, bindings) for t in e.factors))
    if isinstance(e, IntPow):
        return IntPow(_replace(e.base, bindings), e.exponent)
    if isinstance(e, Deriv):
        return Deriv(_replace(e.target, bindings), e.var, e.order)
    if isinstance(e, Func):
        return Func(e.kind, _replace(e.arg, bindings))
    raise TypeError(f"unknown node {e!r}")


def substitute(e: Expr, bindings: Mapping[Symbol, object]) -> Expr:
    """Simultaneous substitution of symbols, followed by :func:`normalize`."""
    if not bindings:
        return normalize(e)
    _check_acyclic(bindings)
    return normalize(_replace(e, bindings))


def replace_atoms(e: Expr, fn) -> Expr:
    """Map every atom of the canonical form through ``fn(atom) -> Expr``."""
    return normalize(poly_to_expr(expand(e).map_atoms(lambda a: expand(as_expr(fn(a))))))


# --- numerics -----------------------------------------------------------

def _sech(z):
    a = np.abs(z)
    t = np.exp(-a)
    return 2.0 * t / (1.0 + t * t)


_NUMERIC = {
    "tanh": np.tanh,
    "sech": _sech,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "exp": np.exp,
}


def _eval(e: Expr, env: Mapping):
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, Symbol):
        try:
            return env[e]
        except KeyError:
            raise UnboundSymbol(f"no value bound for symbol {e.name!r}") from None
    if isinstance(e, Sum):
        out = 0.0
        for t in e.terms:
            out = out + _eval(t, env)
        return out
    if isinstance(e, Product):
        out = 1.0
        for f in e.factors:
            out = out * _eval(f, env)
        return out
    if isinstance(e, IntPow):
        b = _eval(e.base, env)
        if e.exponent >= 0:
            return b ** e.exponent
        return 1.0 / (b ** (-e.exponent))
    if isinstance(e, Deriv):
        if e in env:
            return env[e]
        raise UnboundSymbol(f"derivative {to_text(e)} has no numeric value")
    if isinstance(e, Func):
        return _NUMERIC[e.kind](_eval(e.arg, env))
    raise TypeError(f"unknown node {e!r}")


def eval_numeric(e: Expr, env: Mapping):
    """Evaluate ``e`` in IEEE doubles; env values may be floats or numpy arrays.

    Raises :class:`UnboundSymbol` for a missing symbol and
    :class:`NonFiniteResult` when the result contains inf or nan.
    """
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        try:
            value = _eval(e, env)
        except (ZeroDivisionError, OverflowError):
            raise NonFiniteResult(f"non-finite value while evaluating {to_text(e)}") from None
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteResult(f"non-finite value while evaluating {to_text(e)}")
    if arr.ndim == 0:
        return float(arr)
    return arr


# --- printing -----------------------------------------------------------

def _frac_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _atom_text(e: Expr) -> str:
    """Text for ``e`` used as a factor (wrapped when it would not bind)."""
    if isinstance(e, (Sum, Product)):
        return f"({to_text(e)})"
    if isinstance(e, Const) and (e.value < 0 or e.value.denominator != 1):
        return f"({_frac_text(e.value)})"
    if isinstance(e, IntPow) and e.exponent < 0:
        return f"({to_text(e)})"
    return to_text(e)


def _product_text(factors) -> str:
    coef = Fraction(1)
    num, den = [], []
    for f in factors:
        if isinstance(f, Const):
            coef *= f.value
        elif isinstance(f, IntPow) and f.exponent < 0:
            den.append(f.base if f.exponent == -1 else IntPow(f.base, -f.exponent))
        else:
            num.append(f)
    if coef == 0:
        return "0"
    sign = "-" if coef < 0 else ""
    coef = abs(coef)
    num_parts = ([str(coef.numerator)] if coef.numerator != 1 or not num else [])
    num_parts += [_atom_text(f) for f in num]
    den_parts = ([str(coef.denominator)] if coef.denominator != 1 else [])
    den_parts += [_atom_text(f) for f in den]
    text = sign + "*".join(num_parts)
    if den_parts:
        d = "*".join(den_parts)
        text += "/" + (d if len(den_parts) == 1 else f"({d})")
    return text


def to_text(e: Expr) -> str:
    """Render in the equation DSL syntax (re-parseable)."""
    if isinstance(e, Const):
        return _frac_text(e.value)
    if isinstance(e, Symbol):
        return e.name
    if isinstance(e, Sum):
        if not e.terms:
            return "0"
        parts = [to_text(e.terms[0])]
        for t in e.terms[1:]:
            s = to_text(t)
            if s.startswith("-"):
                parts.append(f" - {s[1:]}")
            else:
                parts.append(f" + {s}")
        return "".join(parts)
    if isinstance(e, Product):
        return _product_text(e.factors)
    if isinstance(e, IntPow):
        if e.exponent < 0:
            return _product_text((e,))
        return f"{_atom_text(e.base)}^{e.exponent}"
    if isinstance(e, Deriv):
        if isinstance(e.target, Symbol) and e.var.name == "xi":
            return e.target.name + "'" * e.order
        inner = to_text(e.target)
        for _ in range(e.order):
            inner = f"d{e.var.name}({inner})"
        return inner
    if isinstance(e, Func):
        return f"{e.kind}({to_text(e.arg)})"
    raise TypeError(f"unknown node {e!r}")
