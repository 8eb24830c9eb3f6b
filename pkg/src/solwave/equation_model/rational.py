"""Rational functions ``num / prod(f_i^m_i)`` over :class:`Poly`.

Denominators are kept as a multiset of primitive factors so that
cancellation only needs exact division, never a multivariate gcd.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping

from .polynomial import Poly

Factorizer = Callable[[Poly], tuple]


def simple_factors(p: Poly) -> tuple[Fraction, list]:
    """``p == c * prod(f**m)`` using only rational and monomial content."""
    if p.is_zero():
        raise ZeroDivisionError("zero polynomial has no factorization")
    c, prim = p.primitive()
    out = []
    mono = prim.monomial_content()
    if mono:
        out.extend((Poly.atom(a), e) for a, e in mono)
        prim = prim.mul_monomial(tuple((a, -e) for a, e in mono))
        c2, prim = prim.primitive()
        c *= c2
    if prim.is_constant():
        c *= prim.constant_value()
    else:
        out.append((prim, 1))
    return c, out


def _factor_key(f: Poly):
    return (f.total_degree(), len(f.terms), str(f))


class RationalFunction:
    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Mapping[Poly, int] | None = None):
        den = {f: m for f, m in (den or {}).items() if m}
        if num.is_zero():
            den = {}
        for f in sorted(den, key=_factor_key):
            m = den[f]
            while m:
                q = num.div_exact(f)
                if q is None:
                    break
                num, m = q, m - 1
            den[f] = m
        self.num = num
        self.den = {f: den[f] for f in sorted(den, key=_factor_key) if den[f]}

    @classmethod
    def from_poly(cls, p) -> "RationalFunction":
        if isinstance(p, RationalFunction):
            return p
        if not isinstance(p, Poly):
            p = Poly.const(p)
        return cls(p)

    @classmethod
    def quotient(cls, num: Poly, den: Poly, factorize: Factorizer = simple_factors) -> "RationalFunction":
        c, fs = factorize(den)
        d: dict = {}
        for f, m in fs:
            d[f] = d.get(f, 0) + m
        return cls(num.scale(1 / c), d)

    def denominator(self) -> Poly:
        out = Poly.const(1)
        for f, m in self.den.items():
            out = out * f ** m
        return out

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return not self.den

    def variables(self) -> set:
        out = self.num.variables()
        for f in self.den:
            out |= f.variables()
        return out

    # arithmetic
    def __add__(self, other) -> "RationalFunction":
        other = RationalFunction.from_poly(other)
        lcm = dict(self.den)
        for f, m in other.den.items():
            lcm[f] = max(lcm.get(f, 0), m)
        a = self.num
        for f, m in lcm.items():
            a = a * f ** (m - self.den.get(f, 0))
        b = other.num
        for f, m in lcm.items():
            b = b * f ** (m - other.den.get(f, 0))
        return RationalFunction(a + b, lcm)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other) -> "RationalFunction":
        return self + (-RationalFunction.from_poly(other))

    def __mul__(self, other) -> "RationalFunction":
        other = RationalFunction.from_poly(other)
        den = dict(self.den)
        for f, m in other.den.items():
            den[f] = den.get(f, 0) + m
        return RationalFunction(self.num * other.num, den)

    __rmul__ = __mul__

    def divide(self, other, factorize: Factorizer = simple_factors) -> "RationalFunction":
        other = RationalFunction.from_poly(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        c, fs = factorize(other.num)
        den = dict(self.den)
        for f, m in fs:
            den[f] = den.get(f, 0) + m
        return RationalFunction((self.num * other.denominator()).scale(1 / c), den)

    def __pow__(self, n: int) -> "RationalFunction":
        out = RationalFunction(Poly.const(1))
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            other = RationalFunction.from_poly(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num * other.denominator() == other.num * self.denominator()

    def __hash__(self):
        raise TypeError("RationalFunction is not hashable")

    # substitution
    def subs1(self, x, r: "RationalFunction", factorize: Factorizer = simple_factors) -> "RationalFunction":
        """Substitute ``x -> r``."""
        r = RationalFunction.from_poly(r)
        out = poly_subs1(self.num, x, r)
        for f, m in self.den.items():
            if x in f.variables():
                out = out.divide(poly_subs1(f, x, r) ** m, factorize)
            else:
                out = RationalFunction(out.num, {**out.den, f: out.den.get(f, 0) + m})
        return out

    def evaluate(self, env):
        val = self.num.evaluate(env)
        for f, m in self.den.items():
            val = val / f.evaluate(env) ** m
        return val

    def evaluate_exact(self, env) -> Fraction:
        val = self.num.evaluate_exact(env)
        for f, m in self.den.items():
            val = val / f.evaluate_exact(env) ** m
        return val

    def to_expr(self):
        from .expression import IntPow, Product, normalize, poly_to_expr

        factors = [poly_to_expr(self.num)]
        for f, m in self.den.items():
            factors.append(IntPow(poly_to_expr(f), -m))
        return normalize(Product(tuple(factors)))

    def __str__(self):
        if not self.den:
            return str(self.num)
        from .expression import to_text

        return to_text(self.to_expr())

    def __repr__(self):
        return f"RationalFunction({self})"


def poly_subs1(p: Poly, x, r: RationalFunction) -> RationalFunction:
    """``p(x -> r)`` as a rational function, using one common denominator."""
    coeffs = p.coefficients(x)
    if not coeffs:
        return RationalFunction(p)
    top = max(coeffs)
    if top == 0:
        return RationalFunction(p)
    if top < 0 or min(coeffs) < 0:
        raise ValueError("cannot substitute into negative powers")
    d = r.denominator()
    num = Poly()
    for j, c in coeffs.items():
        num = num + c * r.num ** j * d ** (top - j)
    return RationalFunction(num, {f: m * top for f, m in r.den.items()})
