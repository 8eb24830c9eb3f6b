"""Sparse multivariate (Laurent) polynomials with exact rational coefficients.

Variables are arbitrary hashable atoms exposing ``sort_key()``; the
expression core uses symbols, derivative atoms and function atoms, the
solver only symbols. Monomials are tuples of ``(atom, exponent)`` pairs
sorted by atom key, so equal polynomials always have equal term maps.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Mapping

Monomial = tuple  # tuple[tuple[atom, int], ...]

ONE_MONO: Monomial = ()


@lru_cache(maxsize=None)
def _akey(atom):
    return atom.sort_key()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for atom, e in b:
        s = exps.get(atom, 0) + e
        if s:
            exps[atom] = s
        else:
            exps.pop(atom, None)
    return tuple(sorted(exps.items(), key=lambda ae: _akey(ae[0])))


def _mono_pow(a: Monomial, n: int) -> Monomial:
    if n == 0:
        return ONE_MONO
    return tuple((atom, e * n) for atom, e in a)


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_key(m: Monomial):
    """Deterministic ordering key for display: by degree, then atoms."""
    return (mono_degree(m), tuple((_akey(a), e) for a, e in m))


class Poly:
    """Immutable sparse polynomial ``{monomial: Fraction}``."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = Fraction(c)
        self.terms = clean
        self._hash = None

    # construction ------------------------------------------------------
    @classmethod
    def const(cls, c) -> "Poly":
        return cls({ONE_MONO: Fraction(c)})

    @classmethod
    def atom(cls, a, exp: int = 1) -> "Poly":
        return cls({((a, exp),): Fraction(1)})

    @classmethod
    def from_monomial(cls, m: Monomial, c=1) -> "Poly":
        return cls({m: Fraction(c)})

    # predicates --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and ONE_MONO in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get(ONE_MONO, Fraction(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def variables(self) -> set:
        return {a for m in self.terms for a, _ in m}

    def sorted_variables(self) -> list:
        return sorted(self.variables(), key=_akey)

    def has_negative_exponents(self) -> bool:
        return any(e < 0 for m in self.terms for _, e in m)

    # arithmetic --------------------------------------------------------
    def __add__(self, other) -> "Poly":
        other = _coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Poly":
        return _coerce(other) - self

    def __mul__(self, other) -> "Poly":
        other = _coerce(other)
        if not self.terms or not other.terms:
            return Poly()
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            if len(self.terms) != 1:
                raise ValueError("negative power of a non-monomial polynomial")
            (m, c), = self.terms.items()
            return Poly({_mono_pow(m, n): Fraction(c) ** n})
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        return Poly({m: v * c for m, v in self.terms.items()})

    def mul_monomial(self, mono: Monomial, c=1) -> "Poly":
        c = Fraction(c)
        return Poly({_mono_mul(m, mono): v * c for m, v in self.terms.items()})

    # comparison --------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # structure ---------------------------------------------------------
    def degree(self, var) -> int:
        return max((dict(m).get(var, 0) for m in self.terms), default=0)

    def min_degree(self, var) -> int:
        return min((dict(m).get(var, 0) for m in self.terms), default=0)

    def total_degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=0)

    def coefficients(self, var) -> dict[int, "Poly"]:
        """Split into ``{k: coeff}`` with ``self = sum coeff * var**k``."""
        buckets: dict[int, dict] = {}
        for m, c in self.terms.items():
            k = 0
            rest = []
            for a, e in m:
                if a == var:
                    k = e
                else:
                    rest.append((a, e))
            buckets.setdefault(k, {})[tuple(rest)] = c
        return {k: Poly(t) for k, t in sorted(buckets.items())}

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda mc: mono_key(mc[0]))

    def subs(self, mapping: Mapping) -> "Poly":
        """Simultaneous substitution ``atom -> Poly`` (non-negative powers)."""
        if not mapping:
            return self
        out = Poly()
        cache: dict = {}
        for m, c in self.terms.items():
            term = Poly({(): c})
            rest = []
            for a, e in m:
                if a in mapping:
                    key = (a, e)
                    if key not in cache:
                        cache[key] = _coerce(mapping[a]) ** e
                    term = term * cache[key]
                else:
                    rest.append((a, e))
            out = out + term.mul_monomial(tuple(rest))
        return out

    def map_atoms(self, fn) -> "Poly":
        """Replace every atom ``a`` by the polynomial ``fn(a)``."""
        out = Poly()
        for m, c in self.terms.items():
            term = Poly.const(c)
            for a, e in m:
                term = term * (_coerce(fn(a)) ** e)
            out = out + term
        return out

    def evaluate(self, env: Mapping):
        total = 0
        for m, c in self.terms.items():
            t = float(c) if not isinstance(c, float) else c
            for a, e in m:
                t = t * env[a] ** e
            total = total + t
        return total

    def evaluate_exact(self, env: Mapping) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for a, e in m:
                t *= Fraction(env[a]) ** e
            total += t
        return total

    # normal forms ------------------------------------------------------
    def leading_term(self, order: list | None = None):
        """Leading ``(monomial, coeff)`` in lex order over ``order``."""
        if order is None:
            order = self.sorted_variables()
        best = None
        best_key = None
        for m, c in self.terms.items():
            d = dict(m)
            key = tuple(d.get(v, 0) for v in order)
            if best_key is None or key > best_key:
                best, best_key = (m, c), key
        return best

    def content(self) -> Fraction:
        """Positive rational content: gcd of numerators over lcm of denominators."""
        if not self.terms:
            return Fraction(0)
        nums = [c.numerator for c in self.terms.values()]
        dens = [c.denominator for c in self.terms.values()]
        g = reduce(math.gcd, nums)
        lcm = reduce(lambda a, b: a * b // math.gcd(a, b), dens)
        return Fraction(abs(g), lcm)

    def primitive(self) -> tuple[Fraction, "Poly"]:
        """Return ``(c, p)`` with ``self == c * p``, ``p`` integral, coprime,
        and with positive leading coefficient."""
        if not self.terms:
            return Fraction(0), self
        c = self.content()
        _, lc = self.leading_term()
        if lc < 0:
            c = -c
        return c, self.scale(1 / c)

    def monomial_content(self) -> Monomial:
        if not self.terms:
            return ONE_MONO
        vars_ = self.variables()
        out = []
        for v in sorted(vars_, key=_akey):
            lo = min(dict(m).get(v, 0) for m in self.terms)
            if lo:
                out.append((v, lo))
        return tuple(out)

    def div_exact(self, other: "Poly") -> "Poly | None":
        """Exact multivariate division; ``None`` if ``other`` does not divide."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return Poly()
        order = sorted(self.variables() | other.variables(), key=_akey)
        lm_d, lc_d = other.leading_term(order)
        ld = dict(lm_d)
        rem = self
        quot = Poly()
        for _ in range(10_000):
            if rem.is_zero():
                return quot
            lm_r, lc_r = rem.leading_term(order)
            lr = dict(lm_r)
            q_exp = {}
            for v in set(lr) | set(ld):
                e = lr.get(v, 0) - ld.get(v, 0)
                if e < 0:
                    return None
                if e:
                    q_exp[v] = e
            q_mono = tuple(sorted(q_exp.items(), key=lambda ae: _akey(ae[0])))
            t = Poly({q_mono: lc_r / lc_d})
            quot = quot + t
            rem = rem - other * t
        return None

    def sqrt(self) -> "Poly | None":
        """Exact square root if ``self`` is a perfect square, else ``None``."""
        if self.is_zero():
            return Poly()
        order = self.sorted_variables()
        lm, lc = self.leading_term(order)
        if lc < 0 or any(e % 2 for _, e in lm):
            return None
        r = _fraction_sqrt(lc)
        if r is None:
            return None
        lead_m, lead_c = tuple((a, e // 2) for a, e in lm), r
        root = Poly({lead_m: r})
        rem = self - root * root
        for _ in range(1000):
            if rem.is_zero():
                return root
            m, c = rem.leading_term(order)
            d = dict(m)
            q = {}
            for v in set(d) | {a for a, _ in lead_m}:
                e = d.get(v, 0) - dict(lead_m).get(v, 0)
                if e < 0:
                    return None
                if e:
                    q[v] = e
            t = Poly({tuple(sorted(q.items(), key=lambda ae: _akey(ae[0]))): c / (2 * lead_c)})
            rem = rem - (root * t).scale(2) - t * t
            root = root + t
        return None

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        from .expression import poly_to_expr, to_text

        return to_text(poly_to_expr(self))


def _fraction_sqrt(c: Fraction) -> Fraction | None:
    if c < 0:
        return None
    n, d = c.numerator, c.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _coerce(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Poly")


def poly_sum(items: Iterable[Poly]) -> Poly:
    out = Poly()
    for p in items:
        out = out + p
    return out


def poly_product(items: Iterable[Poly]) -> Poly:
    out = Poly.const(1)
    for p in items:
        out = out * p
    return out
