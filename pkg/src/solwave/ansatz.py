"""Hyperbolic ansatz, exponential rewriting and coefficient collection.

The ansatz ``sum_i U_i tanh^i(C1 xi) + V_i sech^i(C1 xi) + V0`` is
substituted into the integrated equation; with ``E = exp(C1 xi)`` every
hyperbolic factor becomes a rational function of ``E`` with denominators
that are powers of ``1 + E^2`` and ``E``. Multiplying by the smallest
``(1 + E^2)^d E^q`` leaves a polynomial in ``E`` whose coefficients must
all vanish.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .equation_model import (
    Const,
    Expr,
    Func,
    Poly,
    Symbol,
    SymbolKind,
    differentiate,
    expand,
    normalize,
    poly_to_expr,
)
from .equation_model.expression import is_field_atom, split_derivative
from .errors import AnsatzOrderUndetermined, EmptySystem, MixedScales
from .reduction import XI, TravelingOde, field_degree_profile


def _unknown(name: str) -> Symbol:
    return Symbol(name, SymbolKind.ANSATZ_UNKNOWN)


@dataclass(frozen=True)
class AnsatzSpec:
    order: int
    U: tuple
    V: tuple
    V0: Symbol
    scale: Symbol
    wave_speed: Symbol
    xi: Symbol = XI
    phase: Fraction = Fraction(0)

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("ansatz order must be at least 1")
        names = [s.name for s in (*self.U, *self.V, self.V0, self.scale)]
        if len(set(names)) != len(names):
            raise ValueError("ansatz unknowns must be distinct")

    @classmethod
    def default(cls, order: int, wave_speed: Symbol, xi: Symbol = XI, phase=0) -> "AnsatzSpec":
        return cls(
            order=order,
            U=tuple(_unknown(f"U{i}") for i in range(1, order + 1)),
            V=tuple(_unknown(f"V{i}") for i in range(1, order + 1)),
            V0=_unknown("V0"),
            scale=_unknown("C1"),
            wave_speed=wave_speed,
            xi=xi,
            phase=Fraction(phase),
        )

    @property
    def unknowns(self) -> tuple:
        return (*self.U, *self.V, self.V0, self.scale)

    def argument(self) -> Expr:
        if self.phase:
            return self.scale * (self.xi + Const(self.phase))
        return self.scale * self.xi


def balance_order(ode: TravelingOde) -> int:
    """Ansatz order from balancing the highest derivative against the leading nonlinearity.

    Each factor ``u`` contributes ``n`` to the tanh-degree and each
    derivative adds one. A linear equation gets order 1.
    """
    terms = field_degree_profile(ode)
    if not terms:
        raise AnsatzOrderUndetermined("equation does not involve the field")
    if max(t[0] for t in terms) < 2:
        return 1
    top = max(t[2] for t in terms)
    hd = min((t for t in terms if t[2] == top), key=lambda t: (t[0], -t[1]))
    nonlinear = [t for t in terms if t[0] >= 2 and t != hd]
    if not nonlinear:
        raise AnsatzOrderUndetermined("no nonlinear term to balance against")
    nl = max(nonlinear, key=lambda t: (t[0], t[1]))
    # hd: a1*n + b1, nl: a2*n + b2
    a1, b1 = hd[0], hd[1]
    a2, b2 = nl[0], nl[1]
    if a1 == a2:
        raise AnsatzOrderUndetermined("balanced terms have equal field degree")
    n = Fraction(b2 - b1, a1 - a2)
    if n.denominator != 1 or n <= 0:
        raise AnsatzOrderUndetermined(f"balancing gives n = {n}, not a positive integer")
    return int(n)


def build_ansatz(spec: AnsatzSpec) -> Expr:
    z = spec.argument()
    e: Expr = spec.V0
    for i, (U, V) in enumerate(zip(spec.U, spec.V), start=1):
        e = e + U * Func("tanh", z) ** i + V * Func("sech", z) ** i
    return normalize(e)


def substitute_ansatz(ode: TravelingOde, spec: AnsatzSpec) -> Expr:
    """Replace ``u`` and its xi-derivatives by the ansatz and its exact derivatives."""
    profile = build_ansatz(spec)
    derivs: dict[int, Expr] = {0: profile}

    def nth(k: int) -> Expr:
        if k not in derivs:
            derivs[k] = differentiate(nth(k - 1), ode.xi)
        return derivs[k]

    p = expand(ode.lhs)

    def swap(a):
        if is_field_atom(a):
            if isinstance(a, Symbol):
                return expand(nth(0))
            _, orders = split_derivative(a)
            return expand(nth(orders.get(ode.xi, 0)))
        return Poly.atom(a)

    return poly_to_expr(p.map_atoms(swap))


# --- exponential form -----------------------------------------------------

# Each hyperbolic power maps to (numerator Laurent poly in E, power of (1+E^2) in the denominator).
def _laurent_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return {k: v for k, v in out.items() if v}


def _laurent_pow(a: dict, n: int) -> dict:
    out = {0: Fraction(1)}
    for _ in range(n):
        out = _laurent_mul(out, a)
    return out


_ONE_PLUS_E2 = {0: Fraction(1), 2: Fraction(1)}
_E2_MINUS_ONE = {0: Fraction(-1), 2: Fraction(1)}


def _hyperbolic_shape(kind: str, power: int, mult: int) -> tuple[dict, int]:
    """``(numerator, d)`` with ``kind(mult*z)^power = numerator / (1+E^2)^d`` (d may be < 0)."""
    if kind == "exp":
        return {mult * power: Fraction(1)}, 0
    if mult != 1:
        raise MixedScales(f"{kind} with argument multiple {mult} is not supported")
    n = abs(power)
    if kind == "tanh":
        if power < 0:
            raise MixedScales("negative powers of tanh are not supported")
        return _laurent_pow(_E2_MINUS_ONE, n), n
    if kind == "sech":
        if power >= 0:
            return {n: Fraction(2) ** n}, n
        return {-n: Fraction(1, 2 ** n)}, -n
    if kind == "cosh":
        if power >= 0:
            return {-n: Fraction(1, 2 ** n)}, -n
        return {n: Fraction(2) ** n}, n
    if kind == "sinh":
        if power < 0:
            raise MixedScales("negative powers of sinh are not supported")
        num = _laurent_pow(_E2_MINUS_ONE, n)
        return {k - n: v / 2 ** n for k, v in num.items()}, 0
    raise MixedScales(f"unsupported function {kind}")


@dataclass(frozen=True)
class ExpPolynomial:
    """``sum_k terms[k] * E^k`` with ``E = exp(scale * (xi + phase))``.

    ``multiplier = (d, q)`` records that this polynomial equals the source
    expression times ``(1 + E^2)^d * E^q``. ``term_shapes`` keeps, per source
    monomial, the ``(1+E^2)`` denominator power and lowest E exponent before
    clearing, for minimality checks.
    """

    terms: dict
    scale: Symbol
    xi: Symbol
    multiplier: tuple
    phase: Fraction = Fraction(0)
    term_shapes: tuple = field(default=(), compare=False)

    def evaluate(self, env, xi_value):
        E = _np_exp(env[self.scale] * (xi_value + float(self.phase)))
        total = 0.0
        for k, coeff in self.terms.items():
            total = total + coeff.evaluate(env) * E ** k
        return total

    def evaluate_terms(self, env, xi_value) -> list:
        E = _np_exp(env[self.scale] * (xi_value + float(self.phase)))
        return [coeff.evaluate(env) * E ** k for k, coeff in self.terms.items()]

    def multiplier_value(self, env, xi_value):
        E = _np_exp(env[self.scale] * (xi_value + float(self.phase)))
        d, q = self.multiplier
        return (1 + E * E) ** d * E ** q

    def degree_range(self) -> tuple[int, int]:
        ks = list(self.terms)
        return (min(ks), max(ks)) if ks else (0, 0)


def _np_exp(x):
    return np.exp(x)


def _match_argument(arg: Expr, scale: Symbol | None, xi: Symbol, phase: Fraction):
    """Return ``(scale, multiple)`` when ``arg == m*scale*(xi + phase)``."""
    p = expand(arg)
    xi_terms = {m: c for m, c in p.terms.items() if any(a == xi for a, _ in m)}
    if len(xi_terms) != 1:
        raise MixedScales(f"argument {arg} is not a single scale times xi")
    (mono, coef), = xi_terms.items()
    rest = [(a, e) for a, e in mono if a != xi]
    if dict(mono)[xi] != 1 or len(rest) != 1 or rest[0][1] != 1 or coef.denominator != 1:
        raise MixedScales(f"argument {arg} is not an integer multiple of C1*xi")
    s = rest[0][0]
    if scale is not None and s != scale:
        raise MixedScales(f"two distinct scales {scale.name} and {s.name}")
    expected = {mono: coef}
    if phase:
        expected[((s, 1),)] = coef * phase
    if p.terms != expected:
        raise MixedScales(f"argument {arg} has an unexpected phase")
    return s, int(coef)


def to_exponential(e: Expr, scale: Symbol | None = None, xi: Symbol = XI,
                   min_d: int = 0, phase=0) -> ExpPolynomial:
    """Rewrite hyperbolic functions of ``scale*xi`` in ``E`` and clear denominators."""
    phase = Fraction(phase)
    p = expand(e)
    pieces = []  # (coefficient Poly, numerator Laurent dict, d)
    for mono, c in p.sorted_terms():
        coef_mono = []
        num = {0: Fraction(1)}
        d = 0
        for a, k in mono:
            if isinstance(a, Func):
                scale, mult = _match_argument(a.arg, scale, xi, phase)
                shape, dd = _hyperbolic_shape(a.kind, k, mult)
                num = _laurent_mul(num, shape)
                d += dd
            elif a == xi:
                raise MixedScales("bare xi outside a hyperbolic function")
            else:
                coef_mono.append((a, k))
        if d < 0:
            num = _laurent_mul(num, _laurent_pow(_ONE_PLUS_E2, -d))
            d = 0
        pieces.append((Poly({tuple(coef_mono): c}), num, d))
    if scale is None:
        raise MixedScales("expression has no hyperbolic factor to fix the scale")
    D = max([min_d] + [d for _, _, d in pieces])
    cleared = []
    shapes = []
    for coef, num, d in pieces:
        full = _laurent_mul(num, _laurent_pow(_ONE_PLUS_E2, D - d))
        cleared.append((coef, full))
        shapes.append((d, min(num) if num else 0))
    lowest = min((min(f) for _, f in cleared if f), default=0)
    Q = max(0, -lowest)
    terms: dict[int, Poly] = {}
    for coef, full in cleared:
        for k, v in full.items():
            terms[k + Q] = terms.get(k + Q, Poly()) + coef.scale(v)
    terms = {k: terms[k] for k in sorted(terms) if not terms[k].is_zero()}
    return ExpPolynomial(terms=terms, scale=scale, xi=xi, multiplier=(D, Q), phase=phase,
                         term_shapes=tuple(shapes))


# --- algebraic system -----------------------------------------------------

@dataclass(frozen=True)
class AlgebraicSystem:
    """Polynomial equations ``P = 0`` in ``unknowns`` with symbolic ``parameters``.

    ``sources[i]`` lists the E-exponents whose coefficients reduced to
    equation ``i``; ``assumptions`` are polynomials known to be nonzero.
    """

    equations: tuple
    unknowns: tuple
    parameters: tuple
    sources: tuple = ()
    assumptions: tuple = ()
    spec: AnsatzSpec | None = None

    def __len__(self):
        return len(self.equations)

    def lines(self) -> list[str]:
        out = []
        for i, eq in enumerate(self.equations):
            src = ",".join(str(k) for k in self.sources[i]) if self.sources else "?"
            out.append(f"[E^{src}] {eq} = 0")
        return out


def _clear_laurent(p: Poly) -> Poly:
    """Multiply by the monomial that removes negative exponents (nonzero parameters)."""
    shift = []
    for a in p.sorted_variables():
        lo = p.min_degree(a)
        if lo < 0:
            shift.append((a, -lo))
    return p.mul_monomial(tuple(shift)) if shift else p


def collect_system(ep: ExpPolynomial, unknowns, parameters=None, spec: AnsatzSpec | None = None) -> AlgebraicSystem:
    """One equation per E-exponent; proportional duplicates merged with their sources kept."""
    unknowns = tuple(unknowns)
    eqs: list[Poly] = []
    sources: list[list[int]] = []
    for k, coeff in ep.terms.items():
        if coeff.is_zero():
            continue
        _, prim = _clear_laurent(coeff).primitive()
        for i, existing in enumerate(eqs):
            if existing == prim:
                sources[i].append(k)
                break
        else:
            eqs.append(prim)
            sources.append([k])
    if not eqs:
        raise EmptySystem("every coefficient vanishes identically")
    used = set()
    for eq in eqs:
        used |= eq.variables()
    if parameters is None:
        parameters = tuple(sorted(used - set(unknowns), key=lambda s: s.sort_key()))
    assumptions = (Poly.atom(ep.scale),) if ep.scale in unknowns else ()
    return AlgebraicSystem(
        equations=tuple(eqs),
        unknowns=unknowns,
        parameters=tuple(parameters),
        sources=tuple(tuple(s) for s in sources),
        assumptions=assumptions,
        spec=spec,
    )


def system_unknowns(ode: TravelingOde, spec: AnsatzSpec) -> tuple:
    """Solve order: integration constant, wave speed, then the ansatz unknowns."""
    out = []
    if ode.integration_constant is not None:
        out.append(ode.integration_constant)
    out.append(spec.wave_speed)
    out.extend(spec.unknowns)
    return tuple(out)


def ansatz_system(ode: TravelingOde, order: int | None = None, phase=0):
    """Convenience: balance, substitute, rewrite and collect in one call.

    Returns ``(spec, substituted expression, ExpPolynomial, AlgebraicSystem)``.
    """
    n = order if order is not None else balance_order(ode)
    spec = AnsatzSpec.default(n, ode.wave_speed, ode.xi, phase=phase)
    expr = substitute_ansatz(ode, spec)
    ep = to_exponential(expr, spec.scale, spec.xi, phase=spec.phase)
    system = collect_system(ep, system_unknowns(ode, spec), spec=spec)
    return spec, expr, ep, system


__all__ = [
    "AlgebraicSystem", "AnsatzSpec", "ExpPolynomial", "ansatz_system", "balance_order",
    "build_ansatz", "collect_system", "substitute_ansatz", "system_unknowns",
    "to_exponential",
]
