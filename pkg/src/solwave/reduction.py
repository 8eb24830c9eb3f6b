"""Traveling-wave reduction ``xi = x - v t`` and exact once-integration."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .equation_model import (
    Const,
    Expr,
    PdeEquation,
    Poly,
    Symbol,
    SymbolKind,
    expand,
    make_derivative,
    normalize,
    poly_to_expr,
    split_derivative,
    substitute,
)
from .equation_model.expression import Deriv, is_field_atom
from .errors import NonAutonomousEquation, NotExactlyIntegrable, NotIntegrated

XI = Symbol("xi", SymbolKind.INDEPENDENT_VAR)
WAVE_SPEED = Symbol("v", SymbolKind.WAVE_SPEED)
INTEGRATION_CONSTANT = Symbol("C", SymbolKind.INTEGRATION_CONSTANT)


@dataclass(frozen=True)
class TravelingOde:
    """Reduced equation ``lhs = 0`` in ``u(xi)``.

    When ``integrated`` is set the integration constant has been moved to
    the left, so ``lhs`` contains the term ``-C`` (unless the constant was
    pinned to zero by :func:`specialize_constant_zero`).
    """

    lhs: Expr
    field: Symbol
    xi: Symbol = XI
    wave_speed: Symbol = WAVE_SPEED
    integrated: bool = False
    integration_constant: Symbol | None = None
    constant_pinned_zero: bool = False
    parameters: tuple = ()

    @property
    def unintegrated(self) -> bool:
        return not self.integrated

    def __str__(self):
        return f"{self.lhs} = 0"


def traveling_wave_reduce(pde: PdeEquation, v: Symbol = WAVE_SPEED, xi: Symbol = XI) -> TravelingOde:
    """Replace d/dt by -v d/dxi and d/dx by d/dxi in every field derivative."""
    x, t = pde.space_var, pde.time_var
    minus_v = Poly.atom(v).scale(-1)

    def reduce_atom(a):
        if a in (x, t):
            raise NonAutonomousEquation(f"equation depends explicitly on {a.name}")
        if isinstance(a, Deriv) and is_field_atom(a):
            field, orders = split_derivative(a)
            unknown = set(orders) - {x, t}
            if unknown:
                raise NonAutonomousEquation("derivative in an unknown variable")
            nx, nt = orders.get(x, 0), orders.get(t, 0)
            return (minus_v ** nt) * Poly.atom(make_derivative(field, {xi: nx + nt}))
        return Poly.atom(a)

    lhs = poly_to_expr(expand(pde.lhs).map_atoms(reduce_atom))
    return TravelingOde(lhs=lhs, field=pde.field, xi=xi, wave_speed=v, parameters=tuple(pde.parameters))


def _xi_order(atom, xi) -> int:
    if isinstance(atom, Symbol):
        return 0
    _, orders = split_derivative(atom)
    return orders.get(xi, 0)


def integrate_once(ode: TravelingOde, C: Symbol = INTEGRATION_CONSTANT) -> TravelingOde:
    """Term-wise antiderivative in xi, stored as ``F - C = 0``.

    Accepted terms are ``c * u^(j)`` with ``j >= 1`` and ``c * u^k * u'``;
    anything else raises :class:`NotExactlyIntegrable`.
    """
    if ode.integrated:
        raise ValueError("equation is already integrated")
    xi = ode.xi
    u = ode.field
    out = Poly()
    for mono, coef in expand(ode.lhs).terms.items():
        field_part = [(a, e) for a, e in mono if is_field_atom(a)]
        rest = tuple((a, e) for a, e in mono if not is_field_atom(a))
        if any(a == xi for a, _ in rest):
            raise NotExactlyIntegrable(poly_to_expr(Poly({mono: coef})))
        derivs = [(a, e) for a, e in field_part if _xi_order(a, xi) > 0]
        plain = sum(e for a, e in field_part if _xi_order(a, xi) == 0)
        base = Poly({rest: coef})
        if len(derivs) == 1 and derivs[0][1] == 1:
            atom = derivs[0][0]
            j = _xi_order(atom, xi)
            if plain == 0:
                lower = u if j == 1 else make_derivative(u, {xi: j - 1})
                out = out + base * Poly.atom(lower)
                continue
            if j == 1:
                k = plain
                out = out + base * Poly.atom(u, k + 1).scale(Fraction(1, k + 1))
                continue
        raise NotExactlyIntegrable(poly_to_expr(Poly({mono: coef})))
    lhs = poly_to_expr(out - Poly.atom(C))
    return replace(ode, lhs=lhs, integrated=True, integration_constant=C)


def specialize_constant_zero(ode: TravelingOde) -> TravelingOde:
    """Copy of an integrated equation with the integration constant set to 0."""
    if not ode.integrated or ode.integration_constant is None:
        raise NotIntegrated("equation has no integration constant to specialize")
    lhs = substitute(ode.lhs, {ode.integration_constant: Const(0)})
    return replace(ode, lhs=lhs, integration_constant=None, constant_pinned_zero=True)


def field_degree_profile(ode: TravelingOde) -> list[tuple[int, int, int]]:
    """Per field-carrying term: ``(u-degree, summed derivative order, highest order)``."""
    out = []
    for mono in sorted(expand(ode.lhs).terms, key=lambda m: str(m)):
        deg = dsum = dmax = 0
        for a, e in mono:
            if is_field_atom(a):
                j = _xi_order(a, ode.xi)
                deg += e
                dsum += j * e
                dmax = max(dmax, j)
        if deg:
            out.append((deg, dsum, dmax))
    return out


__all__ = [
    "INTEGRATION_CONSTANT", "TravelingOde", "WAVE_SPEED", "XI", "field_degree_profile",
    "integrate_once", "specialize_constant_zero", "traveling_wave_reduce",
]
