import numpy as np
import pytest

from solwave.corpus import CORPUS, DRP_FORWARD
from solwave.equation_model import (
    Const,
    Symbol,
    SymbolKind,
    differentiate,
    eval_numeric,
    expand,
    normalize,
    parse_equation,
    parse_expression,
    substitute,
)
from solwave.errors import NonAutonomousEquation, NotExactlyIntegrable, NotIntegrated
from solwave.reduction import (
    INTEGRATION_CONSTANT,
    XI,
    field_degree_profile,
    integrate_once,
    specialize_constant_zero,
    traveling_wave_reduce,
)


def ode_text(text):
    return normalize(parse_expression(text))


def test_burgers_reduction(burgers):
    ode = traveling_wave_reduce(burgers)
    assert ode.lhs == ode_text("-v*u' + u*u' - nu*u''")
    assert not ode.integrated


def test_drp_reduction_matches_reduced_form(drp):
    ode = traveling_wave_reduce(drp)
    assert ode.lhs == ode_text("-v*u' - (v^2*sigma/2)*u'' + K*u'")


def test_forward_time_drp_gives_plus_v():
    ode = traveling_wave_reduce(parse_equation(DRP_FORWARD))
    assert ode.lhs == ode_text("v*u' - (v^2*sigma/2)*u'' + K*u'")


def test_pure_space_derivative():
    ode = traveling_wave_reduce(parse_equation("dx(u) = 0"))
    assert ode.lhs == ode_text("u'")


def test_mixed_derivative_chain_rule():
    ode = traveling_wave_reduce(parse_equation("dx(dt(u)) = 0"))
    assert ode.lhs == ode_text("-v*u''")


def test_burgers_integration(burgers_ode):
    assert burgers_ode.lhs == ode_text("-v*u + u^2/2 - nu*u' - C")
    assert burgers_ode.integrated and burgers_ode.integration_constant == INTEGRATION_CONSTANT


def test_drp_integration(drp_ode):
    assert drp_ode.lhs == ode_text("(K - v)*u - (v^2*sigma/2)*u' - C")


def test_not_exactly_integrable():
    ode = traveling_wave_reduce(parse_equation("dt(u) + u*dx(dx(u)) = 0"))
    with pytest.raises(NotExactlyIntegrable) as info:
        integrate_once(ode)
    assert "u''" in str(info.value)


def test_non_autonomous_rejected():
    with pytest.raises(NonAutonomousEquation):
        traveling_wave_reduce(parse_equation("dt(u) + x*dx(u) = 0"))


def test_specialize_constant_zero(burgers_ode, drp_ode):
    assert specialize_constant_zero(burgers_ode).lhs == ode_text("-v*u + u^2/2 - nu*u'")
    z = specialize_constant_zero(drp_ode)
    assert z.lhs == ode_text("(K - v)*u - (v^2*sigma/2)*u'")
    assert z.integration_constant is None and z.constant_pinned_zero


def test_specialize_requires_integration(burgers):
    with pytest.raises(NotIntegrated):
        specialize_constant_zero(traveling_wave_reduce(burgers))


def test_degree_profile(burgers_ode):
    assert sorted(field_degree_profile(burgers_ode)) == [(1, 0, 0), (1, 1, 1), (2, 0, 0)]


@pytest.mark.parametrize("name", [n for n in CORPUS])
def test_integrate_differentiate_round_trip(name):
    ode = traveling_wave_reduce(parse_equation(CORPUS[name]))
    integrated = integrate_once(ode)
    back = differentiate(integrated.lhs + INTEGRATION_CONSTANT, XI)
    assert back == ode.lhs


def test_linearity_of_reduction():
    p1 = parse_equation("param a\ndt(u) + a*u*dx(u) = 0")
    p2 = parse_equation("param a\ndx(dx(dt(u))) + dt(dt(u)) = 0")
    combo = parse_equation("param a\n3*(dt(u) + a*u*dx(u)) - 2*(dx(dx(dt(u))) + dt(dt(u))) = 0")
    lhs = traveling_wave_reduce(combo).lhs
    want = normalize(3 * traveling_wave_reduce(p1).lhs - 2 * traveling_wave_reduce(p2).lhs)
    assert lhs == want


@pytest.mark.parametrize("name", ["burgers", "kdv", "burgers-kdv", "drp"])
def test_reduction_matches_pde_numerically(name):
    """PDE at (x, t) with u = f(x - v t) equals the reduced ODE at xi = x - v t."""
    pde = parse_equation(CORPUS[name])
    ode = traveling_wave_reduce(pde)
    x = Symbol("x", SymbolKind.INDEPENDENT_VAR)
    t = Symbol("t", SymbolKind.INDEPENDENT_VAR)
    v = ode.wave_speed
    f = parse_expression("tanh(xi)^2/3 + sech(xi/2) + xi/7")
    moving = substitute(f, {XI: x - v * t})
    rng = np.random.default_rng(11)
    params = {p: rng.uniform(0.5, 2.0) for p in pde.parameters}
    vv = rng.uniform(-2, 2)

    def field_values(expr_of, lhs, env):
        vals = {}
        for a in expand(lhs).variables():
            if isinstance(a, Symbol) and a.kind is not SymbolKind.FIELD:
                continue
            vals[a] = eval_numeric(expr_of(a), env)
        return vals

    for _ in range(5):
        xs, ts = rng.uniform(-3, 3), rng.uniform(0, 2)
        env_pde = {**params, v: vv, x: xs, t: ts}

        def pde_atom(a):
            from solwave.equation_model.expression import split_derivative

            if isinstance(a, Symbol):
                return moving
            _, orders = split_derivative(a)
            d = moving
            for var in (x, t):
                if orders.get(var):
                    d = differentiate(d, var, orders[var])
            return d

        def ode_atom(a):
            from solwave.equation_model.expression import split_derivative

            if isinstance(a, Symbol):
                return f
            return differentiate(f, XI, split_derivative(a)[1][XI])

        env_ode = {**params, v: vv, XI: xs - vv * ts}
        lp = expand(pde.lhs)
        lo = expand(ode.lhs)
        vp = lp.evaluate({**env_pde, **field_values(pde_atom, pde.lhs, env_pde)})
        vo = lo.evaluate({**env_ode, **field_values(ode_atom, ode.lhs, env_ode)})
        assert vp == pytest.approx(vo, rel=1e-8, abs=1e-10)


def test_constant_not_in_unintegrated(burgers):
    ode = traveling_wave_reduce(burgers)
    assert INTEGRATION_CONSTANT not in expand(ode.lhs).variables()
    assert Const(0) != ode.lhs
