from fractions import Fraction

import numpy as np
import pytest

from solwave.ansatz import (
    AnsatzSpec,
    ansatz_system,
    balance_order,
    build_ansatz,
    collect_system,
    substitute_ansatz,
    to_exponential,
)
from solwave.corpus import CORPUS
from solwave.equation_model import (
    Poly,
    Symbol,
    SymbolKind,
    eval_numeric,
    expand,
    normalize,
    parse_equation,
    parse_expression,
)
from solwave.errors import AnsatzOrderUndetermined, EmptySystem, MixedScales
from solwave.reduction import WAVE_SPEED, XI, TravelingOde, integrate_once, traveling_wave_reduce

from conftest import P


def ex(text):
    return normalize(parse_expression(text))


def ode_from(text):
    return TravelingOde(lhs=ex(text), field=Symbol("u", SymbolKind.FIELD), integrated=True)


def test_balance_orders(burgers_ode, drp_ode):
    assert balance_order(burgers_ode) == 1
    assert balance_order(drp_ode) == 1
    assert balance_order(ode_from("-u'''' + u^2")) == 4
    kdv = integrate_once(traveling_wave_reduce(parse_equation(CORPUS["kdv"])))
    assert balance_order(kdv) == 2


def test_balance_rejects_non_integer():
    with pytest.raises(AnsatzOrderUndetermined):
        balance_order(ode_from("u'' + u^3*u'"))


def test_build_ansatz_shapes():
    spec1 = AnsatzSpec.default(1, WAVE_SPEED)
    assert build_ansatz(spec1) == ex("U1*tanh(C1*xi) + V1*sech(C1*xi) + V0")
    spec2 = AnsatzSpec.default(2, WAVE_SPEED)
    assert build_ansatz(spec2) == ex(
        "U1*tanh(C1*xi) + U2*tanh(C1*xi)^2 + V1*sech(C1*xi) + V2*sech(C1*xi)^2 + V0")


def test_ansatz_spec_validation():
    with pytest.raises(ValueError):
        AnsatzSpec.default(0, WAVE_SPEED)


def test_exponential_shapes():
    C1 = Symbol("C1", SymbolKind.ANSATZ_UNKNOWN)
    ep = to_exponential(ex("tanh(C1*xi)"), C1, min_d=2)
    assert ep.terms == {0: P(-1), 4: P(1)}
    ep = to_exponential(ex("sech(C1*xi)"), C1, min_d=2)
    assert ep.terms == {1: P(2), 3: P(2)}
    V0 = Symbol("V0", SymbolKind.ANSATZ_UNKNOWN)
    ep = to_exponential(ex("V0"), C1, min_d=2)
    assert ep.terms == {0: P(V0), 2: P(V0).scale(2), 4: P(V0)}


def test_derivative_terms_of_the_drp_substitution():
    """sech^2 gives 4 E^2 and sinh/cosh^2 gives 2 (E^3 - E) under (1 + E^2)^2."""
    C1 = Symbol("C1", SymbolKind.ANSATZ_UNKNOWN)
    ep = to_exponential(ex("sech(C1*xi)^2"), C1)
    assert ep.terms == {2: P(4)} and ep.multiplier == (2, 0)
    ep = to_exponential(ex("sinh(C1*xi)/cosh(C1*xi)^2"), C1)
    assert ep.terms == {1: P(-2), 3: P(2)} and ep.multiplier == (2, 0)


def test_mixed_scales_rejected():
    with pytest.raises(MixedScales):
        to_exponential(ex("tanh(C1*xi) + tanh(C2*xi)"))


def test_drp_system_is_five_equations(drp_ode):
    spec, expr, ep, system = ansatz_system(drp_ode)
    assert ep.multiplier == (2, 0)
    assert sorted(ep.terms) == [0, 1, 2, 3, 4]
    assert len(system.equations) == 5
    K, sigma = (Symbol(n, SymbolKind.PARAMETER) for n in ("K", "sigma"))
    U1, V1, V0, C1 = (Symbol(n, SymbolKind.ANSATZ_UNKNOWN) for n in ("U1", "V1", "V0", "C1"))
    v = WAVE_SPEED
    C = Symbol("C", SymbolKind.INTEGRATION_CONSTANT)
    A = P(K) - P(v)
    B = P(v) * P(v) * P(sigma).scale(Fraction(1, 2))
    hand = {
        0: A * (P(V0) - P(U1)) - P(C),
        1: (A - B * P(C1)) * P(V1).scale(2),
        2: A * P(V0).scale(2) - (B * P(C1) * P(U1)).scale(4) - P(C).scale(2),
        3: (A + B * P(C1)) * P(V1).scale(2),
        4: A * (P(U1) + P(V0)) - P(C),
    }
    assert ep.terms == hand


def test_burgers_system(burgers_ode):
    _, _, ep, system = ansatz_system(burgers_ode)
    assert len(system.equations) == 5 and ep.multiplier == (2, 0)
    assert system.lines()[0].startswith("[E^0]")


def test_kdv_multiplier():
    kdv = integrate_once(traveling_wave_reduce(parse_equation(CORPUS["kdv"])))
    _, _, ep, system = ansatz_system(kdv)
    assert ep.multiplier == (4, 0)
    assert len(system.equations) == 9


def test_empty_system():
    C1 = Symbol("C1", SymbolKind.ANSATZ_UNKNOWN)
    ep = to_exponential(ex("tanh(C1*xi) - tanh(C1*xi)^3 - tanh(C1*xi)*sech(C1*xi)^2"), C1)
    with pytest.raises(EmptySystem):
        collect_system(ep, (C1,))


def test_multiplier_is_minimal():
    for name, text in CORPUS.items():
        ode = integrate_once(traveling_wave_reduce(parse_equation(text)))
        _, expr, ep, _ = ansatz_system(ode)
        d, q = ep.multiplier
        # some term needs the full (1 + E^2)^d, and E^q is needed to clear a negative power
        assert max(s[0] for s in ep.term_shapes) == d
        assert q == 0 or min(s[1] for s in ep.term_shapes) == -q


def test_phase_shift_is_a_translation(burgers_ode):
    spec, expr, ep, _ = ansatz_system(burgers_ode, phase=Fraction(1, 3))
    assert spec.phase == Fraction(1, 3)
    rng = np.random.default_rng(5)
    env = {s: rng.uniform(0.5, 1.5) for s in expand(expr).variables() if isinstance(s, Symbol)}
    for z in rng.uniform(-2, 2, 5):
        env[XI] = z
        lhs = ep.evaluate(env, z)
        rhs = eval_numeric(expr, env) * ep.multiplier_value(env, z)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


def _pointwise_property(name, draws, rng):
    ode = integrate_once(traveling_wave_reduce(parse_equation(CORPUS[name])))
    spec, expr, ep, _ = ansatz_system(ode)
    syms = sorted((s for s in expand(expr).variables() if isinstance(s, Symbol) and s != XI),
                  key=lambda s: s.name)
    worst = 0.0
    for _ in range(draws):
        env = {s: rng.uniform(-2, 2) for s in syms}
        env[spec.scale] = rng.uniform(0.2, 1.5) * rng.choice([-1, 1])
        z = rng.uniform(-5, 5)
        env[XI] = z
        got = ep.evaluate(env, z)
        terms = ep.evaluate_terms(env, z)
        want = eval_numeric(expr, env) * ep.multiplier_value(env, z)
        scale = max(abs(want), sum(abs(t) for t in terms), 1e-300)
        worst = max(worst, abs(got - want) / scale)
    return worst


@pytest.mark.parametrize("name", list(CORPUS))
def test_exponential_form_is_pointwise_equivalent(name):
    assert _pointwise_property(name, 200, np.random.default_rng(17)) <= 1e-10


def test_collected_system_soundness(burgers_ode):
    """A common zero of the system makes every E coefficient vanish."""
    _, _, ep, system = ansatz_system(burgers_ode)
    nu = Symbol("nu", SymbolKind.PARAMETER)
    U1, V1, V0, C1 = (Symbol(n, SymbolKind.ANSATZ_UNKNOWN) for n in ("U1", "V1", "V0", "C1"))
    C = Symbol("C", SymbolKind.INTEGRATION_CONSTANT)
    env = {nu: Fraction(3, 2), C1: Fraction(2, 5), V0: Fraction(-1, 3)}
    env[U1] = -2 * env[nu] * env[C1]
    env[V1] = Fraction(0)
    env[WAVE_SPEED] = env[V0]
    env[C] = 2 * env[nu] ** 2 * env[C1] ** 2 - env[V0] ** 2 / 2
    assert all(eq.evaluate_exact(env) == 0 for eq in system.equations)
    assert all(c.evaluate_exact(env) == 0 for c in ep.terms.values())


def test_substitute_ansatz_keeps_parameters(drp_ode):
    spec = AnsatzSpec.default(1, WAVE_SPEED)
    e = substitute_ansatz(drp_ode, spec)
    names = {s.name for s in expand(e).variables() if isinstance(s, Symbol)}
    assert {"K", "sigma", "C", "v", "U1", "V1", "V0", "C1"} <= names
    assert Poly.atom(Symbol("u", SymbolKind.FIELD)) != expand(e)
