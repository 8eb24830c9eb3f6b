from fractions import Fraction

import pytest

from solwave.corpus import BURGERS, DRP
from solwave.equation_model import Poly, Symbol, SymbolKind, parse_equation
from solwave.reduction import integrate_once, traveling_wave_reduce


def sym(name, kind=SymbolKind.PARAMETER):
    return Symbol(name, kind)


def unknown(name):
    return Symbol(name, SymbolKind.ANSATZ_UNKNOWN)


def P(x):
    """Poly from a symbol or a number."""
    if isinstance(x, Symbol):
        return Poly.atom(x)
    return Poly.const(Fraction(x))


@pytest.fixture
def burgers():
    return parse_equation(BURGERS)


@pytest.fixture
def drp():
    return parse_equation(DRP)


@pytest.fixture
def burgers_ode(burgers):
    return integrate_once(traveling_wave_reduce(burgers))


@pytest.fixture
def drp_ode(drp):
    return integrate_once(traveling_wave_reduce(drp))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
