"""Numeric residual checks of candidate profiles.

Derivatives are always taken symbolically before anything is evaluated, so
the residual carries float roundoff only, never discretization error.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .equation_model import (
    Expr,
    PdeEquation,
    Poly,
    Symbol,
    SymbolKind,
    differentiate,
    eval_numeric,
    expand,
    free_symbols,
    substitute,
)
from .equation_model.expression import is_field_atom, split_derivative
from .errors import ConstraintUnsatisfiable, UnboundSymbol
from .reduction import TravelingOde
from .solver import SolutionBranch, apply_branch

ODE_GRID = (-10.0, 10.0, 401)
PDE_GRID = ((-10.0, 10.0, 101), (0.0, 5.0, 51))
DEFAULT_TOL = 1e-9
SCALES = ("absolute", "profile", "terms")


@dataclass
class ResidualReport:
    """Worst residual of one profile on one grid.

    With ``scale="absolute"`` the residual is reported as is; ``"profile"``
    divides it by ``1 + max|u|`` and ``"terms"`` divides it by
    ``1 + sum over additive terms of max|term|`` on the grid. ``raw_max_abs_residual`` always holds
    the unscaled value.
    """

    max_abs_residual: float
    grid: np.ndarray
    parameter_instantiation: dict
    target: str
    passed: bool
    tolerance: float
    scale: str = "absolute"
    raw_max_abs_residual: float = 0.0
    worst_point: tuple = ()
    extra_grid: np.ndarray | None = field(default=None, repr=False)

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        where = ", ".join(f"{w:.6g}" for w in self.worst_point)
        return (f"{verdict} {self.target}: max |residual| = {self.max_abs_residual:.3e} "
                f"({self.scale}, tol {self.tolerance:.1e}) at ({where})")

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "max_abs_residual": self.max_abs_residual,
            "raw_max_abs_residual": self.raw_max_abs_residual,
            "tolerance": self.tolerance,
            "scale": self.scale,
            "passed": self.passed,
            "worst_point": list(self.worst_point),
            "parameters": dict(self.parameter_instantiation),
        }


def _grid(spec) -> np.ndarray:
    a, b, n = spec
    n = int(n)
    if n < 1:
        raise ValueError("grid needs at least one point")
    if b < a:
        raise ValueError("grid bounds must be increasing")
    return np.linspace(float(a), float(b), n)


def _env(env: Mapping) -> dict:
    """Float environment keyed by symbols; string keys are accepted too."""
    out = {}
    for k, v in env.items():
        if isinstance(k, str):
            k = Symbol(k, _kind_for(k))
        out[k] = float(v)
    return out


def _kind_for(name: str) -> SymbolKind:
    from .equation_model.parser import symbol_for_name

    return symbol_for_name(name).kind


def _lookup(env: dict, sym: Symbol):
    if sym in env:
        return env[sym]
    for k, v in env.items():
        if k.name == sym.name:
            return v
    raise UnboundSymbol(f"no value bound for symbol {sym.name!r}")


def _bind(e: Expr, env: dict, keep: tuple) -> dict:
    """Env restricted to the free symbols of ``e`` (plus ``keep``), matched by name."""
    out = {}
    for s in free_symbols(e):
        if s in keep:
            continue
        out[s] = _lookup(env, s)
    return out


def _evaluate_terms(lhs: Poly, values: dict, env: dict, shape) -> tuple[np.ndarray, np.ndarray]:
    """Sum of the monomials of ``lhs`` and the sum of their largest magnitudes."""
    total = np.zeros(shape)
    magnitude = np.zeros(shape)
    with np.errstate(over="ignore", invalid="ignore"):
        for mono, c in lhs.sorted_terms():
            t = np.full(shape, float(c))
            for a, e in mono:
                if a in values:
                    val = values[a]
                elif isinstance(a, Symbol):
                    val = _lookup(env, a)
                else:
                    val = eval_numeric(a, {s: _lookup(env, s) for s in free_symbols(a)})
                t = t * np.asarray(val, dtype=float) ** e
            total = total + t
            magnitude = magnitude + np.max(np.abs(t))
    return total, magnitude


def _report(residual, magnitude, u_values, grids, env, target, tol, scale):
    if scale not in SCALES:
        raise ValueError(f"unknown residual scale {scale!r}")
    raw = np.abs(residual)
    if not np.all(np.isfinite(raw)):
        from .errors import NonFiniteResult

        raise NonFiniteResult(f"non-finite residual for {target}")
    if scale == "absolute":
        scaled = raw
    elif scale == "profile":
        scaled = raw / (1.0 + float(np.max(np.abs(u_values))))
    else:
        scaled = raw / (1.0 + magnitude)
    idx = np.unravel_index(int(np.argmax(scaled)), scaled.shape)
    worst = tuple(float(g[i]) for g, i in zip(grids, idx))
    m = float(scaled[idx])
    return ResidualReport(
        max_abs_residual=m,
        grid=grids[0],
        parameter_instantiation={s.name: v for s, v in sorted(env.items(), key=lambda kv: kv[0].name)},
        target=target,
        passed=m <= tol,
        tolerance=tol,
        scale=scale,
        raw_max_abs_residual=float(np.max(raw)),
        worst_point=worst,
        extra_grid=grids[1] if len(grids) > 1 else None,
    )


def verify_ode(profile: Expr, ode: TravelingOde, env: Mapping, grid=ODE_GRID,
               tol: float = DEFAULT_TOL, scale: str = "absolute") -> ResidualReport:
    """Residual of ``ode.lhs`` with ``u = profile(xi)`` on a uniform xi grid."""
    env = _env(env)
    xs = _grid(grid)
    lhs = expand(ode.lhs)
    xi = ode.xi
    derivs: dict[int, Expr] = {0: profile}
    values = {}
    for a in lhs.variables():
        if not is_field_atom(a):
            continue
        k = 0 if isinstance(a, Symbol) else split_derivative(a)[1].get(xi, 0)
        for j in range(1, k + 1):
            if j not in derivs:
                derivs[j] = differentiate(derivs[j - 1], xi)
        values[a] = _on_grid(derivs[k], env, {xi: xs}, xs.shape)
    u_values = _on_grid(profile, env, {xi: xs}, xs.shape)
    residual, magnitude = _evaluate_terms(lhs, values, env, xs.shape)
    used = {s: v for s, v in env.items() if s in lhs.variables() or s in free_symbols(profile)}
    return _report(residual, magnitude, u_values, (xs,), used, "IntegratedOde", tol, scale)


def _on_grid(e: Expr, env: dict, grid_vals: dict, shape) -> np.ndarray:
    bound = _bind(e, env, tuple(grid_vals))
    bound.update(grid_vals)
    return np.broadcast_to(np.asarray(eval_numeric(e, bound), dtype=float), shape)


def verify_pde(profile: Expr, pde: PdeEquation, env: Mapping, v_value: float | None = None,
               grid=PDE_GRID, tol: float = DEFAULT_TOL, scale: str = "absolute",
               xi: Symbol | None = None, wave_speed: Symbol | None = None) -> ResidualReport:
    """PDE residual for ``u(x, t) = profile(x - v t)``, derivatives in x and t taken symbolically."""
    from .reduction import WAVE_SPEED, XI

    env = _env(env)
    xi = xi or XI
    v = wave_speed or WAVE_SPEED
    if v_value is not None:
        env[v] = float(v_value)
    x, t = pde.space_var, pde.time_var
    xs, ts = _grid(grid[0]), _grid(grid[1])
    X, T = np.meshgrid(xs, ts, indexing="ij")
    moving = substitute(profile, {xi: x - v * t})
    lhs = expand(pde.bound().lhs)
    values = {}
    for a in lhs.variables():
        if not is_field_atom(a):
            continue
        orders = {} if isinstance(a, Symbol) else split_derivative(a)[1]
        d = moving
        for var in (x, t):
            if orders.get(var):
                d = differentiate(d, var, orders[var])
        values[a] = _on_grid(d, env, {x: X, t: T}, X.shape)
    u_values = _on_grid(moving, env, {x: X, t: T}, X.shape)
    residual, magnitude = _evaluate_terms(lhs, values, env, X.shape)
    used = {s: val for s, val in env.items() if s in lhs.variables() or s in free_symbols(moving)}
    return _report(residual, magnitude, u_values, (xs, ts), used, "OriginalPde", tol, scale)


# --- parameter scans --------------------------------------------------------

def _sample_value(rng: np.random.Generator, low: float, high: float) -> float:
    mag = math.exp(rng.uniform(math.log(low), math.log(high)))
    return mag if rng.random() < 0.5 else -mag


def branch_environment(branch: SolutionBranch, sample: Mapping) -> dict:
    """Sampled free symbols and parameters plus the values of every assigned unknown."""
    env = dict(sample)
    for s, r in branch.assignments.items():
        env[s] = float(r.evaluate(env))
    return env


def _sampled_symbols(branch: SolutionBranch, ode: TravelingOde) -> list:
    syms = set(branch.free_symbols)
    for r in branch.assignments.values():
        syms |= r.variables()
    lhs_syms = {s for s in free_symbols(ode.lhs) if isinstance(s, Symbol)}
    syms |= {s for s in lhs_syms if s.kind is SymbolKind.PARAMETER}
    syms -= set(branch.assignments)
    syms = {s for s in syms if s.kind not in (SymbolKind.FIELD, SymbolKind.INDEPENDENT_VAR)}
    return sorted(syms, key=lambda s: s.sort_key())


def sample_branch(branch: SolutionBranch, ode: TravelingOde, rng: np.random.Generator,
                  low: float = 1e-2, high: float = 1e2, margin: float = 1e-6,
                  fixed: Mapping | None = None, max_tries: int = 1000) -> dict:
    """One random instantiation honoring every nonzero constraint and denominator."""
    if branch.is_stuck:
        raise ConstraintUnsatisfiable("stuck branch has unsolved equations; nothing to sample")
    symbols = _sampled_symbols(branch, ode)
    guards = list(branch.nonzero_constraints)
    for r in branch.assignments.values():
        guards.extend(r.den)
    fixed = _env(fixed or {})
    for _ in range(max_tries):
        sample = {s: fixed.get(s, None) for s in symbols}
        for s in symbols:
            if sample[s] is None:
                sample[s] = _sample_value(rng, low, high)
        if all(abs(g.evaluate(sample)) >= margin for g in guards):
            return branch_environment(branch, sample)
    raise ConstraintUnsatisfiable(f"no sample satisfied the constraints after {max_tries} tries")


def scan_parameters(branch: SolutionBranch, ode: TravelingOde, n_samples: int = 20, seed: int = 0,
                    tol: float = DEFAULT_TOL, scale: str = "terms", low: float = 1e-2,
                    high: float = 1e2, grid=ODE_GRID, fixed: Mapping | None = None) -> list:
    """``verify_ode`` on ``n_samples`` random members of a branch family."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rng = np.random.default_rng(seed)
    profile = apply_branch(branch)
    reports = []
    for _ in range(n_samples):
        env = sample_branch(branch, ode, rng, low, high, fixed=fixed)
        reports.append(verify_ode(profile, ode, env, grid=grid, tol=tol, scale=scale))
    return reports


def emit_csv(profile: Expr, env: Mapping, path, grid=ODE_GRID, xi: Symbol | None = None) -> None:
    """Write ``xi,u`` columns with 16 significant digits."""
    from .reduction import XI

    xi = xi or XI
    env = _env(env)
    xs = _grid(grid)
    us = _on_grid(profile, env, {xi: xs}, xs.shape)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["xi", "u"])
        for a, b in zip(xs, us):
            w.writerow([f"{a:.16g}", f"{b:.16g}"])


__all__ = [
    "DEFAULT_TOL", "ODE_GRID", "PDE_GRID", "ResidualReport", "branch_environment", "emit_csv",
    "sample_branch", "scan_parameters", "verify_ode", "verify_pde",
]
