"""End-to-end driver: reduce, integrate, balance, collect, solve, verify."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ansatz import AlgebraicSystem, AnsatzSpec, ExpPolynomial, ansatz_system
from .equation_model import Expr, PdeEquation
from .errors import ConstraintUnsatisfiable, NotExactlyIntegrable
from .reduction import (
    TravelingOde,
    integrate_once,
    specialize_constant_zero,
    traveling_wave_reduce,
)
from .solver import (
    DEFAULT_DEPTH_LIMIT,
    CaseAnalysis,
    LossReport,
    SolutionBranch,
    apply_branch,
    compare_constant_zero,
    explore_cases,
)
from .verifier import DEFAULT_TOL, ODE_GRID, PDE_GRID, ResidualReport, sample_branch, verify_ode, verify_pde


@dataclass
class BranchCheck:
    """Residual summary of one branch over a parameter scan."""

    ode_reports: list = field(default_factory=list)
    pde_reports: list = field(default_factory=list)
    skipped: str = ""

    @property
    def passed(self) -> bool:
        if self.skipped:
            return False
        return all(r.passed for r in self.ode_reports + self.pde_reports)

    @property
    def worst(self) -> ResidualReport | None:
        reports = self.ode_reports + self.pde_reports
        return max(reports, key=lambda r: r.max_abs_residual) if reports else None

    def max_residual(self, target: str) -> float:
        vals = [r.max_abs_residual for r in self.ode_reports + self.pde_reports if r.target == target]
        return max(vals) if vals else float("nan")


@dataclass
class SolveResult:
    pde: PdeEquation
    reduced: TravelingOde
    ode: TravelingOde
    spec: AnsatzSpec
    expression: Expr
    exp_poly: ExpPolynomial
    system: AlgebraicSystem
    analysis: CaseAnalysis
    checks: list
    loss_report: LossReport | None
    notes: list = field(default_factory=list)

    @property
    def branches(self) -> list[SolutionBranch]:
        return self.analysis.branches

    @property
    def verified(self) -> bool:
        return all(c.passed for b, c in zip(self.branches, self.checks) if not b.is_stuck)


def prepare_ode(pde: PdeEquation, keep_constant: bool = True) -> tuple[TravelingOde, TravelingOde, list]:
    """Reduced and (when possible) once-integrated equation, plus notes."""
    reduced = traveling_wave_reduce(pde.bound())
    notes = []
    try:
        ode = integrate_once(reduced)
    except NotExactlyIntegrable as exc:
        notes.append(f"not integrated: {exc}; working on the reduced equation")
        return reduced, reduced, notes
    if not keep_constant:
        ode = specialize_constant_zero(ode)
        notes.append("integration constant pinned to 0")
    return reduced, ode, notes


def check_branch(branch: SolutionBranch, ode: TravelingOde, pde: PdeEquation | None,
                 n_samples: int = 20, pde_samples: int = 3, seed: int = 0,
                 tol: float = DEFAULT_TOL, scale: str = "terms", low: float = 1e-2,
                 high: float = 1e2, grid=ODE_GRID, pde_grid=PDE_GRID) -> BranchCheck:
    """Scan a branch family; the first ``pde_samples`` draws are also checked on the PDE."""
    check = BranchCheck()
    if branch.is_stuck:
        check.skipped = "stuck branch: unsolved residue, not verifiable"
        return check
    rng = np.random.default_rng(seed)
    profile = apply_branch(branch)
    for i in range(n_samples):
        try:
            env = sample_branch(branch, ode, rng, low, high)
        except ConstraintUnsatisfiable as exc:
            check.skipped = str(exc)
            return check
        check.ode_reports.append(verify_ode(profile, ode, env, grid=grid, tol=tol, scale=scale))
        if pde is not None and i < pde_samples:
            check.pde_reports.append(verify_pde(profile, pde, env, grid=pde_grid, tol=tol, scale=scale,
                                                xi=ode.xi, wave_speed=ode.wave_speed))
    return check


def solve(pde: PdeEquation, order: int | None = None, keep_constant: bool = True,
          depth_limit: int = DEFAULT_DEPTH_LIMIT, n_samples: int = 20, pde_samples: int = 3,
          seed: int = 0, tol: float = DEFAULT_TOL, scale: str = "terms", verify: bool = True,
          loss_report: bool = True) -> SolveResult:
    reduced, ode, notes = prepare_ode(pde, keep_constant)
    spec, expr, ep, system = ansatz_system(ode, order=order)
    analysis = explore_cases(system, depth_limit)
    checks = []
    if verify:
        for i, b in enumerate(analysis.branches):
            checks.append(check_branch(b, ode, pde.bound(), n_samples, pde_samples, seed + i, tol, scale))
    else:
        checks = [BranchCheck(skipped="not verified") for _ in analysis.branches]
    report = None
    if loss_report and ode.integrated:
        full = ode if ode.integration_constant is not None else integrate_once(reduced)
        sys_full = system if ode.integration_constant is not None else ansatz_system(full, order=order)[3]
        sys_c0 = ansatz_system(specialize_constant_zero(full), order=order)[3]
        report = compare_constant_zero(sys_full, sys_c0, depth_limit)
    return SolveResult(pde, reduced, ode, spec, expr, ep, system, analysis, checks, report, notes)


__all__ = ["BranchCheck", "SolveResult", "check_branch", "prepare_ode", "solve"]
