"""Command-line interface: ``solwave reduce | solve | verify | corpus``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from . import __version__
from .corpus import BUILTINS, CORPUS, DRP_CLAIMED_PROFILE, DrpConfig, load
from .equation_model import PdeEquation, parse_equation, parse_expression, to_text
from .errors import EquationSyntaxError, SolwaveError
from .pipeline import SolveResult, prepare_ode, solve
from .solver import LossReport, SolutionBranch, apply_branch
from .verifier import DEFAULT_TOL, ODE_GRID, SCALES, emit_csv, verify_ode, verify_pde

EXIT_OK, EXIT_PARSE, EXIT_METHOD, EXIT_VERIFY, EXIT_INTERNAL = 0, 2, 3, 4, 5


# --- argument helpers ----------------------------------------------------------

def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _params(text: str) -> dict:
    out = {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise argparse.ArgumentTypeError(f"expected name=value, got {item!r}")
        out[name.strip()] = _fraction(value)
    return out


def _grid(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must look like a:b:n")
    try:
        a, b, n = float(_fraction(parts[0])), float(_fraction(parts[1])), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None
    if n < 1 or b < a:
        raise argparse.ArgumentTypeError("grid needs a <= b and n >= 1")
    return (a, b, n)


def _gamma(text: str) -> tuple:
    return tuple(_fraction(g) for g in text.split(",") if g.strip())


def _add_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("equation", nargs="?", help="file holding an equation program")
    p.add_argument("--builtin", choices=sorted(CORPUS), help="use a builtin equation")
    p.add_argument("--params", type=_params, default={}, help="parameter values k=v,...")
    g = p.add_argument_group("DRP coefficients")
    g.add_argument("--m", type=int)
    g.add_argument("--gamma", type=_gamma)
    g.add_argument("--sigma", type=_fraction)
    g.add_argument("--mu", type=_fraction)
    g.add_argument("--reh", type=_fraction)


def _drp_config(args) -> DrpConfig | None:
    given = [args.m, args.gamma, args.sigma, args.mu, args.reh]
    if all(x is None for x in given):
        return None
    if any(x is None for x in given):
        raise SolwaveError("--m, --gamma, --sigma, --mu and --reh must be given together")
    if args.builtin != "drp":
        raise SolwaveError("DRP coefficients only apply to --builtin drp")
    try:
        return DrpConfig(args.m, args.gamma, args.sigma, args.mu, args.reh)
    except ValueError as exc:
        raise SolwaveError(str(exc)) from None


def _load_equation(args, bind: bool = True) -> PdeEquation:
    if (args.equation is None) == (args.builtin is None):
        raise SolwaveError("give exactly one of an equation file or --builtin")
    if args.builtin:
        pde = load(args.builtin, _drp_config(args))
    else:
        try:
            text = Path(args.equation).read_text()
        except OSError as exc:
            raise SolwaveError(f"cannot read {args.equation}: {exc}") from None
        pde = parse_equation(text)
    if bind and args.params:
        names = {p.name for p in pde.parameters}
        unknown = sorted(set(args.params) - names)
        if unknown:
            raise SolwaveError(f"not parameters of the equation: {', '.join(unknown)}")
        pde = replace(pde, values={**dict(pde.values), **args.params})
    return pde


# --- JSON shaping -------------------------------------------------------------

def _branch_json(i: int, b: SolutionBranch, check) -> dict:
    out = {
        "index": i,
        "class": b.classification.value,
        "assignments": {s.name: str(r) for s, r in b.assignments.items()},
        "free": [s.name for s in b.free_symbols],
        "constraints": [f"{f} != 0" for f in b.nonzero_constraints],
        "relations": [f"{p} = 0" for p in b.relations()],
        "residue": [f"{p} = 0" for p in b.residue],
        "profile": None if b.is_stuck else to_text(apply_branch(b)),
    }
    if check is None or check.skipped:
        out["residual"] = {"status": "unverifiable", "reason": check.skipped if check else "", "passed": False}
        return out
    worst_ode = max(check.ode_reports, key=lambda r: r.max_abs_residual)
    res = {
        "status": "verified" if check.passed else "failed",
        "passed": check.passed,
        "samples": len(check.ode_reports),
        "scale": worst_ode.scale,
        "tolerance": worst_ode.tolerance,
        "ode_max": worst_ode.max_abs_residual,
        "ode_check": worst_ode.parameter_instantiation,
    }
    if check.pde_reports:
        worst_pde = max(check.pde_reports, key=lambda r: r.max_abs_residual)
        res["pde_max"] = worst_pde.max_abs_residual
        res["pde_check"] = worst_pde.parameter_instantiation
    out["residual"] = res
    return out


def _loss_json(report: LossReport | None) -> dict:
    if report is None or report.constant is None:
        return {"constant": None, "entries": [], "flagged": 0}
    brief = lambda b: {"class": b.classification.value,  # noqa: E731
                       "assignments": {s.name: str(r) for s, r in b.assignments.items()},
                       "free": [s.name for s in b.free_symbols]}
    return {
        "constant": report.constant.name,
        "flagged": len(report.flagged),
        "entries": [{
            "branch": e.branch_index,
            "status": e.status,
            "reason": e.reason,
            "free_before": e.free_before,
            "free_after": e.free_after,
            "at_zero": [brief(s) for s in e.specializations],
            "matches": e.matches,
        } for e in report.entries],
        "c0_branches": [brief(b) for b in report.c0_branches],
        "unmatched_c0": report.unmatched_c0,
    }


def drp_audit(result: SolveResult, config: DrpConfig | None, tol: float = 1e-6) -> dict:
    """Check the quoted DRP kink profile against the integrated equation."""
    sigma = config.sigma if config else Fraction(1, 2)
    K = config.K if config else Fraction(1, 10)
    env = {"sigma": sigma, "K": K, "v": K, "C": 1, "C1": 1, "V0": 0}
    profile = parse_expression(DRP_CLAIMED_PROFILE)
    report = verify_ode(profile, result.ode, env, tol=tol)
    return {
        "claimed_profile": DRP_CLAIMED_PROFILE,
        "claimed_assignments": {"v": "K", "U1": "-C/(2*C1*v^2*sigma)", "V1": "0"},
        "parameters": {k: str(Fraction(v)) for k, v in env.items()},
        "report": report.to_dict(),
        "finding": ("the claimed kink leaves the xi-dependent residual (C/4)*sech(C1*xi)^2 - C; "
                    "with v = K the E^0 and E^4 coefficients force C = 0, so no kink with C != 0 exists"),
    }


def result_json(result: SolveResult, audit: dict | None = None) -> dict:
    d, q = result.exp_poly.multiplier
    out = {
        "equation": result.pde.to_text(),
        "reduced": str(result.reduced),
        "integrated": str(result.ode),
        "ansatz_order": result.spec.order,
        "multiplier": {"d": d, "q": q},
        "system": result.system.lines(),
        "branches": [_branch_json(i, b, c) for i, (b, c) in enumerate(zip(result.branches, result.checks))],
        "case_tree": {
            "leaves": len(result.analysis.leaves),
            "pruned": [{"reason": r, "path": list(p)} for s, r, p in result.analysis.leaves if s == "pruned"],
            "stuck": len(result.analysis.stuck),
            "merged": result.analysis.merged,
        },
        "loss_report": _loss_json(result.loss_report),
        "notes": list(result.notes),
        "verified": result.verified,
    }
    if audit is not None:
        out["audit"] = audit
    return out


def _write_json(data: dict, path: str) -> None:
    text = json.dumps(data, indent=2, sort_keys=False) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# --- commands -------------------------------------------------------------------

def cmd_reduce(args) -> int:
    pde = _load_equation(args)
    reduced, ode, notes = prepare_ode(pde, keep_constant=not args.no_constant)
    print(f"equation:   {to_text(pde.bound().lhs)} = 0")
    print(f"reduced:    {reduced}")
    if ode.integrated:
        print(f"integrated: {ode}")
        if ode.integration_constant is not None:
            print(f"integration constant: {ode.integration_constant.name} (moved to the left-hand side)")
    for n in notes:
        print(f"note: {n}")
    if args.json:
        _write_json({"equation": pde.to_text(), "reduced": str(reduced), "integrated": str(ode),
                     "constant": ode.integration_constant.name if ode.integration_constant else None},
                    args.json)
    return EXIT_OK


def _print_result(result: SolveResult) -> None:
    print(f"integrated: {result.ode}")
    d, q = result.exp_poly.multiplier
    print(f"ansatz order n = {result.spec.order}; multiplier (1+E^2)^{d} E^{q}")
    print("system:")
    for line in result.system.lines():
        print(f"  {line}")
    print(f"branches: {len(result.branches)}")
    for i, (b, c) in enumerate(zip(result.branches, result.checks)):
        print(f"  [{i}] {b.classification.value}")
        for s, r in b.assignments.items():
            print(f"      {s.name} = {r}")
        if b.free_symbols:
            print(f"      free: {', '.join(s.name for s in b.free_symbols)}")
        if b.nonzero_constraints:
            print(f"      nonzero: {', '.join(str(f) for f in b.nonzero_constraints)}")
        if b.residue:
            print(f"      unsolved: {'; '.join(f'{p} = 0' for p in b.residue)}")
        if not b.is_stuck:
            print(f"      u(xi) = {to_text(apply_branch(b))}")
        if c.skipped:
            print(f"      residual: {c.skipped}")
        elif c.ode_reports:
            w = c.worst
            print(f"      residual: {'PASS' if c.passed else 'FAIL'} worst {w.max_abs_residual:.2e} "
                  f"({w.scale}) over {len(c.ode_reports)} samples")
    if result.loss_report and result.loss_report.constant is not None:
        print("loss at C = 0:")
        for e in result.loss_report.entries:
            print(f"  [{e.branch_index}] {e.status}: {e.reason}")


def cmd_solve(args) -> int:
    pde = _load_equation(args)
    if args.order is not None and args.order < 1:
        raise SolwaveError("--order must be at least 1")
    result = solve(pde, order=args.order, keep_constant=not args.no_constant,
                   n_samples=args.samples, seed=args.seed, tol=args.tol, scale=args.scale)
    audit = None
    if args.builtin == "drp" and not args.no_constant:
        audit = drp_audit(result, _drp_config(args))
    _print_result(result)
    if audit:
        print(f"audit of the claimed kink: {'PASS' if audit['report']['passed'] else 'FAIL'} "
              f"max |residual| {audit['report']['max_abs_residual']:.3e}")
    if args.json:
        _write_json(result_json(result, audit), args.json)
    if args.emit_csv:
        pick = next((i for i, b in enumerate(result.branches)
                     if not b.is_stuck and b.classification.value != "Trivial" and result.checks[i].ode_reports),
                    next((i for i, c in enumerate(result.checks) if c.ode_reports), None))
        if pick is not None:
            env = result.checks[pick].ode_reports[0].parameter_instantiation
            emit_csv(apply_branch(result.branches[pick]), env, args.emit_csv, xi=result.ode.xi)
    return EXIT_OK if result.verified else EXIT_VERIFY


def _env_from(args_params: dict, extra: dict | None = None) -> dict:
    env = {k: float(v) for k, v in args_params.items()}
    env.update(extra or {})
    return env


def cmd_verify(args) -> int:
    pde = _load_equation(args, bind=False)
    reduced, ode, _ = prepare_ode(pde, keep_constant=True)
    grid = args.grid or ODE_GRID
    if args.solution:
        return _verify_solution(args, pde, ode, grid)
    if not args.profile:
        raise SolwaveError("give --profile or --solution")
    text = args.profile
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    profile = parse_expression(text)
    env = _env_from(args.params)
    ok = True
    report = verify_ode(profile, ode, env, grid=grid, tol=args.tol, scale=args.scale)
    print(report.summary())
    ok &= report.passed
    if args.pde:
        pr = verify_pde(profile, pde, env, tol=args.tol, scale=args.scale, xi=ode.xi, wave_speed=ode.wave_speed)
        print(pr.summary())
        ok &= pr.passed
    if args.emit_csv:
        emit_csv(profile, env, args.emit_csv, grid=grid, xi=ode.xi)
    if args.json:
        _write_json({"ode": report.to_dict()}, args.json)
    return EXIT_OK if ok else EXIT_VERIFY


def _verify_solution(args, pde: PdeEquation, ode, grid) -> int:
    data = json.loads(Path(args.solution).read_text())
    ok = True
    same = True
    for b in data["branches"]:
        res = b.get("residual", {})
        if b.get("profile") is None or "ode_check" not in res:
            print(f"[{b['index']}] {b['class']}: unverifiable")
            continue
        profile = parse_expression(b["profile"])
        tol, scale = res["tolerance"], res["scale"]
        r = verify_ode(profile, ode, res["ode_check"], grid=grid, tol=tol, scale=scale)
        passed = r.passed
        line = f"[{b['index']}] {b['class']}: {r.summary()}"
        if "pde_check" in res:
            pr = verify_pde(profile, pde, res["pde_check"], tol=tol, scale=scale, xi=ode.xi,
                            wave_speed=ode.wave_speed)
            passed = passed and pr.passed
            line += f"; {pr.summary()}"
        print(line)
        if passed != res["passed"]:
            same = False
            print(f"    verdict differs from the recorded one ({res['passed']})")
        ok &= passed
    return EXIT_OK if ok and same else EXIT_VERIFY


def cmd_corpus(args) -> int:
    rows = []
    ok = True
    for name in CORPUS:
        try:
            result = solve(load(name), n_samples=args.samples, seed=args.seed, pde_samples=1)
        except SolwaveError as exc:
            print(f"{name:22s} error: {exc}")
            rows.append({"name": name, "error": str(exc)})
            ok = False
            continue
        classes = ", ".join(b.classification.value for b in result.branches)
        lost = len(result.loss_report.flagged) if result.loss_report else 0
        verdict = "verified" if result.verified else "FAILED"
        print(f"{name:22s} n={result.spec.order} eqs={len(result.system):2d} "
              f"branches=[{classes}] lost_at_C0={lost} {verdict}")
        ok &= result.verified
        rows.append({"name": name, "result": result_json(result)})
    if args.json:
        _write_json({"corpus": rows}, args.json)
    return EXIT_OK if ok else EXIT_VERIFY


# --- entry point ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="solwave", description="Solitary traveling waves by the tanh/sech ansatz.")
    p.add_argument("--version", action="version", version=f"solwave {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("reduce", help="traveling-wave reduction and one integration")
    _add_source(r)
    r.add_argument("--no-constant", action="store_true", help="pin the integration constant to 0")
    r.add_argument("--json")

    s = sub.add_parser("solve", help="run the full pipeline and verify every branch")
    _add_source(s)
    s.add_argument("--order", type=int)
    s.add_argument("--no-constant", action="store_true", help="pin the integration constant to 0")
    s.add_argument("--tol", type=float, default=DEFAULT_TOL)
    s.add_argument("--scale", choices=SCALES, default="terms")
    s.add_argument("--samples", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--json", help="write the solution set as JSON ('-' for stdout)")
    s.add_argument("--emit-csv", help="write xi,u samples of one verified branch")

    v = sub.add_parser("verify", help="check a claimed profile or a saved solution set")
    _add_source(v)
    v.add_argument("--profile", help="profile u(xi) in the DSL, or @file")
    v.add_argument("--solution", help="JSON written by 'solve --json'")
    v.add_argument("--pde", action="store_true", help="also check the original PDE")
    v.add_argument("--tol", type=float, default=DEFAULT_TOL)
    v.add_argument("--scale", choices=SCALES, default="absolute")
    v.add_argument("--grid", type=_grid)
    v.add_argument("--emit-csv")
    v.add_argument("--json")

    c = sub.add_parser("corpus", help="solve every corpus equation")
    c.add_argument("--samples", type=int, default=5)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--json")
    return p


COMMANDS = {"reduce": cmd_reduce, "solve": cmd_solve, "verify": cmd_verify, "corpus": cmd_corpus}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except EquationSyntaxError as exc:
        print(f"SyntaxError: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SolwaveError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # pragma: no cover - last resort
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
