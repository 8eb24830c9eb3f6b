import csv
import math
from fractions import Fraction

import numpy as np
import pytest

from solwave.corpus import CORPUS, DRP_CLAIMED_PROFILE, DrpConfig, load
from solwave.equation_model import normalize, parse_expression
from solwave.errors import ConstraintUnsatisfiable
from solwave.pipeline import prepare_ode
from solwave.ansatz import ansatz_system
from solwave.solver import apply_branch, solve_by_cases
from solwave.verifier import (
    emit_csv,
    sample_branch,
    scan_parameters,
    verify_ode,
    verify_pde,
)

KINK = "V0 - 2*nu*C1*tanh(C1*xi)"
KINK_ENV = {"nu": 1.0, "C1": 0.5, "V0": 0.3, "v": 0.3, "C": 2 * 0.25 - 0.3 ** 2 / 2}


def ex(text):
    return normalize(parse_expression(text))


def branches_for(name):
    _, ode, _ = prepare_ode(load(name))
    return ode, solve_by_cases(ansatz_system(ode)[3])


def test_burgers_kink_satisfies_the_ode(burgers_ode):
    report = verify_ode(ex(KINK), burgers_ode, KINK_ENV)
    assert report.passed
    assert report.max_abs_residual <= 1e-12
    assert report.target == "IntegratedOde"
    assert report.grid.shape == (401,)
    assert report.parameter_instantiation["nu"] == 1.0


def test_burgers_kink_satisfies_the_pde(burgers):
    report = verify_pde(ex(KINK), burgers, KINK_ENV)
    assert report.target == "OriginalPde"
    assert report.max_abs_residual <= 1e-11
    assert report.extra_grid is not None


def test_tanh_profile_closed_form_residual_is_zero(burgers_ode):
    """u = V0 - 2 nu C1 tanh(C1 xi) gives -v u + u^2/2 - nu u' - C = 0 exactly at v = V0."""
    xs = np.linspace(-10, 10, 401)
    nu, c1, v0 = 1.0, 0.5, 0.3
    u = v0 - 2 * nu * c1 * np.tanh(c1 * xs)
    du = -2 * nu * c1 ** 2 / np.cosh(c1 * xs) ** 2
    res = -v0 * u + u * u / 2 - nu * du - KINK_ENV["C"]
    report = verify_ode(ex(KINK), burgers_ode, KINK_ENV)
    assert report.max_abs_residual == pytest.approx(np.max(np.abs(res)), abs=1e-14)


def test_perturbed_amplitude_fails(burgers_ode):
    bad = ex("V0 - (101/100)*2*nu*C1*tanh(C1*xi)")
    report = verify_ode(bad, burgers_ode, KINK_ENV)
    assert not report.passed
    assert report.max_abs_residual > 1e-4


def test_zero_profile_residual_is_the_constant(burgers_ode):
    report = verify_ode(ex("0"), burgers_ode, {"nu": 1.0, "v": 0.5, "C": 0.125})
    assert report.max_abs_residual == pytest.approx(0.125)


def test_scales_divide_the_raw_residual(burgers_ode):
    bad = ex("V0 - (101/100)*2*nu*C1*tanh(C1*xi)")
    raw = verify_ode(bad, burgers_ode, KINK_ENV, scale="absolute")
    prof = verify_ode(bad, burgers_ode, KINK_ENV, scale="profile")
    terms = verify_ode(bad, burgers_ode, KINK_ENV, scale="terms")
    assert prof.raw_max_abs_residual == raw.max_abs_residual == terms.raw_max_abs_residual
    assert prof.max_abs_residual < raw.max_abs_residual
    assert terms.max_abs_residual < prof.max_abs_residual
    with pytest.raises(ValueError):
        verify_ode(bad, burgers_ode, KINK_ENV, scale="loud")


def test_claimed_drp_kink_fails(drp_ode):
    """The quoted tanh profile leaves a residual of size C on the integrated equation."""
    cfg = DrpConfig(m=1, gamma=(Fraction(1, 10),), sigma=Fraction(1, 2), mu=1, re_h=1)
    env = {"sigma": float(cfg.sigma), "K": float(cfg.K), "v": float(cfg.K),
           "C": 1.0, "C1": 0.7, "V0": 0.0}
    report = verify_ode(ex(DRP_CLAIMED_PROFILE), drp_ode, env)
    assert not report.passed
    # (C/4) sech^2 - C; its largest magnitude sits in the tails
    assert report.max_abs_residual == pytest.approx(1.0, rel=1e-6)


def test_drp_constant_state_verifies(drp, drp_ode):
    _, branches = branches_for("drp")
    (b,) = branches
    env = sample_branch(b, drp_ode, np.random.default_rng(0))
    profile = apply_branch(b)
    assert verify_ode(profile, drp_ode, env).passed
    assert verify_pde(profile, drp, env, scale="terms").passed


@pytest.mark.parametrize("name", list(CORPUS))
def test_every_solved_branch_passes_a_scan(name):
    ode, branches = branches_for(name)
    for b in branches:
        if b.is_stuck:
            continue
        reports = scan_parameters(b, ode, n_samples=20, seed=1)
        assert len(reports) == 20
        assert all(r.passed for r in reports), max(r.max_abs_residual for r in reports)


def test_scan_absolute_on_a_moderate_box():
    ode, branches = branches_for("burgers")
    reports = scan_parameters(branches[1], ode, n_samples=20, seed=4, scale="absolute",
                              tol=1e-10, low=0.1, high=2.0)
    assert all(r.passed for r in reports)


def test_samples_respect_constraints():
    ode, branches = branches_for("burgers")
    rng = np.random.default_rng(9)
    for _ in range(50):
        env = sample_branch(branches[1], ode, rng)
        assert abs(_by_name(env, "C1")) >= 1e-6
        assert 1e-2 <= abs(_by_name(env, "nu")) <= 1e2


def _by_name(env, name):
    for k, val in env.items():
        if getattr(k, "name", k) == name:
            return val
    raise KeyError(name)


def test_fixed_values_are_honoured():
    ode, branches = branches_for("burgers")
    env = sample_branch(branches[1], ode, np.random.default_rng(0), fixed={"nu": 0.25})
    assert _by_name(env, "nu") == 0.25
    assert _by_name(env, "U1") == pytest.approx(-0.5 * _by_name(env, "C1"))


def test_stuck_branch_cannot_be_sampled():
    ode, branches = branches_for("mkdv")
    stuck = next(b for b in branches if b.is_stuck)
    with pytest.raises(ConstraintUnsatisfiable):
        sample_branch(stuck, ode, np.random.default_rng(0))


def test_scan_rejects_zero_samples(burgers_ode):
    _, branches = branches_for("burgers")
    with pytest.raises(ValueError):
        scan_parameters(branches[0], burgers_ode, n_samples=0)


def test_summary_and_dict(burgers_ode):
    report = verify_ode(ex(KINK), burgers_ode, KINK_ENV)
    assert report.summary().startswith("PASS IntegratedOde")
    d = report.to_dict()
    assert d["passed"] and d["scale"] == "absolute" and len(d["worst_point"]) == 1


def test_emit_csv(tmp_path):
    path = tmp_path / "kink.csv"
    emit_csv(ex(KINK), KINK_ENV, path, grid=(-1.0, 1.0, 5))
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["xi", "u"]
    assert len(rows) == 6
    xi, u = map(float, rows[3])
    assert xi == 0.0 and u == pytest.approx(0.3)
    xi, u = map(float, rows[5])
    assert u == pytest.approx(0.3 - math.tanh(0.5), abs=1e-15)
