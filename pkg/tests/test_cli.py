import json

import pytest

from solwave.cli import main
from solwave.corpus import DRP_CLAIMED_PROFILE


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_reduce_builtin(capsys):
    code, out, _ = run(capsys, "reduce", "--builtin", "burgers")
    assert code == 0
    assert "integrated:" in out and "integration constant: C" in out


def test_reduce_without_constant(capsys):
    code, out, _ = run(capsys, "reduce", "--builtin", "burgers", "--no-constant")
    assert code == 0 and "pinned to 0" in out


def test_solve_burgers_json(capsys):
    code, out, _ = run(capsys, "solve", "--builtin", "burgers", "--samples", "5", "--json", "-")
    assert code == 0
    data = json.loads(out[out.index("{"):])
    assert data["verified"] is True
    assert data["ansatz_order"] == 1 and data["multiplier"] == {"d": 2, "q": 0}
    assert [b["class"] for b in data["branches"]] == ["Trivial", "Kink"]
    kink = data["branches"][1]
    assert kink["assignments"]["U1"] == "-2*nu*C1"
    assert kink["free"] == ["V0", "C1"]
    assert kink["relations"] == ["-C - V0^2/2 + 2*nu^2*C1^2 = 0"]
    assert kink["residual"]["passed"] and kink["residual"]["samples"] == 5
    assert kink["residual"]["ode_max"] <= 1e-9 and kink["residual"]["pde_max"] <= 1e-9
    assert data["loss_report"]["flagged"] == 1
    assert data["loss_report"]["entries"][1]["status"] == "LOST_AT_C0"


def test_solve_without_constant(capsys):
    code, out, _ = run(capsys, "solve", "--builtin", "burgers", "--no-constant", "--samples", "3",
                       "--json", "-")
    assert code == 0
    data = json.loads(out[out.index("{"):])
    kinks = [b for b in data["branches"] if b["class"] == "Kink"]
    assert len(kinks) == 2
    assert all(b["free"] == ["C1"] for b in kinks)


def test_solve_drp_reports_the_audit(capsys, tmp_path):
    path = tmp_path / "drp.json"
    code, out, _ = run(capsys, "solve", "--builtin", "drp", "--samples", "3", "--json", str(path))
    assert code == 0
    assert "audit of the claimed kink: FAIL" in out
    data = json.loads(path.read_text())
    assert [b["class"] for b in data["branches"]] == ["Trivial"]
    assert data["audit"]["claimed_profile"] == DRP_CLAIMED_PROFILE
    assert data["audit"]["report"]["passed"] is False
    assert data["audit"]["report"]["max_abs_residual"] == pytest.approx(1.0, rel=1e-6)


def test_solve_drp_with_scheme_coefficients(capsys):
    code, out, _ = run(capsys, "solve", "--builtin", "drp", "--m", "2", "--gamma", "1/3,1/6",
                       "--sigma", "1/2", "--mu", "1", "--reh", "2", "--samples", "2")
    assert code == 0
    assert "Trivial" in out


def test_bad_drp_coefficients(capsys):
    code, _, err = run(capsys, "solve", "--builtin", "drp", "--m", "2", "--gamma", "1/3",
                       "--sigma", "1/2", "--mu", "1", "--reh", "2")
    assert code != 0 and err


def test_solve_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "solve", "--builtin", "burgers", "--samples", "4", "--seed", "7", "--json", str(a))
    run(capsys, "solve", "--builtin", "burgers", "--samples", "4", "--seed", "7", "--json", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_solve_from_file_with_params(capsys, tmp_path):
    src = tmp_path / "eq.pde"
    src.write_text("param nu\ndt(u) + u*dx(u) - nu*dx(dx(u)) = 0\n")
    code, out, _ = run(capsys, "solve", str(src), "--params", "nu=1/2", "--samples", "3")
    assert code == 0
    assert "U1 = -C1" in out


def test_unknown_param_override(capsys, tmp_path):
    src = tmp_path / "eq.pde"
    src.write_text("param nu\ndt(u) + u*dx(u) - nu*dx(dx(u)) = 0\n")
    code, _, err = run(capsys, "solve", str(src), "--params", "mu=1")
    assert code == 3 and "mu" in err


def test_unbound_parameter_in_verify(capsys):
    code, _, err = run(capsys, "verify", "--builtin", "burgers", "--profile", "V0", "--params", "V0=1")
    assert code == 3 and "UnboundSymbol" in err


def test_order_must_be_positive(capsys):
    code, _, _ = run(capsys, "solve", "--builtin", "burgers", "--order", "0")
    assert code == 3


def test_syntax_error_exit_code(capsys, tmp_path):
    src = tmp_path / "bad.pde"
    src.write_text("param nu\ndt(u) + u*dx(u) - * nu = 0\n")
    code, _, err = run(capsys, "solve", str(src))
    assert code == 2
    assert "line 2" in err


def test_verify_profile(capsys):
    code, out, _ = run(capsys, "verify", "--builtin", "burgers", "--profile", "V0 - 2*nu*C1*tanh(C1*xi)",
                       "--params", "nu=1,C1=1/2,V0=3/10,v=3/10,C=91/200", "--pde")
    assert code == 0
    assert out.count("PASS") == 2


def test_verify_claimed_drp_profile_fails(capsys):
    code, out, _ = run(capsys, "verify", "--builtin", "drp", "--profile", DRP_CLAIMED_PROFILE,
                       "--params", "sigma=1/2,K=1/10,v=1/10,C=1,C1=1,V0=0", "--tol", "1e-6")
    assert code == 4
    assert out.startswith("FAIL")


def test_verify_profile_from_file_and_csv(capsys, tmp_path):
    prof = tmp_path / "kink.txt"
    prof.write_text("V0 - 2*nu*C1*tanh(C1*xi)\n")
    csv_path = tmp_path / "kink.csv"
    code, _, _ = run(capsys, "verify", "--builtin", "burgers", "--profile", f"@{prof}",
                     "--params", "nu=1,C1=1/2,V0=3/10,v=3/10,C=91/200",
                     "--grid=-5:5:11", "--emit-csv", str(csv_path))
    assert code == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "xi,u" and len(lines) == 12


def test_verify_round_trip(capsys, tmp_path):
    path = tmp_path / "sol.json"
    run(capsys, "solve", "--builtin", "burgers-kdv", "--samples", "3", "--json", str(path))
    code, out, _ = run(capsys, "verify", "--builtin", "burgers-kdv", "--solution", str(path))
    assert code == 0
    assert out.count("PASS IntegratedOde") == 3


def test_verify_needs_input(capsys):
    code, _, err = run(capsys, "verify", "--builtin", "burgers")
    assert code == 3 and "--profile" in err


def test_emit_csv_from_solve(capsys, tmp_path):
    path = tmp_path / "u.csv"
    code, _, _ = run(capsys, "solve", "--builtin", "burgers", "--samples", "2", "--emit-csv", str(path))
    assert code == 0
    assert path.read_text().startswith("xi,u\n")


def test_stuck_branches_do_not_fail_the_run(capsys):
    code, out, _ = run(capsys, "solve", "--builtin", "mkdv", "--samples", "2")
    assert code == 0
    assert "unsolved:" in out


def test_corpus_command(capsys):
    code, out, _ = run(capsys, "corpus", "--samples", "2")
    assert code == 0
    assert out.count("verified") == 7
    assert "burgers " in out and "lost_at_C0=1" in out


def test_missing_source(capsys):
    code, _, err = run(capsys, "solve")
    assert code != 0 and err
