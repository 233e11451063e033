import json

import pytest

from nhsteer.cli import _glue_negative_values, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# planning round trips


def test_plan_and_verify_nhi(tmp_path, capsys):
    plan_file = tmp_path / "plan.json"
    code, out, err = run(
        capsys,
        "plan", "nhi", "--from", "0,0,0", "--to", "0,0,1",
        "--family", "legendre", "--out", str(plan_file),
    )
    assert code == 0
    assert "wrote" in err
    data = json.loads(plan_file.read_text())
    assert data["system"] == "nhi"
    scales = [
        term["scale"]
        for sig in data["phases"][-1]["inputs"]
        for term in sig["terms"]
    ]
    # the unit transfer needs amplitude sqrt(15)/2 on both shapes
    assert any(abs(abs(s) - 1.9364916731037085) < 1e-12 for s in scales)
    assert all(abs(abs(s) - 1.9364916731037085) < 1e-12 for s in scales)

    code, out, err = run(capsys, "verify", "--plan", str(plan_file))
    assert code == 0
    assert "endpoint error" in out
    assert "within tolerance" in out


def test_plan_interval_with_negative_bound(tmp_path, capsys):
    plan_file = tmp_path / "plan.json"
    code, _, _ = run(
        capsys,
        "plan", "nhi", "--from", "0,0,0", "--to", "1,2,-0.5",
        "--interval", "-1,1", "--family", "chebyshev_second",
        "--out", str(plan_file),
    )
    assert code == 0
    code, out, _ = run(capsys, "verify", "--plan", str(plan_file))
    assert code == 0


def test_glue_negative_values():
    argv = ["plan", "nhi", "--interval", "-1,1", "--from", "0,0,0"]
    glued = _glue_negative_values(argv)
    assert "--interval=-1,1" in glued
    assert "--from" in glued  # 0,0,0 is not negative, left alone


def test_plan_optimal_round_trip(tmp_path, capsys):
    plan_file = tmp_path / "opt.json"
    code, _, _ = run(
        capsys,
        "plan", "nhi", "--from", "0,0,0", "--to", "0,0,1",
        "--optimal", "--out", str(plan_file),
    )
    assert code == 0
    data = json.loads(plan_file.read_text())
    assert data["closed_form"] == "chebyshev_minimum_energy"
    assert data["cost"] == 1.0
    code, out, _ = run(capsys, "verify", "--plan", str(plan_file))
    assert code == 0


def test_plan_optimal_rejects_direct_motion(capsys):
    code, _, err = run(
        capsys, "plan", "nhi", "--from", "0,0,0", "--to", "1,0,1", "--optimal"
    )
    assert code == 1
    assert "direct coordinates" in err


def test_plan_and_verify_gnhi(tmp_path, capsys):
    plan_file = tmp_path / "gnhi.json"
    code, _, _ = run(
        capsys,
        "plan", "gnhi", "--m", "3",
        "--from", "0,0,0,0,0,0", "--to", "1,-2,0.5,1.5,-0.75,2",
        "--family", "trig", "--out", str(plan_file),
    )
    assert code == 0
    code, out, _ = run(capsys, "verify", "--plan", str(plan_file))
    assert code == 0


def test_plan_gnhi_bad_arity(capsys):
    code, _, err = run(
        capsys, "plan", "gnhi", "--m", "3", "--from", "0,0,0", "--to", "1,2,3"
    )
    assert code == 1
    assert "lexicographic" in err


def test_plan_and_verify_so3_both_modes(tmp_path, capsys):
    target = "0.36,0.48,-0.8,-0.8,0.6,0,0.48,0.64,0.6"
    for mode in ("constant", "underactuated"):
        plan_file = tmp_path / f"so3_{mode}.json"
        code, _, _ = run(
            capsys,
            "plan", "so3", "--from", "identity", "--to", target,
            "--duration", "2", "--mode", mode, "--out", str(plan_file),
        )
        assert code == 0, mode
        data = json.loads(plan_file.read_text())
        assert data["system"] == "so3" and data["mode"] == mode
        code, out, _ = run(capsys, "verify", "--plan", str(plan_file))
        assert code == 0, mode
        assert "within tolerance" in out


def test_verify_flags_tampered_plan(tmp_path, capsys):
    plan_file = tmp_path / "plan.json"
    run(capsys, "plan", "nhi", "--from", "0,0,0", "--to", "0,0,1", "--out", str(plan_file))
    data = json.loads(plan_file.read_text())
    data["predicted_endpoint"]["x3"] = 1.1  # no longer what the inputs produce
    plan_file.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", "--plan", str(plan_file))
    assert code == 1
    assert "exceeds tolerance" in out


# ---------------------------------------------------------------------------
# simulation output


def test_simulate_csv_schema(tmp_path, capsys):
    plan_file = tmp_path / "plan.json"
    run(capsys, "plan", "nhi", "--from", "0.5,-0.25,0", "--to", "1,1,1", "--out", str(plan_file))
    csv_file = tmp_path / "traj.csv"
    code, _, _ = run(
        capsys, "simulate", "--plan", str(plan_file), "--steps", "200", "--out", str(csv_file)
    )
    assert code == 0
    lines = csv_file.read_text().strip().splitlines()
    assert lines[0] == "t,x1,x2,x3,u1,u2"
    first = [float(v) for v in lines[1].split(",")]
    assert first[:4] == [0.0, 0.5, -0.25, 0.0]


def test_simulate_so3_csv(tmp_path, capsys):
    plan_file = tmp_path / "so3.json"
    run(
        capsys,
        "plan", "so3", "--from", "identity",
        "--to", "0.36,0.48,-0.8,-0.8,0.6,0,0.48,0.64,0.6",
        "--duration", "2", "--out", str(plan_file),
    )
    code, out, _ = run(capsys, "simulate", "--plan", str(plan_file), "--steps", "100")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("t,g11,g12,g13,g21,")
    assert len(lines) == 102  # header + steps + 1 samples


# ---------------------------------------------------------------------------
# fuel reports


def test_fuel_single_family_json(capsys):
    code, out, _ = run(capsys, "fuel", "--target", "1", "--family", "legendre")
    assert code == 0
    data = json.loads(out)
    assert abs(data["c"] - 3.75) < 1e-12
    assert abs(data["min_fuel"] - 3.3980884896942447) < 1e-12
    assert abs(data["grid_min_fuel"] - data["min_fuel"]) < 1e-6


def test_fuel_compare_csv(tmp_path, capsys):
    out_file = tmp_path / "fuel.csv"
    code, _, _ = run(
        capsys,
        "fuel", "--target", "1",
        "--compare", "trig,legendre,chebyshev_first",
        "--out", str(out_file),
    )
    assert code == 0
    lines = out_file.read_text().strip().splitlines()
    assert lines[0] == "family,odd,even,c1,c2,c,b1,b2,min_fuel,grid_min_fuel,sim_error"
    families = [line.split(",")[0] for line in lines[1:]]
    assert families == ["trig", "legendre", "chebyshev_first"]  # sorted by fuel


def test_fuel_rejects_zero_target(capsys):
    code, _, err = run(capsys, "fuel", "--target", "0")
    assert code == 1
    assert "error:" in err


# ---------------------------------------------------------------------------
# published-value reproduction

def test_paper_repro_report(capsys):
    code, out, _ = run(capsys, "paper-repro")
    assert code == 0
    lines = out.strip().splitlines()
    assert sum(1 for ln in lines if ln.rstrip().endswith(" ok")) == 8
    assert sum(1 for ln in lines if ln.rstrip().endswith("paper-deviation")) == 3
    assert lines[-1] == "8 ok, 3 paper-deviation, 0 fail"


def test_paper_repro_deterministic(capsys):
    _, first, _ = run(capsys, "paper-repro")
    _, second, _ = run(capsys, "paper-repro")
    assert first == second


def test_plan_output_deterministic(capsys):
    argv = ("plan", "nhi", "--from", "0.1,0.2,0.3", "--to", "-1,2,-3", "--family", "trig")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


# ---------------------------------------------------------------------------
# exit codes and environment


def test_usage_errors_exit_two(capsys):
    code, _, _ = run(capsys, "plan", "nhi", "--from", "0,0", "--to", "0,0,1")
    assert code == 2  # triple needed
    code, _, _ = run(capsys, "plan", "nhi", "--from", "0,0,0", "--to", "0,0,1", "--family", "fourier")
    assert code == 2  # not a family choice
    code, _, _ = run(capsys, "frobnicate")
    assert code == 2  # unknown command


def test_domain_errors_exit_one(capsys):
    code, _, err = run(
        capsys,
        "plan", "so3", "--from", "identity", "--to", "1,0,0,0,1,0",  # 6 floats, not 9
        "--duration", "2",
    )
    assert code == 1
    assert "error:" in err


def test_out_dir_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("NHSTEER_OUT_DIR", str(tmp_path))
    code, _, err = run(
        capsys,
        "plan", "nhi", "--from", "0,0,0", "--to", "0,0,1", "--out", "sub/plan.json",
    )
    assert code == 0
    assert (tmp_path / "sub" / "plan.json").exists()
