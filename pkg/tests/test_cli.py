"""Command-line interface: subcommands, exit codes, and printed reports."""

import numpy as np
import pytest

from triform import (
    CanonicalTriangleParams,
    bundled_scenario,
    canonical_scenario,
    save_scenario,
    scenario_to_dict,
)
from triform.cli import main

ROOT2 = np.sqrt(2.0)


@pytest.fixture()
def eight_path(tmp_path):
    path = tmp_path / "eight.json"
    save_scenario(bundled_scenario(), path)
    return str(path)


@pytest.fixture()
def saddle_path(tmp_path):
    params = CanonicalTriangleParams(a=0.0, b=6.0, c=1.0, gain=4.0)
    path = tmp_path / "saddle.json"
    save_scenario(canonical_scenario(params, [0.0, -1.0]), path)
    return str(path)


# --- validate ---------------------------------------------------------------

def test_validate_ok(eight_path, capsys):
    assert main(["validate", eight_path]) == 0
    out = capsys.readouterr().out
    assert "valid: 8 agents, 13 edges, 6 cliques" in out


def test_validate_reports_violations(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(
        '{"agent_count": 3,'
        ' "edges": [[1, 2, 6.0], [2, 3, 4.242640687119286], [3, 1, 4.242640687119286]],'
        ' "cliques": [[1, 2, 3, 10.0]]}'
    )
    assert main(["validate", str(bad)]) == 1
    out = capsys.readouterr().out
    assert "area-distance-mismatch" in out


def test_validate_parse_error(tmp_path, capsys):
    bad = tmp_path / "garbage.json"
    bad.write_text("{nope")
    assert main(["validate", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err


def test_validate_missing_file(tmp_path, capsys):
    assert main(["validate", str(tmp_path / "none.json")]) == 2
    assert "cannot read" in capsys.readouterr().err


# --- analyze ----------------------------------------------------------------

def test_analyze_isosceles_thresholds(capsys):
    assert main(["analyze", "--b", "6", "--c", "1"]) == 0
    out = capsys.readouterr().out
    assert "K_star = 18" in out
    assert "K_zero = 1.97142273814" in out  # 12 significant digits


def test_analyze_high_gain(capsys):
    assert main(["analyze", "--b", "6", "--c", "1", "--K", "20"]) == 0
    out = capsys.readouterr().out
    assert "globally convergent: yes (K > K_star = 18)" in out
    assert "almost globally convergent: yes" in out
    assert "Pa" in out


def test_analyze_mid_gain(capsys):
    assert main(["analyze", "--b", "6", "--c", "1", "--K", "4"]) == 0
    out = capsys.readouterr().out
    assert "globally convergent: no (K <= K_star = 18)" in out
    assert "almost globally convergent: yes" in out
    assert "saddle" in out and "unstable" in out


def test_analyze_threshold_boundary_is_degenerate(capsys):
    assert main(["analyze", "--b", "1", "--c", "1", "--K", "0.5"]) == 0
    out = capsys.readouterr().out
    assert "degenerate" in out


def test_analyze_absent_k_zero(capsys):
    assert main(["analyze", "--b", "1", "--c", "1"]) == 0
    assert "K_zero = absent (b^2/c^2 < 2)" in capsys.readouterr().out


def test_analyze_general_target(capsys):
    assert main(["analyze", "--a", "3", "--b", "1", "--c", "1"]) == 0
    out = capsys.readouterr().out
    assert "a^2/c^2 = 9" in out
    assert "misplaced stable equilibrium" in out


def test_analyze_general_with_numeric_refinement(capsys):
    assert main(["analyze", "--a", "3", "--b", "1", "--c", "1", "--K", "80"]) == 0
    out = capsys.readouterr().out
    assert "numeric equilibria at K = 80" in out
    assert out.count("stable") >= 2


def test_analyze_rejects_nonpositive(capsys):
    with pytest.raises(SystemExit) as err:
        main(["analyze", "--b", "-6", "--c", "1"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["analyze", "--b", "6", "--c", "1", "--K", "0"])
    assert err.value.code == 2


# --- simulate ---------------------------------------------------------------

def test_simulate_eight(eight_path, tmp_path, capsys):
    out_file = tmp_path / "traj.txt"
    assert main(["simulate", eight_path, "-o", str(out_file)]) == 0
    out = capsys.readouterr().out
    assert "in target: yes" in out
    assert "total potential monotone: yes" in out
    assert out_file.exists()
    data = np.loadtxt(out_file, skiprows=2)
    assert data.shape[1] == 17


def test_simulate_saddle_capture_fails_target(saddle_path, tmp_path, capsys):
    out_file = tmp_path / "traj.txt"
    assert main(["simulate", saddle_path, "-o", str(out_file)]) == 1
    out = capsys.readouterr().out
    assert "in target: no" in out
    assert "terminal reason: gradient_stop" in out


def test_simulate_time_limit_fails(eight_path, tmp_path, capsys):
    code = main(["simulate", eight_path, "-o", str(tmp_path / "t.txt"),
                 "--t-max", "0.01"])
    assert code == 1
    assert "terminal reason: time_limit" in capsys.readouterr().out


def test_simulate_adaptive_method(saddle_path, tmp_path, capsys):
    # rk45 needs a stop threshold above its stall scale to terminate early
    code = main(["simulate", saddle_path, "-o", str(tmp_path / "t.txt"),
                 "--method", "rk45", "--gradient-stop", "1e-6"])
    assert code == 1  # same wrong-point capture, different integrator
    assert "gradient_stop" in capsys.readouterr().out


def test_simulate_needs_initial(tmp_path, capsys):
    path = tmp_path / "no_init.json"
    path.write_text(
        '{"agent_count": 3,'
        ' "edges": [[1, 2, 2.0], [1, 3, 1.4142135623730951], [2, 3, 1.4142135623730951]],'
        ' "cliques": [[1, 2, 3, 1.0]]}'
    )
    assert main(["simulate", str(path), "-o", str(tmp_path / "t.txt")]) == 2
    assert "no initial positions" in capsys.readouterr().err


def test_simulate_unwritable_output(eight_path, tmp_path, capsys):
    code = main(["simulate", eight_path, "-o", str(tmp_path / "no_dir" / "t.txt")])
    assert code == 2
    assert "cannot write" in capsys.readouterr().err


def test_simulate_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    assert main(["simulate", str(bad), "-o", str(tmp_path / "t.txt")]) == 2


# --- basin ------------------------------------------------------------------

def test_basin_all_target(tmp_path, capsys):
    out_file = tmp_path / "basin.txt"
    code = main(["basin", "--b", "6", "--c", "1", "--K", "20",
                 "--grid", "-10", "10", "-10", "10", "--res", "5",
                 "-o", str(out_file)])
    assert code == 0
    out = capsys.readouterr().out
    assert "Pa: 25 (100%)" in out
    assert out_file.exists()
    assert len(out_file.read_text().splitlines()) == 2 + 25


def test_basin_general_target(tmp_path, capsys):
    code = main(["basin", "--a", "3", "--b", "1", "--c", "1", "--K", "80",
                 "--grid", "-4", "4", "-4", "4", "--res", "5",
                 "-o", str(tmp_path / "b.txt")])
    assert code == 0
    out = capsys.readouterr().out
    assert "numeric" in out


def test_basin_rejects_bad_grid(tmp_path):
    with pytest.raises(SystemExit) as err:
        main(["basin", "--b", "6", "--c", "1", "--K", "20",
              "--grid", "10", "-10", "-10", "10", "--res", "5",
              "-o", str(tmp_path / "b.txt")])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["basin", "--b", "6", "--c", "1", "--K", "20",
              "--grid", "-10", "10", "-10", "10", "--res", "0",
              "-o", str(tmp_path / "b.txt")])
    assert err.value.code == 2


# --- top level --------------------------------------------------------------

def test_requires_subcommand():
    with pytest.raises(SystemExit) as err:
        main([])
    assert err.value.code == 2


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2
