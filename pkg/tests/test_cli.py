import json

import pytest

from fracdelay.cli import main
from test_model import EXAMPLE


def write_problem(tmp_path, text, name="problem.frac"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def read_csv(path):
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    rows = [[float(cell) for cell in line.split(",")] for line in lines[1:]]
    return header, rows


class TestSolveCommand:
    def test_trajectory_value_integer_order(self, tmp_path):
        # with classical order, x2 at the end of the second interval equals the
        # expanded quartic 5/486 + t + (7/9)t^2 + (2/9)t^3 + (1/2)t^4 at t=2/3
        problem = write_problem(tmp_path, EXAMPLE.replace("nu = 1/2", "nu = 1"))
        out = tmp_path / "traj.csv"
        assert main(["solve", problem, "--out-traj", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["t", "x1", "x2"]
        last = rows[-1]
        assert last[0] == pytest.approx(2 / 3, abs=1e-15)
        assert last[1] == pytest.approx(0.06790123456790123, abs=1e-13)
        assert last[2] == pytest.approx(1.1872427983539095, abs=1e-13)

    def test_times_strictly_increasing_with_unique_boundaries(self, tmp_path):
        problem = write_problem(tmp_path, EXAMPLE)
        out = tmp_path / "traj.csv"
        assert main(["solve", problem, "--out-traj", str(out)]) == 0
        _, rows = read_csv(out)
        times = [r[0] for r in rows]
        assert times[0] == 0.0
        assert times[-1] == pytest.approx(2 / 3, abs=1e-15)
        assert all(b > a for a, b in zip(times, times[1:]))
        assert sum(1 for t in times if t == pytest.approx(1 / 3, abs=1e-15)) == 1

    def test_sampling_stops_at_horizon(self, tmp_path):
        text = EXAMPLE.replace("horizon = 2/3", "horizon = 1/2")
        problem = write_problem(tmp_path, text)
        out = tmp_path / "traj.csv"
        assert main(["solve", problem, "--out-traj", str(out)]) == 0
        _, rows = read_csv(out)
        times = [r[0] for r in rows]
        assert times[-1] == pytest.approx(0.5, abs=1e-15)
        assert all(t <= 0.5 + 1e-15 for t in times)

    def test_deterministic_outputs(self, tmp_path):
        problem = write_problem(tmp_path, EXAMPLE)
        a_traj, a_coeff = tmp_path / "a.csv", tmp_path / "ac.csv"
        b_traj, b_coeff = tmp_path / "b.csv", tmp_path / "bc.csv"
        assert main(["solve", problem, "--out-traj", str(a_traj), "--out-coeffs", str(a_coeff)]) == 0
        assert main(["solve", problem, "--out-traj", str(b_traj), "--out-coeffs", str(b_coeff)]) == 0
        assert a_traj.read_bytes() == b_traj.read_bytes()
        assert a_coeff.read_bytes() == b_coeff.read_bytes()

    def test_coefficient_dump_columns(self, tmp_path):
        problem = write_problem(tmp_path, EXAMPLE)
        out = tmp_path / "coeffs.csv"
        assert main(["solve", problem, "--out-coeffs", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "segment,component,k,exponent,coeff"
        # first interval: x1 identically zero, x2 has entries at k=1 and k=3
        seg1 = [l.split(",") for l in lines[1:] if l.startswith("1,")]
        assert [(r[1], r[2], r[3]) for r in seg1] == [("2", "1", "1/2"), ("2", "3", "3/2")]

    def test_json_report(self, tmp_path):
        problem = write_problem(tmp_path, EXAMPLE)
        out = tmp_path / "report"
        code = main(["solve", problem, "--format", "json", "--out-traj", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert set(payload) == {"t", "x"}

    def test_json_stdout_mirrors_report_fields(self, tmp_path, capsys):
        problem = write_problem(tmp_path, EXAMPLE)
        assert main(["solve", problem, "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert set(payload) == {"plan", "segments", "trajectory", "oracle_max_abs_error"}
        assert payload["plan"] == {"tau_star": "1/3", "multipliers": [1, 2], "num_segments": 2}
        assert payload["oracle_max_abs_error"] is None

    def test_oracle_check_reports_small_error(self, tmp_path, capsys):
        problem = write_problem(tmp_path, EXAMPLE)
        assert main(["solve", problem, "--check-oracle", "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["oracle_max_abs_error"] is not None
        assert float(payload["oracle_max_abs_error"]) <= 1e-5


class TestExitCodes:
    def test_validation_failure_exits_one(self, tmp_path, capsys):
        problem = write_problem(tmp_path, EXAMPLE.replace("nu = 1/2", "nu = 3/2"))
        assert main(["solve", problem]) == 1
        assert "out of (0,1]" in capsys.readouterr().err

    def test_missing_file_exits_one(self, tmp_path, capsys):
        assert main(["solve", str(tmp_path / "absent.frac")]) == 1
        assert "error:" in capsys.readouterr().err

    def test_syntax_error_exits_one(self, tmp_path, capsys):
        problem = write_problem(tmp_path, EXAMPLE.replace("2*t + 1", "2*зю + 1"))
        assert main(["solve", problem]) == 1
        assert "line" in capsys.readouterr().err

    def test_usage_errors_exit_two(self, capsys):
        assert main([]) == 2
        assert main(["solve"]) == 2
        assert main(["frobnicate"]) == 2
        capsys.readouterr()
