"""
명령행 인터페이스 테스트 (종료 코드와 출력 형식)
"""
import json
from pathlib import Path

import pandas as pd
import pytest

from app.cli import main

from tests.conftest import fixture_path


EXAMPLE1 = str(fixture_path("example1"))
EXAMPLE2 = str(fixture_path("example2"))


def _write_problem(tmp_path: Path, **overrides) -> str:
    data = json.loads(Path(EXAMPLE1).read_text(encoding="utf-8"))
    data.update(overrides)
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_solve_text(capsys):
    assert main(["--problem", EXAMPLE1, "solve"]) == 0
    out = capsys.readouterr().out
    assert "q_star      : 1/3" in out
    assert "value       : 1285/1536" in out
    assert "T_delta     : 4" in out


def test_solve_json(capsys):
    assert main(["--problem", EXAMPLE1, "--format", "json", "--digits", "6", "solve"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["value"] == "1285/1536"
    assert payload["q1"] == ["1/6", "1/2"]
    assert payload["k_star"] == 3
    assert payload["decimal"]["value"] == "0.836589"
    assert payload["original_labels"]["q_star"] == "1/3"


def test_solve_infinite_learning_time(capsys):
    assert main(["--problem", EXAMPLE2, "solve"]) == 0
    assert "T_delta     : inf" in capsys.readouterr().out


def test_malformed_rational_exits_1(tmp_path, capsys):
    path = _write_problem(tmp_path, prior="3/0")
    assert main(["--problem", path, "solve"]) == 1
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["error"] == "parse_error"


def test_missing_file_exits_1(tmp_path):
    assert main(["--problem", str(tmp_path / "missing.json"), "solve"]) == 1


def test_invalid_problem_exits_2(tmp_path, capsys):
    path = _write_problem(tmp_path, discount="1")
    assert main(["--problem", path, "solve"]) == 2
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["error"] == "discount_out_of_range"


def test_usage_errors_exit_1():
    assert main(["--problem", EXAMPLE1, "simulate", "--paths", "0"]) == 1
    assert main(["--problem", EXAMPLE1, "--digits", "0", "solve"]) == 1
    assert main(["--problem", EXAMPLE1, "frobnicate"]) == 1


def test_trace_ladder_csv(capsys):
    assert main(["--problem", EXAMPLE1, "trace", "--ladder"]) == 0
    out = capsys.readouterr().out
    assert not out.startswith("#")
    assert len(out.strip().splitlines()) >= 4


def test_trace_all_sections(capsys):
    assert main(["--problem", EXAMPLE1, "trace"]) == 0
    out = capsys.readouterr().out
    for section in ("# envelope", "# ladder", "# values"):
        assert section in out


def test_compare_json(capsys):
    assert main(["--problem", EXAMPLE1, "--format", "json", "compare"]) == 0
    payload = json.loads(capsys.readouterr().out)
    values = {r["policy"]: r["principal_value"] for r in payload["results"]}
    assert values["optimal"] == "1285/1536"
    assert values["random"] == "4/5"
    assert all(payload["ordering"].values())
    assert payload["skipped"] == {}


def test_compare_reports_skipped(capsys):
    assert main(["--problem", EXAMPLE2, "compare"]) == 0
    out = capsys.readouterr().out
    assert "random:" in out
    assert "delayed:" in out


def test_verify_exit_codes(capsys):
    grid = ["--grid-p", "24", "--grid-w", "8"]
    assert main(["--problem", EXAMPLE1, "verify", *grid]) == 0
    assert "verified" in capsys.readouterr().out
    assert main(["--problem", EXAMPLE1, "verify", "--q", "1/2", *grid]) == 3
    assert "verification failed" in capsys.readouterr().out
    assert main(["--problem", EXAMPLE1, "verify", "--q", "3/4", *grid]) == 3


def test_simulate_tree_csv(tmp_path, capsys):
    out_csv = tmp_path / "tree.csv"
    assert main(["--problem", EXAMPLE1, "simulate", "--tree-depth", "4", "--out-csv", str(out_csv)]) == 0
    frame = pd.read_csv(out_csv)
    assert set(frame["depth"]) == {0, 1, 2, 3}
    assert "action" in frame.columns


def test_simulate_monte_carlo(capsys):
    args = ["--problem", EXAMPLE1, "--seed", "3", "simulate", "--paths", "5000", "--horizon", "30"]
    assert main(args) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["policy"] == "optimal"
    assert payload["n_paths"] == 5000
    assert payload["martingale_check"] is True
    assert main(args) == 0
    assert json.loads(capsys.readouterr().out) == payload


def test_simulate_horizon_below_learning_time(capsys):
    assert main(["--problem", EXAMPLE1, "simulate", "--paths", "10", "--horizon", "3"]) == 1
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["error"] == "horizon_too_small"


@pytest.mark.slow
def test_verify_with_oracle(tmp_path):
    dump = tmp_path / "grid.csv"
    assert main(["--problem", EXAMPLE1, "verify", "--oracle", "--dump-grid", str(dump)]) == 0
    assert dump.exists()
