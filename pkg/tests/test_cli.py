import json
import subprocess
import sys

import pytest

from optiplan import load_scenario
from optiplan.cli import main


def run_cli(argv):
    return main(argv)


class TestGen:
    def test_writes_consecutive_seeds(self, tmp_path):
        out = tmp_path / "scenarios"
        assert run_cli(["gen", "--seed", "7", "--count", "3", "--out", str(out)]) == 0
        for seed in (7, 8, 9):
            s = load_scenario(out / f"scenario_{seed}.json")
            assert s.seed == seed

    def test_rerun_byte_identical(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        run_cli(["gen", "--seed", "1", "--count", "1", "--out", str(a)])
        run_cli(["gen", "--seed", "1", "--count", "1", "--out", str(b)])
        assert (a / "scenario_1.json").read_bytes() == (b / "scenario_1.json").read_bytes()

    def test_infeasible_config_exits_nonzero(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "generation": {
                        "bounds_min": [-1, -1, -1],
                        "bounds_max": [1, 1, 1],
                        "min_goal_distance": 50.0,
                        "max_retries": 10,
                    }
                }
            )
        )
        code = run_cli(["gen", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert code == 2
        assert "min_goal_distance" in capsys.readouterr().err


class TestPlan:
    def test_empty_world_reaches_goal(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "generation": {"n_obstacles": 0},
                    "plan": {"budget": 300},
                    "out_dir": str(tmp_path / "out"),
                }
            )
        )
        assert run_cli(["plan", "--config", str(cfg), "--seed", "3"]) == 0
        assert "reached_goal" in capsys.readouterr().out
        lines = (tmp_path / "out" / "trajectory.csv").read_text().splitlines()
        assert lines[0] == "t,px,py,pz,vx,vy,vz,action,reward"
        assert len(lines) > 1

    def test_scenario_file_input(self, tmp_path, capsys):
        out = tmp_path / "s"
        run_cli(["gen", "--seed", "4", "--count", "1", "--out", str(out)])
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"out_dir": str(tmp_path / "out"), "plan": {"budget": 400}}))
        code = run_cli(
            ["plan", "--config", str(cfg), "--scenario", str(out / "scenario_4.json")]
        )
        assert code == 0

    def test_malformed_config(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text("{nope")
        assert run_cli(["plan", "--config", str(cfg)]) == 2
        assert "error" in capsys.readouterr().err

    def test_unknown_config_field_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"plan": {"budgett": 10}}))
        assert run_cli(["plan", "--config", str(cfg)]) == 2
        assert "budgett" in capsys.readouterr().err


class TestBench:
    def make_config(self, tmp_path, episodes=2):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "generation": {"n_obstacles": 0},
                    "bench": {
                        "seed_start": 0,
                        "episodes": episodes,
                        "approaches": [
                            {"label": "uniform", "plan": {"mode": "uniform", "budget": 57}},
                            {"label": "optimistic", "plan": {"mode": "optimistic", "budget": 57}},
                        ],
                    },
                    "out_dir": str(tmp_path / "out"),
                }
            )
        )
        return cfg

    def test_two_approach_table(self, tmp_path, capsys):
        cfg = self.make_config(tmp_path)
        assert run_cli(["bench", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "uniform:" in out and "optimistic:" in out
        table = (tmp_path / "out" / "bench_table.csv").read_text().splitlines()
        assert len(table) == 3  # header + 2 rows
        episodes = (tmp_path / "out" / "bench_episodes.csv").read_text().splitlines()
        assert len(episodes) == 5  # header + 2 approaches x 2 episodes

    def test_assert_gate_passes(self, tmp_path):
        cfg = self.make_config(tmp_path)
        assert run_cli(["bench", "--config", str(cfg), "--assert", "success>=0.9"]) == 0

    def test_assert_gate_fails(self, tmp_path, capsys):
        cfg = self.make_config(tmp_path)
        # budget high enough to succeed; gate above 1.0 must fail
        assert run_cli(["bench", "--config", str(cfg), "--assert", "success>=1.1"]) == 1
        assert "ASSERT FAILED" in capsys.readouterr().err

    def test_bad_assert_expression(self, tmp_path, capsys):
        cfg = self.make_config(tmp_path)
        assert run_cli(["bench", "--config", str(cfg), "--assert", "speed<=3"]) == 2


class TestServe:
    def test_stdio_session_subprocess(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"generation": {"n_obstacles": 2}}))
        requests = "\n".join(
            [
                '{"type": "hello"}',
                '{"type": "reset", "seed": 1}',
                '{"type": "step", "action": 1}',
                '{"type": "bogus"}',
                '{"type": "close"}',
            ]
        )
        proc = subprocess.run(
            [sys.executable, "-m", "optiplan.cli", "serve", "--config", str(cfg)],
            input=requests + "\n",
            capture_output=True,
            text=True,
            timeout=60,
        )
        assert proc.returncode == 0
        kinds = [json.loads(l)["type"] for l in proc.stdout.splitlines()]
        assert kinds == ["hello_ack", "state", "state", "error", "close_ack"]
