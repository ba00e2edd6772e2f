"""Experiment orchestration, artifact emission, and the CLI surface."""

import json

import numpy as np
import pytest

from efql.cli import main
from efql.config import from_dict
from efql.harness import (
    emit_artifacts,
    read_run_csv,
    run_compare,
    run_experiment,
    run_single,
    write_run_csv,
)
from efql.metrics import summarize_run


def tiny_config(**extra):
    base = {"env": "chain", "episodes": 12, "max_steps": 25, "seeds": [1, 2],
            "segment_length": 3, "batch_size": 4, "buffer_capacity": 50,
            "epsilon_decay_episodes": 10}
    base.update(extra)
    return from_dict(base)


class TestRunExperiment:
    def test_one_summary_per_seed_in_order(self, tmp_path):
        cfg = tiny_config(seeds=[5, 3, 8])
        summaries = run_experiment(cfg)
        assert [s.seed for s in summaries] == [5, 3, 8]
        assert all(s.per_episode_returns.size == cfg.episodes for s in summaries)

    def test_deterministic_across_invocations(self):
        cfg = tiny_config()
        assert run_experiment(cfg) == run_experiment(cfg)

    def test_zero_step_episodes(self):
        cfg = tiny_config(max_steps=0, episodes=1, seeds=[1])
        (summary,) = run_experiment(cfg)
        assert summary.per_episode_returns[0] == 0.0

    def test_seeds_differ(self):
        cfg = tiny_config()
        a, b = run_experiment(cfg)
        assert not np.array_equal(a.per_episode_returns, b.per_episode_returns)

    def test_all_agents_runnable(self):
        for agent in ("enhanced-fql", "nstep-fql", "fuzzy-sarsa"):
            cfg = tiny_config(agent=agent, seeds=[1], episodes=4)
            (summary,) = run_experiment(cfg)
            assert np.isfinite(summary.per_episode_returns).all()

    def test_cartpole_smoke(self):
        cfg = from_dict({"episodes": 2, "max_steps": 40, "seeds": [1]})
        (summary,) = run_experiment(cfg)
        assert summary.per_episode_returns.shape == (2,)
        assert np.all(summary.per_episode_returns <= 0.0)


class TestCompare:
    def test_all_three_agents_shared_seeds(self):
        cfg = tiny_config(seeds=[4])
        results = run_compare(cfg)
        assert set(results) == {"enhanced-fql", "nstep-fql", "fuzzy-sarsa"}
        assert all(len(v) == 1 and v[0].seed == 4 for v in results.values())


class TestArtifacts:
    def test_csv_line_count_and_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        returns = rng.uniform(-500, -1, 3)
        s = summarize_run("enhanced-fql", 1, returns, rng.uniform(0, 1, 3),
                          rng.uniform(0, 0.3, 3))
        path = tmp_path / "run.csv"
        write_run_csv(path, s)
        lines = path.read_text().strip().split("\n")
        assert len(lines) == 4
        assert lines[0] == "episode,return,mean_abs_td,update_ms"
        back = read_run_csv(path)
        np.testing.assert_array_equal(back["return"], returns)  # exact round trip
        np.testing.assert_array_equal(back["episode"], [1, 2, 3])

    def test_summary_json_medians(self, tmp_path):
        summaries = [summarize_run("enhanced-fql", i, [r] * 10, [0.0] * 10, [0.0] * 10)
                     for i, r in enumerate((-100.0, -200.0, -300.0))]
        cfg = tiny_config(output_dir=str(tmp_path / "out"))
        emit_artifacts({"enhanced-fql": summaries}, cfg)
        data = json.loads((tmp_path / "out" / "summary.json").read_text())
        med = data["medians"]["enhanced-fql"]
        assert med["median_avg_return_last_10pct"] == -200.0
        assert len(data["runs"]) == 3
        for entry in data["runs"]:
            assert set(entry) == {"agent", "seed", "avg_return_last_10pct",
                                  "mean_update_time_ms", "convergence_episode"}

    def test_svg_only_when_requested(self, tmp_path):
        summaries = [summarize_run("enhanced-fql", 1, [-100.0] * 10, [0.0] * 10,
                                   [0.0] * 10)]
        cfg = tiny_config(output_dir=str(tmp_path / "a"), emit_svg=False)
        emit_artifacts({"enhanced-fql": summaries}, cfg)
        assert not (tmp_path / "a" / "learning_curve.svg").exists()
        cfg = tiny_config(output_dir=str(tmp_path / "b"), emit_svg=True)
        emit_artifacts({"enhanced-fql": summaries}, cfg)
        svg = (tmp_path / "b" / "learning_curve.svg").read_text()
        assert svg.startswith("<svg")
        assert "polyline" in svg and "episode" in svg and "return" in svg
        assert "threshold" in svg


class TestCli:
    def write_cfg(self, tmp_path, **extra):
        payload = {"env": "chain", "episodes": 10, "max_steps": 20, "seeds": [1],
                   "segment_length": 3, "batch_size": 4,
                   "output_dir": str(tmp_path / "out")}
        payload.update(extra)
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(payload))
        return path

    def test_train_writes_artifacts(self, tmp_path, capsys):
        cfg = self.write_cfg(tmp_path)
        code = main(["train", "--config", str(cfg)])
        assert code == 0
        assert (tmp_path / "out" / "returns_enhanced-fql_1.csv").exists()
        assert (tmp_path / "out" / "summary.json").exists()

    def test_train_byte_identical_reruns(self, tmp_path):
        cfg = self.write_cfg(tmp_path)
        assert main(["train", "--config", str(cfg)]) == 0
        first = (tmp_path / "out" / "returns_enhanced-fql_1.csv").read_bytes()
        assert main(["train", "--config", str(cfg)]) == 0
        second = (tmp_path / "out" / "returns_enhanced-fql_1.csv").read_bytes()
        assert first == second

    def test_train_flag_overrides(self, tmp_path):
        cfg = self.write_cfg(tmp_path)
        code = main(["train", "--config", str(cfg), "--agent", "fuzzy-sarsa",
                     "--episodes", "4", "--seed", "2,3",
                     "--out", str(tmp_path / "alt"), "--svg"])
        assert code == 0
        assert (tmp_path / "alt" / "returns_fuzzy-sarsa_2.csv").exists()
        assert (tmp_path / "alt" / "returns_fuzzy-sarsa_3.csv").exists()
        assert (tmp_path / "alt" / "learning_curve.svg").exists()

    def test_bad_agent_exits_1_and_names_valid(self, tmp_path, capsys):
        cfg = self.write_cfg(tmp_path)
        code = main(["train", "--config", str(cfg), "--agent", "nope"])
        assert code == 1
        err = capsys.readouterr().err
        assert "enhanced-fql" in err and "nstep-fql" in err and "fuzzy-sarsa" in err

    def test_bad_config_value_exits_1(self, tmp_path):
        cfg = self.write_cfg(tmp_path, gamma=1.5)
        assert main(["train", "--config", str(cfg)]) == 1

    def test_compare_emits_all_agents(self, tmp_path):
        cfg = self.write_cfg(tmp_path, episodes=4, max_steps=10)
        assert main(["compare", "--config", str(cfg)]) == 0
        data = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert set(data["medians"]) == {"enhanced-fql", "nstep-fql", "fuzzy-sarsa"}
        assert (tmp_path / "out" / "learning_curve.svg").exists()

    def test_verify_passes(self, capsys):
        assert main(["verify", "--tol", "1e-8"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out

    def test_help_exits_zero(self):
        assert main(["--help"]) == 0
        assert main(["train", "--help"]) == 0
        assert main(["verify", "--help"]) == 0

    def test_usage_error_nonzero(self):
        assert main(["trainx"]) != 0
