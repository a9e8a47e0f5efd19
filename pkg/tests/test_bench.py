"""Scenario loading, benchmark harness, result files, and the CLI."""

import json
import math

import numpy as np
import pytest

from factplan.bench import (
    SUMMARY_COLUMNS,
    BenchConfig,
    Scenario,
    ScenarioParseError,
    ScenarioValidationError,
    bundled_scenario_names,
    emit_results,
    load_bundled,
    load_scenario,
    run_benchmark,
    run_trial,
    summarize,
)
from factplan.cli import main
from factplan.environment import Environment
from factplan.geometry import Rect
from factplan.planners import PlannerParams


def mini_dict(**over):
    """Two agents swapping ends of a horizontal corridor, unit box."""
    data = {
        "name": "mini",
        "agent_radius": 0.03,
        "obstacles": [[0.0, 0.0, 1.0, 0.3], [0.0, 0.7, 1.0, 1.0]],
        "agents": [
            {"start": [0.1, 0.5], "goal": [0.85, 0.4, 0.95, 0.6]},
            {"start": [0.9, 0.5], "goal": [0.05, 0.4, 0.15, 0.6]},
        ],
        "heuristic": {"name": "cone"},
    }
    data.update(over)
    return data


FAST = PlannerParams(stop_nodes=150, max_iterations=2500)


class TestLoadScenario:
    def test_unit_box_dict(self):
        sc = load_scenario(mini_dict())
        assert sc.name == "mini"
        assert sc.scale == 1.0
        assert sc.env.n_agents == 2
        assert sc.env.agent_radius == 0.03
        assert sc.heuristic_name == "cone"
        assert sc.half_angle is None
        assert sc.env.goals[0] == Rect(0.85, 0.4, 0.95, 0.6)

    def test_bounds_normalization_with_offset_origin(self):
        physical = {
            "name": "mini",
            "bounds": [10.0, 20.0, 60.0, 70.0],
            "agent_radius": 1.5,
            "obstacles": [[10.0, 20.0, 60.0, 35.0], [10.0, 55.0, 60.0, 70.0]],
            "agents": [
                {"start": [15.0, 45.0], "goal": [52.5, 40.0, 57.5, 50.0]},
                {"start": [55.0, 45.0], "goal": [12.5, 40.0, 17.5, 50.0]},
            ],
            "heuristic": {"name": "cone"},
        }
        a = load_scenario(physical)
        b = load_scenario(mini_dict())
        assert a.scale == 50.0
        assert a.env.agent_radius == pytest.approx(b.env.agent_radius, abs=1e-15)
        for ra, rb in zip(a.env.obstacles, b.env.obstacles):
            for va, vb in zip(
                (ra.xmin, ra.ymin, ra.xmax, ra.ymax),
                (rb.xmin, rb.ymin, rb.xmax, rb.ymax),
            ):
                assert va == pytest.approx(vb, abs=1e-12)
        for sa, sb in zip(a.env.starts, b.env.starts):
            assert sa == pytest.approx(sb, abs=1e-12)

    def test_json_string_and_file(self, tmp_path):
        text = json.dumps(mini_dict())
        assert load_scenario(text).name == "mini"
        p = tmp_path / "mini.json"
        p.write_text(text)
        assert load_scenario(p).name == "mini"

    def test_parse_errors(self):
        with pytest.raises(ScenarioParseError):
            load_scenario("{not json")
        with pytest.raises(ScenarioParseError):
            load_scenario({"agent_radius": 0.1})  # no name
        d = mini_dict()
        del d["agent_radius"]
        with pytest.raises(ScenarioParseError):
            load_scenario(d)
        with pytest.raises(ScenarioParseError):
            load_scenario(mini_dict(agents=[]))
        with pytest.raises(ScenarioParseError):
            load_scenario(mini_dict(agents=[{"start": [0.1]}]))
        with pytest.raises(ScenarioParseError):
            load_scenario(mini_dict(obstacles=[[0.1, 0.1, 0.2]]))

    def test_validation_errors(self):
        with pytest.raises(ScenarioValidationError):
            load_scenario(mini_dict(bounds=[0.0, 0.0, 1.0, 2.0]))  # not square
        with pytest.raises(ScenarioValidationError):
            load_scenario(mini_dict(agent_radius=0.6))
        with pytest.raises(ScenarioValidationError):
            load_scenario(mini_dict(obstacles=[[0.2, 0.2, 0.1, 0.4]]))  # inverted
        with pytest.raises(ScenarioValidationError):
            load_scenario(mini_dict(obstacles=[[0.5, 0.5, 1.5, 0.9]]))  # outside
        d = mini_dict()
        d["agents"][0]["start"] = [1.2, 0.5]
        with pytest.raises(ScenarioValidationError):
            load_scenario(d)
        d = mini_dict()
        d["agents"][0]["start"] = [0.5, 0.1]  # inside the lower wall
        with pytest.raises(ScenarioValidationError):
            load_scenario(d)
        d = mini_dict()
        d["agents"][1]["start"] = [0.14, 0.5]  # within one diameter of agent 0
        with pytest.raises(ScenarioValidationError):
            load_scenario(d)
        d = mini_dict()
        d["agents"][0]["goal"] = [0.4, 0.05, 0.6, 0.25]  # buried in the wall
        with pytest.raises(ScenarioValidationError):
            load_scenario(d)
        with pytest.raises(ScenarioValidationError):
            load_scenario(mini_dict(heuristic={"name": "unknown"}))
        with pytest.raises(ScenarioValidationError):
            # straight-line independence is undefined among obstacles
            load_scenario(mini_dict(heuristic={"name": "straightline"}))

    def test_too_many_agents(self):
        d = mini_dict()
        d["obstacles"] = []
        d["agents"] = [
            {"start": [0.05 + 0.13 * i, 0.1], "goal": [0.05, 0.8, 0.95, 0.9]}
            for i in range(7)
        ]
        with pytest.raises(ScenarioValidationError):
            load_scenario(d)


class TestBundled:
    def test_cross4_present(self):
        assert "cross4" in bundled_scenario_names()
        sc = load_bundled("cross4")
        assert sc.env.n_agents == 4
        assert sc.scale == 50.0
        assert sc.heuristic_name == "cone"
        assert sc.half_angle == 0.29
        assert sc.env.agent_radius == pytest.approx(0.05, abs=1e-15)

    def test_unknown_name(self):
        with pytest.raises(ScenarioParseError):
            load_bundled("no-such-scenario")


class TestScenarioVariants:
    def test_take(self):
        sc = load_bundled("cross4")
        two = sc.take(2)
        assert two.name == "cross4-a2"
        assert two.env.n_agents == 2
        assert two.env.starts == sc.env.starts[:2]
        assert two.env.obstacles == sc.env.obstacles
        assert two.scale == sc.scale
        assert sc.take(4) is sc
        with pytest.raises(ScenarioValidationError):
            sc.take(0)
        with pytest.raises(ScenarioValidationError):
            sc.take(5)

    def test_normalized_params(self):
        sc = load_bundled("cross4")
        params = PlannerParams(gamma=100.0, eta=100.0)
        norm = sc.normalized_params(params)
        assert norm.gamma == 2.0
        assert norm.eta == 2.0
        assert norm.stop_nodes == params.stop_nodes
        unit = load_scenario(mini_dict())
        assert unit.normalized_params(params) is params


class TestBenchConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            BenchConfig(algorithms=())
        with pytest.raises(ValueError):
            BenchConfig(algorithms=("rrg", "dijkstra"))
        with pytest.raises(ValueError):
            BenchConfig(trials=-1)
        with pytest.raises(ValueError):
            BenchConfig(parallelism=0)
        with pytest.raises(ValueError):
            BenchConfig(prm_samples=-5)


@pytest.fixture(scope="module")
def mini_reports():
    sc = load_scenario(mini_dict())
    config = BenchConfig(
        algorithms=("rrg", "factrrg"), trials=2, base_seed=10, params=FAST
    )
    return sc, config, run_benchmark(sc, config)


class TestRunBenchmark:
    def test_order_and_paired_seeds(self, mini_reports):
        _, _, reports = mini_reports
        assert [(r.algorithm, r.seed) for r in reports] == [
            ("rrg", 10),
            ("rrg", 11),
            ("factrrg", 10),
            ("factrrg", 11),
        ]
        by_id = {r.run_id: r for r in reports}
        assert by_id["rrg:10"].sample_log == by_id["factrrg:10"].sample_log
        assert by_id["rrg:11"].sample_log == by_id["factrrg:11"].sample_log
        assert by_id["rrg:10"].sample_log != by_id["rrg:11"].sample_log

    def test_all_trials_solve(self, mini_reports):
        _, _, reports = mini_reports
        assert all(r.solved for r in reports)
        assert all(r.error is None for r in reports)

    def test_parallel_matches_inline(self, mini_reports):
        sc, config, inline = mini_reports
        import dataclasses

        par = run_benchmark(sc, dataclasses.replace(config, parallelism=2))

        def strip_timing(r):
            return (
                r.algorithm,
                r.seed,
                r.trace,
                r.final_cost,
                r.iterations,
                r.nodes,
                r.edges,
                r.splitting_edges,
                r.nodes_per_agent_set,
                r.sample_log,
                r.error,
            )

        assert [strip_timing(r) for r in par] == [strip_timing(r) for r in inline]

    def test_error_isolation(self):
        env = Environment(
            obstacles=(),
            goals=(Rect(0.8, 0.1, 0.9, 0.2), Rect(0.8, 0.3, 0.9, 0.4)),
            starts=((0.1, 0.1), (0.1, 0.13)),
            agent_radius=0.05,
        )
        sc = Scenario("broken", env)
        rep = run_trial(sc, BenchConfig(trials=1), "rrg", 0)
        assert rep.error is not None and rep.error.startswith("SetupError")
        assert not rep.solved
        row = summarize([rep])[0]
        assert row["errors"] == 1
        assert row["solved"] == 0
        assert row["final_cost_mean"] is None


def parse_trace(text):
    lines = text.strip().splitlines()
    assert lines[0] == "run_id,algorithm,seed,iteration,best_cost"
    out = {}
    for line in lines[1:]:
        run_id, _algo, _seed, it, cost = line.split(",")
        out.setdefault(run_id, []).append(
            (int(it), float(cost) if cost else None)
        )
    return out


class TestEmitResults:
    def test_trace_round_trip(self, mini_reports, tmp_path):
        sc, config, reports = mini_reports
        paths = emit_results(tmp_path / "out", sc, config, reports)
        parsed = parse_trace(paths["trace"].read_text())
        assert set(parsed) == {r.run_id for r in reports}
        for r in reports:
            assert tuple(parsed[r.run_id]) == r.trace  # repr round trip is exact

    def test_summary_matches_trace_recomputation(self, mini_reports, tmp_path):
        sc, config, reports = mini_reports
        paths = emit_results(tmp_path / "out", sc, config, reports)
        parsed = parse_trace(paths["trace"].read_text())
        lines = paths["summary"].read_text().strip().splitlines()
        assert lines[0] == ",".join(SUMMARY_COLUMNS)
        col = SUMMARY_COLUMNS.index("final_cost_mean")
        for line in lines[1:]:
            cells = line.split(",")
            algo = cells[0]
            finals = [
                trace[-1][1]
                for run_id, trace in parsed.items()
                if run_id.startswith(f"{algo}:") and trace[-1][1] is not None
            ]
            want = float(np.array(finals).mean())
            assert float(cells[col]) == want

    def test_meta_contents(self, mini_reports, tmp_path):
        sc, config, reports = mini_reports
        paths = emit_results(tmp_path / "out", sc, config, reports)
        meta = json.loads(paths["meta"].read_text())
        assert meta["scenario"] == "mini"
        assert meta["n_agents"] == 2
        assert meta["seeds"] == [10, 11]
        assert meta["algorithms"] == ["rrg", "factrrg"]
        assert meta["normalized_gamma"] == config.params.gamma
        assert meta["params"]["stop_nodes"] == config.params.stop_nodes
        assert "edge_convention" in meta

    def test_rerun_byte_identical_except_timing(self, mini_reports, tmp_path):
        sc, config, first = mini_reports
        second = run_benchmark(sc, config)
        pa = emit_results(tmp_path / "a", sc, config, first)
        pb = emit_results(tmp_path / "b", sc, config, second)
        assert pa["trace"].read_bytes() == pb["trace"].read_bytes()
        assert pa["meta"].read_bytes() == pb["meta"].read_bytes()
        la = pa["summary"].read_text().strip().splitlines()
        lb = pb["summary"].read_text().strip().splitlines()
        assert len(la) == len(lb)
        n_stable = len(SUMMARY_COLUMNS) - 2  # trailing columns are wall clock
        for ra, rb in zip(la, lb):
            assert ra.split(",")[:n_stable] == rb.split(",")[:n_stable]

    def test_unsolved_rows_have_empty_cost(self, tmp_path):
        sc = load_scenario(mini_dict())
        config = BenchConfig(
            algorithms=("rrg",),
            trials=1,
            params=PlannerParams(max_iterations=10, goal_bias=0.0),
        )
        reports = run_benchmark(sc, config)
        assert reports[0].final_cost is None
        paths = emit_results(tmp_path, sc, config, reports)
        rows = paths["trace"].read_text().strip().splitlines()[1:]
        assert rows and all(row.endswith(",") for row in rows)


class TestCli:
    def test_run_writes_results(self, tmp_path, capsys):
        scenario_file = tmp_path / "mini.json"
        scenario_file.write_text(json.dumps(mini_dict()))
        out = tmp_path / "results"
        code = main(
            [
                "run",
                "--scenario", str(scenario_file),
                "--algo", "rrg",
                "--trials", "1",
                "--seed", "3",
                "--out", str(out),
                "--stop-nodes", "100",
                "--max-iterations", "2000",
            ]
        )
        assert code == 0
        assert (out / "trace.csv").exists()
        assert (out / "summary.csv").exists()
        assert (out / "meta.json").exists()
        stdout = capsys.readouterr().out
        assert "rrg: 1/1 solved" in stdout

    def test_run_algo_lists_accumulate(self, tmp_path):
        scenario_file = tmp_path / "mini.json"
        scenario_file.write_text(json.dumps(mini_dict()))
        out = tmp_path / "results"
        code = main(
            [
                "run",
                "--scenario", str(scenario_file),
                "--algo", "rrg",
                "--algo", "factrrg,prmstar",
                "--trials", "1",
                "--out", str(out),
                "--stop-nodes", "60",
                "--max-iterations", "600",
                "--prm-samples", "300",
            ]
        )
        assert code == 0
        meta = json.loads((out / "meta.json").read_text())
        assert meta["algorithms"] == ["rrg", "factrrg", "prmstar"]

    def test_run_unknown_scenario_exits_2(self, capsys):
        code = main(["run", "--scenario", "no-such-place"])
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "ScenarioParseError"

    def test_agents_and_heuristic_overrides(self, tmp_path):
        out = tmp_path / "results"
        code = main(
            [
                "run",
                "--scenario", "cross4",
                "--agents", "1",
                "--heuristic", "never",
                "--algo", "factrrg",
                "--trials", "1",
                "--out", str(out),
                "--stop-nodes", "80",
                "--max-iterations", "2000",
            ]
        )
        assert code == 0
        meta = json.loads((out / "meta.json").read_text())
        assert meta["scenario"] == "cross4-a1"
        assert meta["heuristic"]["name"] == "never"

    def test_gain_stdout(self, capsys):
        code = main(["gain", "--grid", "f=0:1:11;agents=2;disp=0.7;p=0.7"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("agents,f,")
        assert len(lines) == 12
        first = lines[1].split(",")
        assert first[0] == "2"
        assert float(first[1]) == 0.0
        assert float(first[4]) == 0.0  # gain_exact at f = 0

    def test_gain_bad_grid_exits_2(self, capsys):
        code = main(["gain", "--grid", "f=0:1:11;agents=2"])
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "ValueError"

    def test_dump_graph_file(self, tmp_path, capsys):
        scenario_file = tmp_path / "mini.json"
        scenario_file.write_text(json.dumps(mini_dict()))
        out = tmp_path / "graph.txt"
        code = main(
            [
                "dump",
                "--scenario", str(scenario_file),
                "--algo", "factrrg",
                "--seed", "1",
                "--out", str(out),
                "--stop-nodes", "100",
                "--max-iterations", "2000",
            ]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "# factplan graph dump v1"
        assert lines[1] == "radius 0.03"
        assert sum(1 for l in lines if l.startswith("obstacle ")) == 2
        assert any(l.startswith("node ") for l in lines)
        assert any(l.endswith(" std") for l in lines)

    def test_verify_passes(self, capsys):
        code = main(["verify", "--seed", "0"])
        out = capsys.readouterr().out.strip().splitlines()
        assert code == 0
        assert len(out) == 5
        assert all(line.startswith("PASS") for line in out)
