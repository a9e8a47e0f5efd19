"""Scenario files and the benchmark harness.

Scenarios are JSON: a square workspace (normalized to the unit box at
load), rectangular obstacles, one start position and one rectangular
goal region per agent, and an optional factorization heuristic choice.
`run_benchmark` runs each requested algorithm over a paired seed ladder
(trial t of every algorithm uses base_seed + t, so per-seed comparisons
are meaningful) and `emit_results` writes trace.csv / summary.csv /
meta.json. Everything except the two wall-clock columns of summary.csv
is byte-reproducible for a fixed package environment.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from importlib.metadata import PackageNotFoundError, version as _dist_version
from importlib.resources import files as _pkg_files
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import MAX_ENUMERATION_AGENTS
from .environment import Environment
from .factorization import FactorizationHeuristic, make_heuristic
from .geometry import Rect
from .planners import (
    PlannerParams,
    PlanResult,
    run_fact_sba,
    run_prm_star,
    run_sba,
)

ALGORITHMS = ("rrg", "factrrg", "prmstar")

EDGE_CONVENTION = (
    "standard edges are undirected and contribute two to directed edge "
    "totals; splitting edges are directed and contribute one"
)


class ScenarioParseError(ValueError):
    """The scenario file is malformed (JSON or schema)."""


class ScenarioValidationError(ValueError):
    """The scenario parsed but describes an unusable problem."""


@dataclass(frozen=True)
class Scenario:
    """A normalized problem plus the physical side length it came from.

    Coordinates and the agent radius live in unit-box units; `scale` is
    the original workspace side. Length-dimensioned planner parameters
    (gamma, eta) are divided by `scale` before planning, so parameter
    values stated in workspace units keep their meaning after
    normalization.
    """

    name: str
    env: Environment
    heuristic_name: str = "cone"
    half_angle: float | None = None
    scale: float = 1.0

    def heuristic(self) -> FactorizationHeuristic:
        return make_heuristic(self.heuristic_name, self.env, self.half_angle)

    def normalized_params(self, params: PlannerParams) -> PlannerParams:
        if self.scale == 1.0:
            return params
        return replace(
            params, gamma=params.gamma / self.scale, eta=params.eta / self.scale
        )

    def take(self, k: int) -> "Scenario":
        """Variant restricted to the first k agents."""
        n = self.env.n_agents
        if not (1 <= k <= n):
            raise ScenarioValidationError(f"cannot take {k} of {n} agents")
        if k == n:
            return self
        env = Environment(
            obstacles=self.env.obstacles,
            goals=self.env.goals[:k],
            starts=self.env.starts[:k],
            agent_radius=self.env.agent_radius,
        )
        return replace(self, name=f"{self.name}-a{k}", env=env)


def _require(cond: bool, msg: str, error=ScenarioParseError) -> None:
    if not cond:
        raise error(msg)


def _as_rect(raw, what: str, scale: tuple[float, float, float]) -> Rect:
    _require(
        isinstance(raw, (list, tuple)) and len(raw) == 4,
        f"{what} must be [xmin, ymin, xmax, ymax]",
    )
    ox, oy, s = scale
    try:
        vals = [float(v) for v in raw]
    except (TypeError, ValueError):
        raise ScenarioParseError(f"{what} has non-numeric bounds") from None
    x0, y0, x1, y1 = (
        (vals[0] - ox) / s,
        (vals[1] - oy) / s,
        (vals[2] - ox) / s,
        (vals[3] - oy) / s,
    )
    if not (x0 <= x1 and y0 <= y1):
        raise ScenarioValidationError(f"{what} has inverted bounds")
    if x0 < 0.0 or y0 < 0.0 or x1 > 1.0 or y1 > 1.0:
        raise ScenarioValidationError(f"{what} leaves the workspace")
    return Rect(x0, y0, x1, y1)


def load_scenario(source) -> Scenario:
    """Parse and validate a scenario from a path, JSON string, or dict."""
    if isinstance(source, dict):
        data = source
    else:
        text = Path(source).read_text() if Path(str(source)).exists() else str(source)
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ScenarioParseError(f"invalid scenario JSON: {e}") from None
    _require(isinstance(data, dict), "scenario must be a JSON object")

    name = data.get("name")
    _require(isinstance(name, str) and name != "", "scenario needs a name")

    scale = (0.0, 0.0, 1.0)
    if "bounds" in data:
        b = data["bounds"]
        _require(
            isinstance(b, (list, tuple)) and len(b) == 4,
            "bounds must be [xmin, ymin, xmax, ymax]",
        )
        bx0, by0, bx1, by1 = (float(v) for v in b)
        side = bx1 - bx0
        if side <= 0.0 or not math.isclose(side, by1 - by0):
            raise ScenarioValidationError("bounds must be square with positive size")
        scale = (bx0, by0, side)

    try:
        radius = float(data["agent_radius"]) / scale[2]
    except KeyError:
        raise ScenarioParseError("scenario needs agent_radius") from None
    except (TypeError, ValueError):
        raise ScenarioParseError("agent_radius must be a number") from None
    if not (0.0 < radius < 0.5):
        raise ScenarioValidationError(
            "agent radius must be positive and below half the workspace"
        )

    raw_obstacles = data.get("obstacles", [])
    _require(isinstance(raw_obstacles, list), "obstacles must be a list")
    obstacles = tuple(
        _as_rect(o, f"obstacle {i}", scale) for i, o in enumerate(raw_obstacles)
    )

    raw_agents = data.get("agents")
    _require(isinstance(raw_agents, list) and raw_agents, "scenario needs agents")
    if len(raw_agents) > MAX_ENUMERATION_AGENTS:
        raise ScenarioValidationError(
            f"at most {MAX_ENUMERATION_AGENTS} agents are supported"
        )
    starts: list[tuple[float, float]] = []
    goals: list[Rect] = []
    for i, a in enumerate(raw_agents):
        _require(isinstance(a, dict), f"agent {i} must be an object")
        s = a.get("start")
        _require(
            isinstance(s, (list, tuple)) and len(s) == 2, f"agent {i} needs start [x, y]"
        )
        sx = (float(s[0]) - scale[0]) / scale[2]
        sy = (float(s[1]) - scale[1]) / scale[2]
        if not (0.0 <= sx <= 1.0 and 0.0 <= sy <= 1.0):
            raise ScenarioValidationError(f"agent {i} starts outside the workspace")
        starts.append((sx, sy))
        _require("goal" in a, f"agent {i} needs a goal rect")
        goals.append(_as_rect(a["goal"], f"agent {i} goal", scale))

    heuristic_name = "cone"
    half_angle = None
    if "heuristic" in data:
        h = data["heuristic"]
        _require(isinstance(h, dict) and isinstance(h.get("name"), str),
                 "heuristic must be an object with a name")
        heuristic_name = h["name"]
        if "half_angle" in h:
            half_angle = float(h["half_angle"])

    env = Environment(
        obstacles=obstacles,
        goals=tuple(goals),
        starts=tuple(starts),
        agent_radius=radius,
    )
    scenario = Scenario(name, env, heuristic_name, half_angle, scale=scale[2])
    _validate_scenario(scenario)
    return scenario


def _validate_scenario(sc: Scenario) -> None:
    env = sc.env
    pts = np.array(env.starts, float)
    if not env.points_obstacle_free(pts):
        raise ScenarioValidationError("a start position intersects an obstacle")
    for i in range(env.n_agents):
        for j in range(i + 1, env.n_agents):
            if math.dist(env.starts[i], env.starts[j]) <= 2.0 * env.agent_radius:
                raise ScenarioValidationError(
                    f"agents {i} and {j} start within one body diameter"
                )
    for i, g in enumerate(env.goals):
        probes = np.vstack([g.grid_points(7), [g.center]])
        ok = (probes[:, 0] >= 0) & (probes[:, 0] <= 1)
        ok &= (probes[:, 1] >= 0) & (probes[:, 1] <= 1)
        free = False
        for p in probes[ok]:
            if env.point_obstacle_free(p[0], p[1]):
                free = True
                break
        if not free:
            raise ScenarioValidationError(
                f"goal region of agent {i} contains no reachable placement"
            )
    try:
        sc.heuristic()
    except ValueError as e:
        raise ScenarioValidationError(str(e)) from None


def bundled_scenario_names() -> list[str]:
    base = _pkg_files("factplan") / "scenarios"
    return sorted(p.name[: -len(".json")] for p in base.iterdir() if p.name.endswith(".json"))


def load_bundled(name: str) -> Scenario:
    base = _pkg_files("factplan") / "scenarios" / f"{name}.json"
    try:
        text = base.read_text()
    except FileNotFoundError:
        raise ScenarioParseError(
            f"no bundled scenario {name!r}; available: {bundled_scenario_names()}"
        ) from None
    return load_scenario(json.loads(text))


# --- benchmark harness --------------------------------------------------------


@dataclass(frozen=True)
class BenchConfig:
    algorithms: tuple[str, ...] = ("rrg", "factrrg")
    trials: int = 5
    base_seed: int = 0
    params: PlannerParams = PlannerParams()
    prm_samples: int = 1000
    parallelism: int = 1

    def __post_init__(self) -> None:
        if not self.algorithms:
            raise ValueError("need at least one algorithm")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}; known: {ALGORITHMS}")
        if self.trials < 0:
            raise ValueError("trials must be non-negative")
        if self.prm_samples < 0:
            raise ValueError("prm_samples must be non-negative")
        if self.parallelism < 1:
            raise ValueError("parallelism must be at least 1")


@dataclass(frozen=True)
class TrialReport:
    """Per-trial record, picklable and graph-free."""

    algorithm: str
    seed: int
    trace: tuple[tuple[int, float | None], ...]
    final_cost: float | None
    iterations: int
    nodes: int
    edges: int
    splitting_edges: int
    nodes_per_agent_set: tuple[tuple[tuple[int, ...], int], ...]
    iter_seconds_mean: float
    iter_seconds_std: float
    solve_seconds: float
    sample_log: tuple[tuple[float, ...], ...]
    error: str | None = None

    @property
    def run_id(self) -> str:
        return f"{self.algorithm}:{self.seed}"

    @property
    def solved(self) -> bool:
        return self.error is None and self.final_cost is not None


def _to_report(res: PlanResult) -> TrialReport:
    return TrialReport(
        algorithm=res.algorithm,
        seed=res.seed,
        trace=res.cost_trace,
        final_cost=res.final_cost,
        iterations=res.iterations,
        nodes=res.stats.nodes,
        edges=res.stats.edges,
        splitting_edges=res.stats.splitting_edges,
        nodes_per_agent_set=tuple(sorted(res.stats.nodes_per_agent_set.items())),
        iter_seconds_mean=res.iter_seconds_mean,
        iter_seconds_std=res.iter_seconds_std,
        solve_seconds=res.solve_seconds,
        sample_log=res.sample_log,
    )


def _error_report(algorithm: str, seed: int, exc: Exception) -> TrialReport:
    return TrialReport(
        algorithm=algorithm,
        seed=seed,
        trace=(),
        final_cost=None,
        iterations=0,
        nodes=0,
        edges=0,
        splitting_edges=0,
        nodes_per_agent_set=(),
        iter_seconds_mean=0.0,
        iter_seconds_std=0.0,
        solve_seconds=0.0,
        sample_log=(),
        error=f"{type(exc).__name__}: {exc}",
    )


def run_trial(scenario: Scenario, config: BenchConfig, algorithm: str, seed: int) -> TrialReport:
    """One planning run wrapped into a report; exceptions become error reports."""
    try:
        params = scenario.normalized_params(config.params)
        if algorithm == "rrg":
            res = run_sba(scenario.env, params, seed)
        elif algorithm == "factrrg":
            res = run_fact_sba(scenario.env, params, scenario.heuristic(), seed)
        elif algorithm == "prmstar":
            res = run_prm_star(scenario.env, params, seed, config.prm_samples)
        else:
            raise ValueError(f"unknown algorithm {algorithm!r}")
    except Exception as exc:  # noqa: BLE001 - trial isolation is the point
        return _error_report(algorithm, seed, exc)
    return _to_report(res)


def run_benchmark(scenario: Scenario, config: BenchConfig) -> list[TrialReport]:
    """All (algorithm, trial) runs in deterministic algorithm-major order.

    Trial t of every algorithm uses seed base_seed + t.
    """
    jobs = [
        (algorithm, config.base_seed + t)
        for algorithm in config.algorithms
        for t in range(config.trials)
    ]
    if config.parallelism <= 1 or len(jobs) <= 1:
        return [run_trial(scenario, config, a, s) for a, s in jobs]
    with ProcessPoolExecutor(max_workers=config.parallelism) as pool:
        futures = [pool.submit(run_trial, scenario, config, a, s) for a, s in jobs]
        return [f.result() for f in futures]


SUMMARY_COLUMNS = (
    "algorithm",
    "trials",
    "solved",
    "errors",
    "final_cost_mean",
    "final_cost_std",
    "iterations_mean",
    "nodes_mean",
    "edges_mean",
    "splitting_edges_mean",
    "ms_per_iter_mean",
    "ms_per_iter_std",
)


def summarize(reports: Sequence[TrialReport]) -> list[dict]:
    """Per-algorithm aggregate rows in first-seen algorithm order.

    Cost statistics run over solved trials; size statistics over all
    non-error trials; the two trailing ms-per-iteration columns are the
    only wall-clock-dependent values.
    """
    order: list[str] = []
    groups: dict[str, list[TrialReport]] = {}
    for r in reports:
        if r.algorithm not in groups:
            order.append(r.algorithm)
            groups[r.algorithm] = []
        groups[r.algorithm].append(r)

    rows = []
    for algo in order:
        rs = groups[algo]
        ok = [r for r in rs if r.error is None]
        solved = [r for r in ok if r.final_cost is not None]
        costs = np.array([r.final_cost for r in solved], float)

        def _mean(vals) -> float | None:
            arr = np.array(list(vals), float)
            return float(arr.mean()) if arr.size else None

        rows.append(
            {
                "algorithm": algo,
                "trials": len(rs),
                "solved": len(solved),
                "errors": len(rs) - len(ok),
                "final_cost_mean": float(costs.mean()) if costs.size else None,
                "final_cost_std": float(costs.std()) if costs.size else None,
                "iterations_mean": _mean(r.iterations for r in ok),
                "nodes_mean": _mean(r.nodes for r in ok),
                "edges_mean": _mean(r.edges for r in ok),
                "splitting_edges_mean": _mean(r.splitting_edges for r in ok),
                "ms_per_iter_mean": _mean(1000.0 * r.iter_seconds_mean for r in ok),
                "ms_per_iter_std": _mean(1000.0 * r.iter_seconds_std for r in ok),
            }
        )
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _pkg_version(name: str) -> str:
    try:
        return _dist_version(name)
    except PackageNotFoundError:
        return "unknown"


def emit_results(
    out_dir, scenario: Scenario, config: BenchConfig, reports: Sequence[TrialReport]
) -> dict[str, Path]:
    """Write trace.csv, summary.csv and meta.json under out_dir.

    trace.csv holds one row per cost checkpoint; best_cost is empty
    while no solution exists. meta.json echoes the full configuration
    (no timestamps) so a results directory is self-describing.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    trace_path = out / "trace.csv"
    lines = ["run_id,algorithm,seed,iteration,best_cost"]
    for r in reports:
        for iteration, cost in r.trace:
            lines.append(
                f"{r.run_id},{r.algorithm},{r.seed},{iteration},{_fmt(cost)}"
            )
    trace_path.write_text("\n".join(lines) + "\n")

    summary_path = out / "summary.csv"
    rows = summarize(reports)
    lines = [",".join(SUMMARY_COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in SUMMARY_COLUMNS))
    summary_path.write_text("\n".join(lines) + "\n")

    meta_path = out / "meta.json"
    norm = scenario.normalized_params(config.params)
    meta = {
        "scenario": scenario.name,
        "n_agents": scenario.env.n_agents,
        "agent_radius": scenario.env.agent_radius,
        "scale": scenario.scale,
        "normalized_gamma": norm.gamma,
        "normalized_eta": norm.eta,
        "heuristic": {
            "name": scenario.heuristic_name,
            "half_angle": scenario.half_angle,
        },
        "algorithms": list(config.algorithms),
        "trials": config.trials,
        "base_seed": config.base_seed,
        "seeds": [config.base_seed + t for t in range(config.trials)],
        "prm_samples": config.prm_samples,
        "params": {
            "gamma": config.params.gamma,
            "eta": config.params.eta,
            "goal_bias": config.params.goal_bias,
            "stop_nodes": config.params.stop_nodes,
            "max_iterations": config.params.max_iterations,
            "cost_cadence": config.params.cost_cadence,
            "radius_mode": config.params.radius_mode,
        },
        "edge_convention": EDGE_CONVENTION,
        "versions": {
            "factplan": _pkg_version("factplan"),
            "numpy": _pkg_version("numpy"),
            "scipy": _pkg_version("scipy"),
        },
    }
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")

    return {"trace": trace_path, "summary": summary_path, "meta": meta_path}
