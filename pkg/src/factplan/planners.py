"""Sampling-based planners over the motion hypergraph.

Three entry points share one connection template:

* `run_sba` grows a joint-space roadmap (RRG-style: every near node in
  the shrinking radius is tried, the sample is kept on first success).
* `run_fact_sba` runs the factorized variant: each sample is split into
  independent blocks by a heuristic, every non-empty subset of blocks is
  offered to the matching subgraph, and edges from coarser to finer
  partitions become splitting hyperedges.
* `run_prm_star` processes a pre-drawn batch of samples with the
  standard (log n / n)^(1/d) radius and no eta cap.

With the never-factorize heuristic `run_fact_sba` consumes randomness
identically to `run_sba` and produces the same graph node for node,
which is the key regression handle for the factorized machinery.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .core import AgentSet, BlockConfig, powerset_groups
from .environment import DIM, Environment
from .factorization import FactorizationHeuristic, factorize
from .hypergraph import (
    GoalFn,
    GraphStats,
    HyperPath,
    NodeId,
    PlanHypergraph,
    connection_radius,
)

SAMPLE_LOG_LIMIT = 100
"""Number of leading samples recorded per run (pairing diagnostics)."""

_RADIUS_MODES = ("per-block", "largest")


class SetupError(ValueError):
    """The scenario violates a planner precondition."""


@dataclass(frozen=True)
class PlannerParams:
    """Knobs shared by the incremental planners.

    `stop_nodes` is the node-count threshold of the stopping rule: the
    run ends at the first cost checkpoint where a solution exists and the
    graph has grown past the threshold. `radius_mode` selects the
    dimension used in the shrinking-radius formula for factorized runs:
    the block's own dimension, or the full joint dimension for every
    subgraph.
    """

    gamma: float = 100.0
    eta: float = 100.0
    goal_bias: float = 0.1
    stop_nodes: int = 1000
    max_iterations: int = 20_000
    cost_cadence: int = 50
    radius_mode: str = "per-block"

    def __post_init__(self) -> None:
        if self.gamma <= 0.0 or self.eta <= 0.0:
            raise SetupError("gamma and eta must be positive")
        if not (0.0 <= self.goal_bias <= 1.0):
            raise SetupError("goal bias must lie in [0, 1]")
        if self.stop_nodes < 1:
            raise SetupError("stop_nodes must be at least 1")
        if self.max_iterations < 0:
            raise SetupError("max_iterations must be non-negative")
        if self.cost_cadence < 1:
            raise SetupError("cost_cadence must be at least 1")
        if self.radius_mode not in _RADIUS_MODES:
            raise SetupError(f"radius_mode must be one of {_RADIUS_MODES}")


@dataclass
class PlanResult:
    """Everything a benchmark trial needs, including the grown graph."""

    algorithm: str
    seed: int
    graph: PlanHypergraph
    roots: tuple[NodeId, ...]
    cost_trace: tuple[tuple[int, float | None], ...]
    final_cost: float | None
    best_path: HyperPath | None
    iterations: int
    stats: GraphStats
    iter_seconds_mean: float
    iter_seconds_std: float
    solve_seconds: float
    sample_log: tuple[tuple[float, ...], ...] = field(repr=False, default=())


def validate_start(env: Environment) -> None:
    """Reject scenarios whose initial configuration is already invalid."""
    pts = np.array(env.starts, float)
    if not env.points_obstacle_free(pts):
        raise SetupError("an agent's start position intersects an obstacle")
    for i in range(env.n_agents):
        for j in range(i + 1, env.n_agents):
            d = math.dist(env.starts[i], env.starts[j])
            if d <= 2.0 * env.agent_radius:
                raise SetupError(
                    f"agents {i} and {j} start within one body diameter"
                )


def goal_adapter(env: Environment) -> GoalFn:
    def fn(agents: AgentSet, coords: np.ndarray) -> np.ndarray:
        return env.in_goal_mask(coords, agents)

    return fn


class _TraceRecorder:
    """Cost checkpoints plus timing that excludes the checkpoint work."""

    def __init__(self, graph: PlanHypergraph, roots: list[NodeId], goal_fn: GoalFn):
        self.graph = graph
        self.roots = roots
        self.goal_fn = goal_fn
        self.trace: list[tuple[int, float | None]] = []
        self.solve_seconds = 0.0
        self.best: float | None = None

    def checkpoint(self, iteration: int) -> float | None:
        t0 = time.perf_counter()
        self.best = self.graph.best_cost(self.roots, self.goal_fn)
        self.solve_seconds += time.perf_counter() - t0
        self.trace.append((iteration, self.best))
        return self.best

    def ensure_final(self, iteration: int) -> None:
        if not self.trace or self.trace[-1][0] != iteration:
            self.checkpoint(iteration)


def _timing(iter_times: list[float]) -> tuple[float, float]:
    if not iter_times:
        return 0.0, 0.0
    arr = np.array(iter_times)
    return float(arr.mean()), float(arr.std())


def _finish(
    algorithm: str,
    seed: int,
    graph: PlanHypergraph,
    roots: list[NodeId],
    rec: _TraceRecorder,
    iterations: int,
    iter_times: list[float],
    samples: list[tuple[float, ...]],
) -> PlanResult:
    rec.ensure_final(iterations)
    path = None
    if rec.best is not None:
        path = graph.best_solution(roots, rec.goal_fn)
    mean, std = _timing(iter_times)
    return PlanResult(
        algorithm=algorithm,
        seed=seed,
        graph=graph,
        roots=tuple(roots),
        cost_trace=tuple(rec.trace),
        final_cost=rec.best,
        best_path=path,
        iterations=iterations,
        stats=graph.stats(),
        iter_seconds_mean=mean,
        iter_seconds_std=std,
        solve_seconds=rec.solve_seconds,
        sample_log=tuple(samples),
    )


def _connect_sample(
    env: Environment,
    graph: PlanHypergraph,
    x: BlockConfig,
    radius: float,
    exclude: NodeId | None = None,
) -> tuple[list[NodeId], np.ndarray, np.ndarray]:
    """Near nodes of x's agent set with collision masks and costs."""
    ids, mat = graph.near_with_coords(x, radius)
    if exclude is not None and exclude in ids:
        keep = [i for i, nid in enumerate(ids) if nid != exclude]
        ids = [ids[i] for i in keep]
        mat = mat[keep]
    if not ids:
        return ids, np.empty(0, bool), np.empty(0)
    end = np.asarray(x.coords)
    mask, costs = env.connectable_and_costs(mat, end, len(x.agents))
    return ids, mask, costs


def run_sba(env: Environment, params: PlannerParams, seed: int) -> PlanResult:
    """Joint-space roadmap growth (Alg. RRG-style batch connect)."""
    validate_start(env)
    rng = np.random.default_rng(seed)
    graph = PlanHypergraph()
    roots = [graph.add_node(env.joint_start())]
    agents = env.all_agents
    d = DIM * env.n_agents
    rec = _TraceRecorder(graph, roots, goal_adapter(env))
    iter_times: list[float] = []
    samples: list[tuple[float, ...]] = []
    it = 0
    while it < params.max_iterations:
        t0 = time.perf_counter()
        x = env.sample_free(rng, params.goal_bias)
        if len(samples) < SAMPLE_LOG_LIMIT:
            samples.append(x.coords)
        radius = connection_radius(graph.count(agents), d, params.gamma, params.eta)
        ids, mask, costs = _connect_sample(env, graph, x, radius)
        if ids and mask.any():
            new = graph.add_node(x)
            for pos in np.nonzero(mask)[0]:
                graph.add_hyperedge(ids[pos], (new,), float(costs[pos]))
        iter_times.append(time.perf_counter() - t0)
        it += 1
        if it % params.cost_cadence == 0:
            best = rec.checkpoint(it)
            if best is not None and graph.node_count() > params.stop_nodes:
                break
    return _finish("rrg", seed, graph, roots, rec, it, iter_times, samples)


def run_fact_sba(
    env: Environment,
    params: PlannerParams,
    heuristic: FactorizationHeuristic,
    seed: int,
) -> PlanResult:
    """Factorized roadmap growth over the motion hypergraph."""
    validate_start(env)
    rng = np.random.default_rng(seed)
    graph = PlanHypergraph()
    use_res = heuristic.enforces_coherency
    roots = [
        graph.add_node(b, heuristic.resources(b) if use_res else None)
        for b in factorize(env.joint_start(), heuristic).blocks
    ]
    joint_dim = DIM * env.n_agents
    rec = _TraceRecorder(graph, roots, goal_adapter(env))
    iter_times: list[float] = []
    samples: list[tuple[float, ...]] = []
    it = 0
    while it < params.max_iterations:
        t0 = time.perf_counter()
        x = env.sample_free(rng, params.goal_bias)
        if len(samples) < SAMPLE_LOG_LIMIT:
            samples.append(x.coords)
        partition = factorize(x, heuristic)
        created: dict[tuple[int, ...], NodeId] = {}
        for group in powerset_groups(partition):
            x_hat = group.joined()
            k_hat = len(x_hat.agents)
            d_q = joint_dim if params.radius_mode == "largest" else DIM * k_hat
            radius = connection_radius(
                graph.count(x_hat.agents), d_q, params.gamma, params.eta
            )
            # a block node created for an earlier group of this iteration
            # sits at distance zero; connecting to it would add a self loop
            sibling = created.get(x_hat.agents.members)
            ids, mask, costs = _connect_sample(
                env, graph, x_hat, radius, exclude=sibling
            )
            if not ids:
                continue
            for pos in np.nonzero(mask)[0]:
                origin = ids[pos]
                if use_res and not heuristic.coherent(
                    graph.config(origin).agents,
                    graph.resources(origin),
                    group.blocks,
                ):
                    continue
                targets = []
                for b in group.blocks:
                    nid = created.get(b.agents.members)
                    if nid is None:
                        nid = graph.add_node(
                            b, heuristic.resources(b) if use_res else None
                        )
                        created[b.agents.members] = nid
                    targets.append(nid)
                graph.add_hyperedge(origin, tuple(targets), float(costs[pos]))
        iter_times.append(time.perf_counter() - t0)
        it += 1
        if it % params.cost_cadence == 0:
            best = rec.checkpoint(it)
            if best is not None and graph.node_count() > params.stop_nodes:
                break
    return _finish("factrrg", seed, graph, roots, rec, it, iter_times, samples)


def run_prm_star(
    env: Environment,
    params: PlannerParams,
    seed: int,
    n_samples: int,
    radius_override: float | None = None,
) -> PlanResult:
    """Batch roadmap over n_samples draws, radius gamma*(log n / n)^(1/d).

    The radius uses the node count before each insertion and is not
    capped by eta; `radius_override` fixes it instead (used to study the
    radius regime analytically).
    """
    validate_start(env)
    if n_samples < 0:
        raise SetupError("n_samples must be non-negative")
    if radius_override is not None and radius_override < 0.0:
        raise SetupError("radius_override must be non-negative")
    rng = np.random.default_rng(seed)
    graph = PlanHypergraph()
    roots = [graph.add_node(env.joint_start())]
    agents = env.all_agents
    d = DIM * env.n_agents
    rec = _TraceRecorder(graph, roots, goal_adapter(env))
    iter_times: list[float] = []
    samples: list[tuple[float, ...]] = []
    drawn = [env.sample_free(rng, params.goal_bias) for _ in range(n_samples)]
    it = 0
    for x in drawn:
        t0 = time.perf_counter()
        if len(samples) < SAMPLE_LOG_LIMIT:
            samples.append(x.coords)
        if radius_override is not None:
            radius = radius_override
        else:
            radius = connection_radius(
                graph.count(agents), d, params.gamma, eta=math.inf
            )
        ids, mask, costs = _connect_sample(env, graph, x, radius)
        if ids and mask.any():
            new = graph.add_node(x)
            for pos in np.nonzero(mask)[0]:
                graph.add_hyperedge(ids[pos], (new,), float(costs[pos]))
        iter_times.append(time.perf_counter() - t0)
        it += 1
        if it % params.cost_cadence == 0:
            rec.checkpoint(it)
    return _finish("prmstar", seed, graph, roots, rec, it, iter_times, samples)
