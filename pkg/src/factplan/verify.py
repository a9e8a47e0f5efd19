"""Built-in correctness checks for installed copies (`plan verify`).

Reduced-scale versions of the dual-route checks from the test suite:
closed-form geometry against dense parameter sampling, the hyperpath
value recursion against exhaustive path enumeration, the factorized
planner against the joint planner under the never-factorize heuristic,
and the analysis identities. They require no test framework and finish
in seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import (
    composition_epsilon,
    fact_prm_star_samples,
    linf_dispersion,
    prm_star_joint_samples,
)
from .core import AgentSet, BlockConfig
from .environment import Environment, Transition
from .factorization import NeverFactorize
from .geometry import (
    Rect,
    moving_points_min_separation,
    point_rect_distance,
    segment_rect_distance,
)
from .hypergraph import PlanHypergraph
from .planners import PlannerParams, run_fact_sba, run_sba


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


def _sample_env(n_agents: int = 2) -> Environment:
    starts = ((0.2, 0.2), (0.8, 0.8), (0.2, 0.8), (0.8, 0.2))[:n_agents]
    goals = (
        Rect(0.7, 0.7, 0.9, 0.9),
        Rect(0.1, 0.1, 0.3, 0.3),
        Rect(0.7, 0.1, 0.9, 0.3),
        Rect(0.1, 0.7, 0.3, 0.9),
    )[:n_agents]
    return Environment(obstacles=(), goals=goals, starts=starts, agent_radius=0.05)


def check_segment_distances(seed: int = 0) -> CheckResult:
    """Closed-form segment/rect distance vs dense point sampling."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    ts = np.linspace(0.0, 1.0, 2001)
    for _ in range(50):
        p0 = rng.random(2)
        p1 = rng.random(2)
        lo = rng.random(2) * 0.8
        span = rng.random(2) * 0.2 + 0.01
        rect = Rect(lo[0], lo[1], lo[0] + span[0], lo[1] + span[1])
        exact = segment_rect_distance(tuple(p0), tuple(p1), rect)
        pts = p0[None, :] + ts[:, None] * (p1 - p0)[None, :]
        sampled = min(point_rect_distance(x, y, rect) for x, y in pts)
        # sampling can only overestimate; large overshoot means a bug
        if exact > sampled + 1e-9 or sampled > exact + 2e-3:
            worst = max(worst, abs(exact - sampled))
    ok = worst == 0.0
    return CheckResult("segment-rect distance vs dense sampling", ok,
                       "50 random cases agree" if ok else f"worst gap {worst:.2e}")


def check_collision_predicate(seed: int = 1) -> CheckResult:
    """Batched transition feasibility vs a dense time-sampled oracle."""
    env = _sample_env(3)
    rng = np.random.default_rng(seed)
    env = Environment(
        obstacles=(Rect(0.4, 0.4, 0.6, 0.6),),
        goals=env.goals,
        starts=env.starts,
        agent_radius=0.05,
    )
    agents = env.all_agents
    ts = np.linspace(0.0, 1.0, 2001)
    bad = 0
    for _ in range(60):
        a = BlockConfig(agents, tuple(rng.random(6)))
        b = BlockConfig(agents, tuple(rng.random(6)))
        fast = env.collision_free(a, b)
        ca = np.array(a.coords).reshape(3, 2)
        cb = np.array(b.coords).reshape(3, 2)
        margin = math.inf
        for t in ts:
            p = ca + t * (cb - ca)
            d = min(
                point_rect_distance(x, y, env.obstacles[0]) for x, y in p
            ) - env.agent_radius
            margin = min(margin, d)
            for i in range(3):
                for j in range(i + 1, 3):
                    sep = math.dist(p[i], p[j]) - 2 * env.agent_radius
                    margin = min(margin, sep)
        # sampled margin overestimates the true margin
        if fast and margin < -1e-9:
            bad += 1
        if not fast and margin > 1e-3:
            bad += 1
    return CheckResult(
        "collision predicate vs time-sampled oracle",
        bad == 0,
        "60 random transitions agree" if bad == 0 else f"{bad} disagreements",
    )


def _brute_best(graph: PlanHypergraph, goal_x: float) -> float | None:
    """Exhaustive hyperpath enumeration (tiny graphs only)."""

    def is_goal(nid: int) -> bool:
        c = graph.config(nid)
        return all(c.agent_coords(a)[0] >= goal_x for a in c.agents)

    std: dict[int, list[tuple[int, float]]] = {}
    for u, v, w in graph.standard_edges():
        std.setdefault(u, []).append((v, w))
        std.setdefault(v, []).append((u, w))
    splits: dict[int, list] = {}
    for e in graph.splitting_edges():
        splits.setdefault(e.source, []).append(e)

    def best(nid: int, visited: frozenset[int]) -> float:
        out = 0.0 if is_goal(nid) else math.inf
        for v, w in std.get(nid, ()):
            if v not in visited:
                out = min(out, w + best(v, visited | {v}))
        for e in splits.get(nid, ()):
            total = e.cost
            for t in e.targets:
                total += best(t, frozenset((t,)))
            out = min(out, total)
        return out

    val = best(0, frozenset((0,)))
    return None if math.isinf(val) else val


def check_hyperpath_dp(seed: int = 2) -> CheckResult:
    """Dynamic program vs exhaustive enumeration on random hypergraphs.

    Costs are dyadic (multiples of 1/256) so both routes must agree to
    the last bit.
    """
    rng = np.random.default_rng(seed)
    joint = AgentSet.of(0, 1)
    singles = (AgentSet.of(0), AgentSet.of(1))
    goal_x = 0.75

    def goal_fn(agents: AgentSet, coords: np.ndarray) -> np.ndarray:
        mask = np.ones(coords.shape[0], bool)
        for idx in range(len(agents)):
            mask &= coords[:, 2 * idx] >= goal_x
        return mask

    def dyadic(k: int) -> tuple[float, ...]:
        return tuple(float(v) / 256.0 for v in rng.integers(0, 257, k))

    mism = 0
    for _ in range(40):
        g = PlanHypergraph()
        root = g.add_node(BlockConfig(joint, dyadic(4)))
        ids = {joint.members: [root], (0,): [], (1,): []}
        for _ in range(int(rng.integers(4, 9))):
            s = [joint, *singles][int(rng.integers(0, 3))]
            ids[s.members].append(g.add_node(BlockConfig(s, dyadic(2 * len(s)))))
        for key, pool in ids.items():
            for _ in range(int(rng.integers(0, 5))):
                if len(pool) >= 2:
                    u, v = rng.choice(len(pool), 2, replace=False)
                    g.add_hyperedge(pool[u], (pool[v],), float(rng.integers(0, 257)) / 256.0)
        for _ in range(int(rng.integers(0, 3))):
            if ids[(0,)] and ids[(1,)]:
                src = ids[joint.members][int(rng.integers(0, len(ids[joint.members])))]
                t0 = ids[(0,)][int(rng.integers(0, len(ids[(0,)])))]
                t1 = ids[(1,)][int(rng.integers(0, len(ids[(1,)])))]
                g.add_hyperedge(src, (t0, t1), float(rng.integers(0, 257)) / 256.0)
        dp = g.best_cost([root], goal_fn)
        brute = _brute_best(g, goal_x)
        if not (dp == brute or (dp is None and brute is None)):
            mism += 1
    return CheckResult(
        "hyperpath value vs exhaustive enumeration",
        mism == 0,
        "40 random hypergraphs agree exactly" if mism == 0 else f"{mism} mismatches",
    )


def check_never_factorize_equivalence(seed: int = 3) -> CheckResult:
    """Factorized planner with never-factorize equals the joint planner."""
    env = _sample_env(2)
    params = PlannerParams(stop_nodes=40, max_iterations=300, cost_cadence=10)
    a = run_sba(env, params, seed)
    b = run_fact_sba(env, params, NeverFactorize(), seed)
    same_nodes = a.graph.node_count() == b.graph.node_count() and all(
        a.graph.config(i) == b.graph.config(i) for i in range(a.graph.node_count())
    )
    same_edges = list(a.graph.standard_edges()) == list(b.graph.standard_edges())
    same_cost = a.final_cost == b.final_cost
    ok = same_nodes and same_edges and same_cost
    return CheckResult(
        "never-factorize run equals joint-space run",
        ok,
        f"{a.graph.node_count()} nodes, {a.stats.edges} directed edges, "
        f"final cost {a.final_cost!r}" if ok else
        f"nodes equal: {same_nodes}, edges equal: {same_edges}, cost equal: {same_cost}",
    )


def check_analysis_identities() -> CheckResult:
    """Spot identities of the sample-count formulas and estimators."""
    issues = []
    joint = prm_star_joint_samples(1.0, 0.5, 0.9, 2, 2)
    fact0 = fact_prm_star_samples(1.0, 0.5, 0.9, 2, 2, 0.0)
    if joint != fact0:
        issues.append(f"f=0 should equal joint: {fact0} vs {joint}")
    expected = 4.0 * math.log(40.0)
    single = prm_star_joint_samples(1.0, 0.5, 0.9, 2, 1)
    if not math.isclose(single, expected, rel_tol=1e-12):
        issues.append(f"d=2 count {single} != 4*log(40)")
    if linf_dispersion(np.array([[0.5, 0.5]]), grid=8) != 0.5:
        issues.append("single center point dispersion is not 0.5")
    lattice = np.array([[x, y] for x in (0.0, 0.5, 1.0) for y in (0.0, 0.5, 1.0)])
    if linf_dispersion(lattice, grid=4) != 0.25:
        issues.append("3x3 lattice dispersion is not 0.25")
    ej, em = composition_epsilon([1.1, 2.4], [1.0, 2.0])
    if not ej <= em + 1e-12:
        issues.append("composed suboptimality exceeded the per-block max")
    return CheckResult(
        "analysis identities",
        not issues,
        "all identities hold" if not issues else "; ".join(issues),
    )


def run_all(seed: int = 0) -> list[CheckResult]:
    return [
        check_segment_distances(seed),
        check_collision_predicate(seed + 1),
        check_hyperpath_dp(seed + 2),
        check_never_factorize_equivalence(seed + 3),
        check_analysis_identities(),
    ]
