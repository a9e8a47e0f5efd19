"""Factorization heuristics: when can agents plan independently?

A heuristic answers a pairwise question: given the current configurations
of two blocks, may their agents ignore each other for the rest of the
problem without giving up solution quality? `factorize` lifts the pairwise
answer to a partition by taking connected components of the dependence
graph.

The cone heuristic reserves, per agent, an angular sector from its current
position toward its goal-region center. If every cross pair of sectors is
separated by more than one disc diameter, the bodies can never touch while
each agent stays inside its own sector, so the blocks are independent. The
sector doubles as the node's future resources: an edge is only coherent if
it keeps each agent inside the sector of the node it came from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from .core import AgentId, AgentSet, BlockConfig, Partition, project
from .geometry import (
    Rect,
    convex_polygon_distance,
    moving_points_min_separation,
    sector_polygon,
)


@dataclass(frozen=True)
class Cone:
    """Angular sector from an apex, clipped to the unit box.

    With `disc_radius` set the region degenerates to a disc around the
    apex (used when an agent already sits at its goal-region center and
    no direction is defined).
    """

    apex: tuple[float, float]
    axis: tuple[float, float]
    half_angle: float
    disc_radius: float | None = None

    def __post_init__(self) -> None:
        if not (0.0 < self.half_angle <= math.pi / 2.0):
            raise ValueError("half angle must be in (0, pi/2]")

    def contains(self, x: float, y: float) -> bool:
        if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
            return False
        vx = x - self.apex[0]
        vy = y - self.apex[1]
        if self.disc_radius is not None:
            return vx * vx + vy * vy <= self.disc_radius * self.disc_radius
        norm = math.hypot(vx, vy)
        if norm == 0.0:
            return True
        return vx * self.axis[0] + vy * self.axis[1] >= norm * math.cos(self.half_angle)

    @cached_property
    def polygon(self) -> np.ndarray | None:
        """Region as a convex polygon; None for the disc form."""
        if self.disc_radius is not None:
            return None
        angle = math.atan2(self.axis[1], self.axis[0])
        return sector_polygon(self.apex, angle, self.half_angle)


def cone_distance(a: Cone, b: Cone) -> float:
    """Exact distance between two cone regions (0 when they touch)."""
    pa, pb = a.polygon, b.polygon
    if pa is None and pb is None:
        d = math.hypot(a.apex[0] - b.apex[0], a.apex[1] - b.apex[1])
        return max(0.0, d - a.disc_radius - b.disc_radius)
    if pa is None or pb is None:
        disc, poly = (a, pb) if pa is None else (b, pa)
        point = np.array([disc.apex], float)
        d = convex_polygon_distance(point, poly)
        return max(0.0, d - disc.disc_radius)
    return convex_polygon_distance(pa, pb)


class FactorizationHeuristic:
    """Base interface; concrete heuristics override `pairwise`."""

    name: str = "base"
    enforces_coherency: bool = False

    def pairwise(self, a: BlockConfig, b: BlockConfig) -> bool:
        """True when the two blocks may be planned independently."""
        raise NotImplementedError

    def resources(self, x: BlockConfig) -> tuple[Cone, ...] | None:
        """Per-agent future-resource regions for a node, if tracked."""
        return None


@dataclass(frozen=True)
class NeverFactorize(FactorizationHeuristic):
    """Declares every pair dependent; the planner stays in joint space."""

    name = "never"
    enforces_coherency = False

    def pairwise(self, a: BlockConfig, b: BlockConfig) -> bool:
        return False


@lru_cache(maxsize=8192)
def _cached_cone(
    position: tuple[float, float], goal: Rect, half_angle: float
) -> Cone:
    cx, cy = goal.center
    dx = cx - position[0]
    dy = cy - position[1]
    norm = math.hypot(dx, dy)
    if norm < 1e-12:
        radius = 0.5 * math.hypot(goal.width, goal.height)
        return Cone(position, (1.0, 0.0), half_angle, disc_radius=max(radius, 1e-12))
    return Cone(position, (dx / norm, dy / norm), half_angle)


def cone_region(
    position: tuple[float, float], goal: Rect, half_angle: float
) -> Cone:
    """Sector from `position` toward the goal center, extended past the
    goal and clipped to the box; a disc over the goal region when the
    position coincides with the goal center."""
    return _cached_cone((float(position[0]), float(position[1])), goal, float(half_angle))


@dataclass(frozen=True)
class ConeHeuristic(FactorizationHeuristic):
    goals: tuple[Rect, ...]
    agent_radius: float
    half_angle: float = math.pi / 8.0

    name = "cone"
    enforces_coherency = True

    def __post_init__(self) -> None:
        if not (0.0 < self.half_angle <= math.pi / 2.0):
            raise ValueError("half angle must be in (0, pi/2]")

    def cone_for(self, agent: AgentId, x: float, y: float) -> Cone:
        return cone_region((x, y), self.goals[agent], self.half_angle)

    def pairwise(self, a: BlockConfig, b: BlockConfig) -> bool:
        """Independent iff every cross pair of cones clears one diameter.

        The clearance threshold 2*agent_radius accounts for both body
        widths, so disjointness implies the discs can never touch.
        """
        threshold = 2.0 * self.agent_radius
        for i in a.agents:
            ci = self.cone_for(i, *a.agent_coords(i))
            for j in b.agents:
                cj = self.cone_for(j, *b.agent_coords(j))
                if cone_distance(ci, cj) <= threshold:
                    return False
        return True

    def resources(self, x: BlockConfig) -> tuple[Cone, ...]:
        return tuple(self.cone_for(a, *x.agent_coords(a)) for a in x.agents)

    def coherent(
        self,
        origin_agents: AgentSet,
        origin_cones: Sequence[Cone] | None,
        destinations: Sequence[BlockConfig],
    ) -> bool:
        """Destination blocks must stay inside the origin's reserved regions.

        Each destination agent position must lie in the origin's cone for
        that agent, and the freshly recomputed destination cone joined
        with the origin's must still contain the goal-region center (a
        cheap surrogate for forward invariance of the resource sets).
        """
        if origin_cones is None:
            raise ValueError("origin node carries no future-resource regions")
        for block in destinations:
            for agent in block.agents:
                parent = origin_cones[origin_agents.index(agent)]
                px, py = block.agent_coords(agent)
                if not parent.contains(px, py):
                    return False
                child = self.cone_for(agent, px, py)
                gx, gy = self.goals[agent].center
                if not (child.contains(gx, gy) and parent.contains(gx, gy)):
                    return False
        return True


@dataclass(frozen=True)
class StraightLineIndependence(FactorizationHeuristic):
    """Analytic independence for obstacle-free workspaces.

    Without obstacles each agent's optimal motion is the straight segment
    to the nearest point of its goal region. Two blocks are independent
    exactly when those swept discs never conflict under simultaneous
    timing, which this computes in closed form.
    """

    goals: tuple[Rect, ...]
    agent_radius: float

    name = "straightline-oracle"
    enforces_coherency = False

    def goal_endpoint(self, agent: AgentId, x: float, y: float) -> tuple[float, float]:
        g = self.goals[agent]
        return (min(max(x, g.xmin), g.xmax), min(max(y, g.ymin), g.ymax))

    def pairwise(self, a: BlockConfig, b: BlockConfig) -> bool:
        for i in a.agents:
            pi = a.agent_coords(i)
            qi = self.goal_endpoint(i, *pi)
            for j in b.agents:
                pj = b.agent_coords(j)
                qj = self.goal_endpoint(j, *pj)
                sep = moving_points_min_separation(pi, qi, pj, qj)
                if sep < 2.0 * self.agent_radius:
                    return False
        return True


def factorize(x: BlockConfig, heuristic: FactorizationHeuristic) -> Partition:
    """Partition x into blocks via connected components of dependence.

    Agents i and j land in one block iff they are linked by a chain of
    pairwise-dependent agents.
    """
    agents = x.agents
    k = len(agents)
    if k == 1:
        return Partition((x,))
    singles = [project(x, AgentSet.of(a)) for a in agents]

    parent = list(range(k))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(k):
        for j in range(i + 1, k):
            if find(i) != find(j) and not heuristic.pairwise(singles[i], singles[j]):
                parent[find(i)] = find(j)

    groups: dict[int, list[AgentId]] = {}
    for i, a in enumerate(agents):
        groups.setdefault(find(i), []).append(a)
    blocks = tuple(
        project(x, AgentSet(tuple(members))) for members in groups.values()
    )
    return Partition(blocks)


def make_heuristic(name: str, env, half_angle: float | None = None) -> FactorizationHeuristic:
    """Build a heuristic by name from an environment's goals and radius."""
    if name == "never":
        return NeverFactorize()
    if name == "cone":
        kwargs = {} if half_angle is None else {"half_angle": float(half_angle)}
        return ConeHeuristic(tuple(env.goals), env.agent_radius, **kwargs)
    if name == "straightline":
        if env.obstacles:
            raise ValueError(
                "straight-line independence requires an obstacle-free workspace"
            )
        return StraightLineIndependence(tuple(env.goals), env.agent_radius)
    raise ValueError(f"unknown factorization heuristic {name!r}")
