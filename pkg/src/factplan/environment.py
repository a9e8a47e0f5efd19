"""Shared workspace: obstacles, goals, sampling and collision predicates.

Agents are discs of one common radius moving in the unit box. A joint
transition interpolates every agent linearly and simultaneously over
tau in [0,1]. Collision predicates use strict penetration: grazing
contact (distance exactly equal to the threshold) counts as free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import AgentId, AgentSet, BlockConfig
from .geometry import (
    Rect,
    moving_points_min_sepsq,
    points_rects_distance,
    segments_rects_clearance,
)

DIM = 2


class SamplingError(RuntimeError):
    """Free-space rejection sampling exceeded its retry budget."""


@dataclass(frozen=True)
class Transition:
    """Straight-line joint motion between two same-agent-set configurations."""

    start: BlockConfig
    end: BlockConfig

    def __post_init__(self) -> None:
        if self.start.agents != self.end.agents:
            raise ValueError(
                f"transition endpoints over different agents: "
                f"{self.start.agents} vs {self.end.agents}"
            )
        if self.start.dim != DIM:
            raise ValueError(f"expected {DIM}-d agents, got {self.start.dim}")


@dataclass(frozen=True)
class Environment:
    """Unit-box workspace shared by all agents."""

    obstacles: tuple[Rect, ...]
    goals: tuple[Rect, ...]
    starts: tuple[tuple[float, float], ...]
    agent_radius: float

    def __post_init__(self) -> None:
        if self.agent_radius <= 0.0:
            raise ValueError("agent radius must be positive")
        if not self.goals or len(self.goals) != len(self.starts):
            raise ValueError("need one start and one goal region per agent")

    @property
    def n_agents(self) -> int:
        return len(self.starts)

    @property
    def all_agents(self) -> AgentSet:
        return AgentSet(tuple(range(self.n_agents)))

    @cached_property
    def _rects(self) -> np.ndarray:
        return np.array(
            [[r.xmin, r.ymin, r.xmax, r.ymax] for r in self.obstacles], float
        ).reshape(len(self.obstacles), 4)

    @cached_property
    def _goal_lows(self) -> np.ndarray:
        return np.array([[g.xmin, g.ymin] for g in self.goals], float)

    @cached_property
    def _goal_spans(self) -> np.ndarray:
        return np.array([[g.width, g.height] for g in self.goals], float)

    def joint_start(self) -> BlockConfig:
        coords: list[float] = []
        for s in self.starts:
            coords.extend(s)
        return BlockConfig(self.all_agents, tuple(coords))

    # --- static point queries -------------------------------------------

    def points_obstacle_free(self, points: np.ndarray) -> bool:
        """True when every disc centered at points (k,2) avoids all obstacles."""
        if len(self.obstacles) == 0:
            return True
        d = points_rects_distance(points, self._rects)
        return bool(d.min() >= self.agent_radius)

    def point_obstacle_free(self, x: float, y: float) -> bool:
        return self.points_obstacle_free(np.array([[x, y]], float))

    def sample_free(
        self,
        rng: np.random.Generator,
        goal_bias: float,
        max_rejections: int = 10_000,
    ) -> BlockConfig:
        """Draw one obstacle-free joint configuration.

        With probability goal_bias each agent is drawn uniformly inside
        its goal region, otherwise uniformly over the box; either branch
        rejection-resamples until every agent's point is obstacle-free.
        """
        k = self.n_agents
        biased = rng.random() < goal_bias
        for _ in range(max_rejections):
            u = rng.random((k, DIM))
            pts = self._goal_lows + u * self._goal_spans if biased else u
            if self.points_obstacle_free(pts):
                return BlockConfig(self.all_agents, tuple(pts.ravel()))
        raise SamplingError(
            f"no obstacle-free sample after {max_rejections} rejections"
        )

    # --- transition predicates -------------------------------------------

    def obstacle_clearances(
        self, starts: np.ndarray, end: np.ndarray, n_agents: int
    ) -> np.ndarray:
        """Min obstacle distance of each agent's segment; (m,) array."""
        m = starts.shape[0]
        if len(self.obstacles) == 0:
            return np.full(m, np.inf)
        out = np.full(m, np.inf)
        for j in range(n_agents):
            sl = slice(DIM * j, DIM * j + DIM)
            d = segments_rects_clearance(starts[:, sl], end[sl], self._rects)
            out = np.minimum(out, d.min(axis=1))
        return out

    def pair_separations_sq(
        self, starts: np.ndarray, end: np.ndarray, n_agents: int
    ) -> np.ndarray:
        """Squared min separation over all agent pairs along the motion; (m,)."""
        m = starts.shape[0]
        out = np.full(m, np.inf)
        for i in range(n_agents):
            si = slice(DIM * i, DIM * i + DIM)
            for j in range(i + 1, n_agents):
                sj = slice(DIM * j, DIM * j + DIM)
                sep = moving_points_min_sepsq(
                    starts[:, si], end[si], starts[:, sj], end[sj]
                )
                out = np.minimum(out, sep)
        return out

    def connectable_and_costs(
        self, starts: np.ndarray, end: np.ndarray, n_agents: int
    ) -> tuple[np.ndarray, np.ndarray]:
        """Batched collision_free plus transition costs.

        starts is (m, DIM*n_agents), end is (DIM*n_agents,). Returns a
        boolean mask (m,) and the per-agent-summed segment lengths (m,).
        """
        obs = self.obstacle_clearances(starts, end, n_agents)
        mask = obs >= self.agent_radius
        if n_agents > 1:
            sep = self.pair_separations_sq(starts, end, n_agents)
            mask = mask & (sep >= (2.0 * self.agent_radius) ** 2)
        diffs = (end[None, :] - starts).reshape(starts.shape[0], n_agents, DIM)
        costs = np.sqrt((diffs * diffs).sum(axis=2)).sum(axis=1)
        return mask, costs

    def segment_obstacle_free(self, t: Transition) -> bool:
        """Every agent's swept disc stays clear of every obstacle."""
        starts = np.array([t.start.coords], float)
        end = np.array(t.end.coords, float)
        obs = self.obstacle_clearances(starts, end, len(t.start.agents))
        return bool(obs[0] >= self.agent_radius)

    def agents_collision_free(self, t: Transition) -> bool:
        """Pairwise separation stays at least two radii along the motion."""
        n = len(t.start.agents)
        if n < 2:
            return True
        starts = np.array([t.start.coords], float)
        end = np.array(t.end.coords, float)
        sep = self.pair_separations_sq(starts, end, n)
        return bool(sep[0] >= (2.0 * self.agent_radius) ** 2)

    def collision_free(self, a: BlockConfig, b: BlockConfig) -> bool:
        """Joint transition a -> b avoids obstacles and inter-agent contact."""
        t = Transition(a, b)
        return self.segment_obstacle_free(t) and self.agents_collision_free(t)

    # --- goal membership ---------------------------------------------------

    def in_goal(self, x: BlockConfig) -> bool:
        """All agents of x inside the closure of their goal regions."""
        for a in x.agents:
            px, py = x.agent_coords(a)
            if not self.goals[a].contains(px, py):
                return False
        return True

    def in_goal_mask(self, coords: np.ndarray, agents: AgentSet) -> np.ndarray:
        """Vectorized in_goal over rows of coords (m, DIM*len(agents))."""
        mask = np.ones(coords.shape[0], bool)
        for idx, a in enumerate(agents):
            g = self.goals[a]
            x = coords[:, DIM * idx]
            y = coords[:, DIM * idx + 1]
            mask &= (x >= g.xmin) & (x <= g.xmax) & (y >= g.ymin) & (y <= g.ymax)
        return mask

    def goal_center(self, agent: AgentId) -> tuple[float, float]:
        return self.goals[agent].center
