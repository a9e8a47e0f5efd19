"""Factorization heuristics: cones, pairwise independence, coherency."""

import math

import numpy as np
import pytest
from shapely.geometry import Polygon

from factplan.core import AgentSet, BlockConfig
from factplan.environment import Environment
from factplan.factorization import (
    Cone,
    ConeHeuristic,
    FactorizationHeuristic,
    NeverFactorize,
    StraightLineIndependence,
    cone_distance,
    cone_region,
    factorize,
    make_heuristic,
)
from factplan.geometry import Rect

RNG = np.random.default_rng(88)


def cfg(agents, coords):
    return BlockConfig(AgentSet.of(*agents), tuple(float(c) for c in coords))


class TestCone:
    def test_contains_matches_angular_brute(self):
        for _ in range(20):
            apex = tuple(RNG.uniform(0.1, 0.9, 2))
            ang = float(RNG.uniform(0, 2 * math.pi))
            half = float(RNG.uniform(0.15, math.pi / 2))
            cone = Cone(apex, (math.cos(ang), math.sin(ang)), half)
            for p in RNG.uniform(-0.1, 1.1, (50, 2)):
                v = p - np.array(apex)
                r = float(np.hypot(*v))
                in_box = bool((0 <= p[0] <= 1) and (0 <= p[1] <= 1))
                if r < 1e-12:
                    want = in_box
                else:
                    dev = abs(
                        (math.atan2(v[1], v[0]) - ang + math.pi)
                        % (2 * math.pi)
                        - math.pi
                    )
                    if abs(dev - half) < 1e-9:
                        continue
                    want = in_box and dev < half
                assert cone.contains(*p) == want

    def test_disc_form(self):
        c = Cone((0.5, 0.5), (1.0, 0.0), math.pi / 8, disc_radius=0.1)
        assert c.contains(0.55, 0.5)
        assert not c.contains(0.65, 0.5)
        assert c.polygon is None

    def test_half_angle_validated(self):
        with pytest.raises(ValueError):
            Cone((0.5, 0.5), (1.0, 0.0), 0.0)


class TestConeRegion:
    def test_axis_points_at_goal_center(self):
        goal = Rect(0.8, 0.4, 0.9, 0.6)
        c = cone_region((0.1, 0.5), goal, math.pi / 8)
        assert c.axis[0] == pytest.approx(1.0, abs=1e-12)
        assert c.axis[1] == pytest.approx(0.0, abs=1e-12)
        assert c.contains(*goal.center)
        assert c.contains(0.1, 0.5)  # apex

    def test_degenerate_at_center_covers_goal(self):
        goal = Rect(0.4, 0.4, 0.6, 0.5)
        c = cone_region(goal.center, goal, math.pi / 8)
        assert c.disc_radius is not None
        assert c.contains(0.4, 0.45)  # edge midpoints, strictly inside
        assert c.contains(0.5, 0.4)
        assert not c.contains(0.7, 0.45)

    def test_behind_apex_excluded(self):
        goal = Rect(0.8, 0.4, 0.9, 0.6)
        c = cone_region((0.5, 0.5), goal, math.pi / 8)
        assert not c.contains(0.2, 0.5)


class TestConeDistance:
    def test_matches_shapely_on_sectors(self):
        for _ in range(100):
            a = cone_region(
                tuple(RNG.uniform(0.05, 0.95, 2)),
                _rand_goal(RNG),
                float(RNG.uniform(0.15, 0.8)),
            )
            b = cone_region(
                tuple(RNG.uniform(0.05, 0.95, 2)),
                _rand_goal(RNG),
                float(RNG.uniform(0.15, 0.8)),
            )
            if a.disc_radius is not None or b.disc_radius is not None:
                continue
            want = Polygon(a.polygon).distance(Polygon(b.polygon))
            assert cone_distance(a, b) == pytest.approx(want, abs=1e-9)

    def test_disc_disc(self):
        a = Cone((0.2, 0.5), (1, 0), 0.3, disc_radius=0.05)
        b = Cone((0.8, 0.5), (1, 0), 0.3, disc_radius=0.1)
        assert cone_distance(a, b) == pytest.approx(0.6 - 0.15, abs=1e-12)

    def test_symmetric(self):
        for _ in range(50):
            a = cone_region(
                tuple(RNG.uniform(0.1, 0.9, 2)), _rand_goal(RNG), 0.4
            )
            b = cone_region(
                tuple(RNG.uniform(0.1, 0.9, 2)), _rand_goal(RNG), 0.4
            )
            assert cone_distance(a, b) == cone_distance(b, a)


def _rand_goal(rng):
    x, y = rng.uniform(0.1, 0.8, 2)
    return Rect(x, y, x + 0.1, y + 0.1)


class TestConeHeuristicPairwise:
    def setup_method(self):
        self.goals = (Rect(0.85, 0.15, 0.95, 0.25), Rect(0.85, 0.75, 0.95, 0.85))
        self.h = ConeHeuristic(
            goals=self.goals, agent_radius=0.02, half_angle=math.pi / 16
        )

    def test_parallel_separated_lanes_independent(self):
        a = cfg([0], [0.1, 0.2])
        b = cfg([1], [0.1, 0.8])
        assert self.h.pairwise(a, b)

    def test_identical_apex_dependent(self):
        h = ConeHeuristic(
            goals=(self.goals[0], self.goals[0]), agent_radius=0.02
        )
        assert not h.pairwise(cfg([0], [0.1, 0.2]), cfg([1], [0.1, 0.2]))

    def test_threshold_is_strict(self):
        # vertical gap between two horizontal axes; shrink until grazing
        h = ConeHeuristic(
            goals=(Rect(0.8, 0.1, 0.9, 0.2), Rect(0.8, 0.7, 0.9, 0.8)),
            agent_radius=0.02,
            half_angle=0.2,
        )
        a = cfg([0], [0.1, 0.15])
        b = cfg([1], [0.1, 0.75])
        d = cone_distance(
            h.cone_for(0, 0.1, 0.15), h.cone_for(1, 0.1, 0.75)
        )
        assert d > 0
        exactly = ConeHeuristic(
            goals=h.goals, agent_radius=d / 2.0, half_angle=0.2
        )
        assert not exactly.pairwise(a, b)  # distance == 2r is dependent

    def test_symmetry(self):
        for _ in range(50):
            pa = RNG.uniform(0.05, 0.95, 2)
            pb = RNG.uniform(0.05, 0.95, 2)
            a, b = cfg([0], pa), cfg([1], pb)
            assert self.h.pairwise(a, b) == self.h.pairwise(b, a)

    def test_multi_agent_blocks_all_cross_pairs(self):
        h = ConeHeuristic(
            goals=(
                Rect(0.85, 0.05, 0.95, 0.15),
                Rect(0.85, 0.45, 0.95, 0.55),
                Rect(0.85, 0.85, 0.95, 0.95),
            ),
            agent_radius=0.02,
            half_angle=math.pi / 24,
        )
        pair = cfg([0, 1], [0.1, 0.1, 0.1, 0.5])
        near = cfg([2], [0.1, 0.9])
        far_dependent = cfg([2], [0.1, 0.5])  # overlaps agent 1's cone
        assert h.pairwise(pair, near)
        assert not h.pairwise(pair, far_dependent)


class TestCoherent:
    def setup_method(self):
        self.goal = Rect(0.8, 0.45, 0.9, 0.55)
        self.h = ConeHeuristic(
            goals=(self.goal,), agent_radius=0.02, half_angle=math.pi / 8
        )
        self.origin = cfg([0], [0.1, 0.5])
        self.cones = self.h.resources(self.origin)

    def test_destination_equal_origin(self):
        assert self.h.coherent(self.origin.agents, self.cones, [self.origin])

    def test_forward_step_accepted(self):
        dest = cfg([0], [0.3, 0.5])
        assert self.h.coherent(self.origin.agents, self.cones, [dest])

    def test_behind_apex_rejected(self):
        dest = cfg([0], [0.05, 0.5])
        assert not self.h.coherent(self.origin.agents, self.cones, [dest])

    def test_lateral_escape_rejected(self):
        dest = cfg([0], [0.15, 0.9])
        assert not self.h.coherent(self.origin.agents, self.cones, [dest])

    def test_missing_resources_raise(self):
        with pytest.raises(ValueError):
            self.h.coherent(self.origin.agents, None, [self.origin])


class StubHeuristic(FactorizationHeuristic):
    name = "stub"

    def __init__(self, dependent_pairs):
        self.dependent = {frozenset(p) for p in dependent_pairs}

    def pairwise(self, a, b):
        pairs = {
            frozenset((i, j)) for i in a.agents for j in b.agents
        }
        return not (pairs & self.dependent)


class TestFactorize:
    def test_never_factorize_single_block(self):
        x = cfg([0, 1, 2], RNG.uniform(0, 1, 6))
        parts = factorize(x, NeverFactorize())
        assert len(parts) == 1
        assert next(iter(parts)) == x

    def test_all_independent(self):
        x = cfg([0, 1, 2], RNG.uniform(0, 1, 6))
        parts = factorize(x, StubHeuristic([]))
        assert len(parts) == 3

    def test_connected_components(self):
        x = cfg([0, 1, 2], [0.1, 0.1, 0.2, 0.2, 0.9, 0.9])
        parts = factorize(x, StubHeuristic([(0, 1)]))
        sets = sorted(tuple(b.agents.members) for b in parts)
        assert sets == [(0, 1), (2,)]
        # block carries the projected coordinates
        pair = [b for b in parts if len(b.agents) == 2][0]
        assert pair.coords == (0.1, 0.1, 0.2, 0.2)

    def test_transitive_chaining(self):
        x = cfg([0, 1, 2], RNG.uniform(0, 1, 6))
        parts = factorize(x, StubHeuristic([(0, 1), (1, 2)]))
        assert len(parts) == 1

    def test_resources_default_none(self):
        h = StubHeuristic([])
        assert h.resources(cfg([0], [0.1, 0.1])) is None
        assert not h.enforces_coherency


class TestStraightLineOracle:
    def make(self, starts, goals, radius=0.05):
        env = Environment(
            obstacles=(),
            goals=tuple(goals),
            starts=tuple(starts),
            agent_radius=radius,
        )
        return StraightLineIndependence(
            goals=tuple(goals), agent_radius=radius
        )

    def test_head_on_swap_dependent(self):
        h = self.make(
            [(0.1, 0.5), (0.9, 0.5)],
            [Rect(0.85, 0.45, 0.95, 0.55), Rect(0.05, 0.45, 0.15, 0.55)],
        )
        a = cfg([0], [0.1, 0.5])
        b = cfg([1], [0.9, 0.5])
        assert not h.pairwise(a, b)

    def test_parallel_lanes_independent(self):
        h = self.make(
            [(0.1, 0.2), (0.1, 0.8)],
            [Rect(0.85, 0.15, 0.95, 0.25), Rect(0.85, 0.75, 0.95, 0.85)],
        )
        assert h.pairwise(cfg([0], [0.1, 0.2]), cfg([1], [0.1, 0.8]))

    def test_goal_endpoint_clamps(self):
        h = self.make(
            [(0.1, 0.2)], [Rect(0.4, 0.4, 0.6, 0.6)]
        )
        assert h.goal_endpoint(0, 0.5, 0.9) == (0.5, 0.6)
        assert h.goal_endpoint(0, 0.5, 0.5) == (0.5, 0.5)

    def test_cone_independence_implies_oracle(self):
        # soundness cross-check in the obstacle-free regime: when an
        # agent is far enough from its goal rect the beeline to the
        # nearest goal point stays inside the cone (goal angular radius
        # below the half-angle), so disjoint cones with one diameter of
        # clearance imply the swept discs never touch
        goals = (Rect(0.8, 0.1, 0.9, 0.2), Rect(0.8, 0.8, 0.9, 0.9))
        cone_h = ConeHeuristic(goals=goals, agent_radius=0.03)
        line_h = StraightLineIndependence(goals=goals, agent_radius=0.03)
        cone_true = 0
        for _ in range(500):
            xs = RNG.uniform(0.02, 0.6, 2)
            ys = RNG.uniform(0.02, 0.98, 2)
            a = cfg([0], [xs[0], ys[0]])
            b = cfg([1], [xs[1], ys[1]])
            if cone_h.pairwise(a, b):
                cone_true += 1
                assert line_h.pairwise(a, b)
        assert cone_true > 50  # the implication was actually exercised


class TestMakeHeuristic:
    def env(self, obstacles=()):
        return Environment(
            obstacles=tuple(obstacles),
            goals=(Rect(0.8, 0.4, 0.9, 0.6),),
            starts=((0.1, 0.5),),
            agent_radius=0.05,
        )

    def test_names(self):
        env = self.env()
        assert make_heuristic("never", env).name == "never"
        assert make_heuristic("cone", env).name == "cone"
        assert isinstance(
            make_heuristic("straightline", env), StraightLineIndependence
        )
        with pytest.raises(ValueError):
            make_heuristic("nope", env)

    def test_cone_angle_override(self):
        h = make_heuristic("cone", self.env(), half_angle=0.3)
        assert h.half_angle == 0.3

    def test_straightline_requires_obstacle_free(self):
        blocked = self.env(obstacles=(Rect(0.4, 0.0, 0.6, 1.0),))
        with pytest.raises(ValueError):
            make_heuristic("straightline", blocked)
