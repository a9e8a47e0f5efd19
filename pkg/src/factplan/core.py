"""Agent sets, block configurations and partitions of joint states.

A joint configuration over a set of agents can be split into disjoint
blocks, each a configuration over a subset of the agents. These types
carry the bookkeeping for that: canonical agent ordering, joining and
projecting coordinate vectors, and enumerating block subsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

AgentId = int

# Partition enumeration is exponential (Bell numbers); keep it honest.
MAX_ENUMERATION_AGENTS = 6


@dataclass(frozen=True, order=True)
class AgentSet:
    """Non-empty, duplicate-free set of agent indices in ascending order."""

    members: tuple[AgentId, ...]

    def __post_init__(self) -> None:
        ordered = tuple(sorted(int(a) for a in self.members))
        if not ordered:
            raise ValueError("agent set must be non-empty")
        if ordered[0] < 0:
            raise ValueError(f"negative agent id in {self.members!r}")
        if len(set(ordered)) != len(ordered):
            raise ValueError(f"duplicate agent ids in {self.members!r}")
        object.__setattr__(self, "members", ordered)

    @classmethod
    def of(cls, *agents: AgentId) -> "AgentSet":
        return cls(tuple(agents))

    def __iter__(self) -> Iterator[AgentId]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, agent: object) -> bool:
        return agent in self.members

    def index(self, agent: AgentId) -> int:
        """Position of `agent` in the canonical ordering."""
        return self.members.index(agent)

    def union(self, other: "AgentSet") -> "AgentSet":
        if not self.isdisjoint(other):
            # union() is only used to merge disjoint blocks
            raise ValueError(f"agent sets overlap: {self} vs {other}")
        return AgentSet(self.members + other.members)

    def issubset(self, other: "AgentSet") -> bool:
        return set(self.members) <= set(other.members)

    def isdisjoint(self, other: "AgentSet") -> bool:
        return not (set(self.members) & set(other.members))


@dataclass(frozen=True)
class BlockConfig:
    """Configuration of a block: an agent set plus flat coordinates.

    Coordinates are stored agent-major in the canonical agent order,
    `dim` values per agent.
    """

    agents: AgentSet
    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        coords = tuple(float(c) for c in self.coords)
        if not coords or len(coords) % len(self.agents) != 0:
            raise ValueError(
                f"coordinate length {len(coords)} does not divide into "
                f"{len(self.agents)} agents"
            )
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        return len(self.coords) // len(self.agents)

    def agent_coords(self, agent: AgentId) -> tuple[float, ...]:
        i = self.agents.index(agent)
        d = self.dim
        return self.coords[i * d : (i + 1) * d]


def join(blocks: Sequence[BlockConfig]) -> BlockConfig:
    """Merge disjoint blocks into one configuration over the union.

    Coordinates are reassembled in canonical (ascending agent) order, so
    the result does not depend on the order of `blocks`.
    """
    if not blocks:
        raise ValueError("cannot join zero blocks")
    d = blocks[0].dim
    per_agent: dict[AgentId, tuple[float, ...]] = {}
    for b in blocks:
        if b.dim != d:
            raise ValueError(f"mixed per-agent dimensions: {b.dim} vs {d}")
        for a in b.agents:
            if a in per_agent:
                raise ValueError(f"agent {a} appears in more than one block")
            per_agent[a] = b.agent_coords(a)
    agents = AgentSet(tuple(per_agent))
    coords: list[float] = []
    for a in agents:
        coords.extend(per_agent[a])
    return BlockConfig(agents, tuple(coords))


def project(joint: BlockConfig, subset: AgentSet) -> BlockConfig:
    """Restrict a configuration to a subset of its agents."""
    if not subset.issubset(joint.agents):
        raise ValueError(f"{subset} is not a subset of {joint.agents}")
    coords: list[float] = []
    for a in subset:
        coords.extend(joint.agent_coords(a))
    return BlockConfig(subset, tuple(coords))


def per_agent_cost(start: BlockConfig, end: BlockConfig) -> float:
    """Transition cost: sum over agents of Euclidean segment length.

    This is the social cost metric; note it is not the Euclidean norm in
    the joint space.
    """
    if start.agents != end.agents:
        raise ValueError(f"agent sets differ: {start.agents} vs {end.agents}")
    d = start.dim
    total = 0.0
    for i in range(len(start.agents)):
        s = 0.0
        for j in range(i * d, (i + 1) * d):
            diff = end.coords[j] - start.coords[j]
            s += diff * diff
        total += math.sqrt(s)
    return total


@dataclass(frozen=True)
class Partition:
    """Disjoint blocks covering an agent set, in canonical block order."""

    blocks: tuple[BlockConfig, ...]

    def __post_init__(self) -> None:
        if not self.blocks:
            raise ValueError("partition must have at least one block")
        seen: set[AgentId] = set()
        for b in self.blocks:
            overlap = seen & set(b.agents.members)
            if overlap:
                raise ValueError(f"blocks overlap on agents {sorted(overlap)}")
            seen.update(b.agents.members)
        ordered = tuple(sorted(self.blocks, key=lambda b: b.agents.members))
        object.__setattr__(self, "blocks", ordered)

    @property
    def agents(self) -> AgentSet:
        members: list[AgentId] = []
        for b in self.blocks:
            members.extend(b.agents.members)
        return AgentSet(tuple(members))

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[BlockConfig]:
        return iter(self.blocks)


@dataclass(frozen=True)
class BlockGroup:
    """Non-empty subset of a partition's blocks, treated as one joint state."""

    blocks: tuple[BlockConfig, ...]

    def __post_init__(self) -> None:
        if not self.blocks:
            raise ValueError("block group must be non-empty")
        ordered = tuple(sorted(self.blocks, key=lambda b: b.agents.members))
        object.__setattr__(self, "blocks", ordered)

    @property
    def agents(self) -> AgentSet:
        members: list[AgentId] = []
        for b in self.blocks:
            members.extend(b.agents.members)
        return AgentSet(tuple(members))

    def joined(self) -> BlockConfig:
        return join(self.blocks)


def powerset_groups(partition: Partition) -> list[BlockGroup]:
    """All 2^k - 1 non-empty block subsets of a k-block partition.

    Deterministic order: ascending by the group's union agent set
    (tuple comparison on canonical members). Unions are distinct because
    blocks are disjoint, so the order is total.
    """
    k = len(partition.blocks)
    groups: list[BlockGroup] = []
    for mask in range(1, 1 << k):
        picked = tuple(
            partition.blocks[i] for i in range(k) if mask & (1 << i)
        )
        groups.append(BlockGroup(picked))
    groups.sort(key=lambda g: g.agents.members)
    return groups


def enumerate_partitions(agents: AgentSet) -> list[tuple[AgentSet, ...]]:
    """Every partition of `agents` into non-empty disjoint subsets.

    Count equals the Bell number of len(agents). Guarded to
    MAX_ENUMERATION_AGENTS agents since the count grows super-exponentially.
    """
    if len(agents) > MAX_ENUMERATION_AGENTS:
        raise ValueError(
            f"refusing to enumerate partitions of {len(agents)} agents "
            f"(limit {MAX_ENUMERATION_AGENTS})"
        )
    members = agents.members
    results: list[tuple[AgentSet, ...]] = []

    def place(i: int, groups: list[list[AgentId]]) -> None:
        if i == len(members):
            results.append(tuple(AgentSet(tuple(g)) for g in groups))
            return
        for g in groups:
            g.append(members[i])
            place(i + 1, groups)
            g.pop()
        groups.append([members[i]])
        place(i + 1, groups)
        groups.pop()

    place(0, [])
    # canonical order inside each partition, then lexicographic overall
    results = [tuple(sorted(p, key=lambda s: s.members)) for p in results]
    results.sort(key=lambda p: tuple(s.members for s in p))
    return results
