"""Directed motion hypergraph over factorized blocks.

Nodes are block configurations. A standard edge joins two nodes over the
same agent set and is traversable both ways. A splitting edge is directed
from one node to two or more nodes whose agent sets partition the
source's set; following it hands each sub-block its own independent
subproblem. Splitting edges only ever refine agent sets, so the blocks
form a DAG and costs-to-goal can be solved per agent set from the most
refined sets upward, with a Dijkstra pass inside each set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence, TextIO

import numpy as np
from scipy.sparse.csgraph import csgraph_from_dense, dijkstra

from .core import AgentSet, BlockConfig

NodeId = int

GoalFn = Callable[[AgentSet, np.ndarray], np.ndarray]
"""Vectorized goal predicate: (agents, coords matrix) -> bool mask."""


def connection_radius(
    n: int, d: int, gamma: float = 100.0, eta: float = 100.0
) -> float:
    """Shrinking neighbor radius min(gamma*(log n / n)^(1/d), eta)."""
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if n <= 1:
        return eta
    return min(gamma * (math.log(n) / n) ** (1.0 / d), eta)


@dataclass(frozen=True)
class HyperEdge:
    source: NodeId
    targets: tuple[NodeId, ...]
    cost: float

    @property
    def is_splitting(self) -> bool:
        return len(self.targets) > 1


@dataclass
class HyperPath:
    """Solution tree: per node the outgoing edge taken; goal leaves omitted."""

    roots: tuple[NodeId, ...]
    steps: dict[NodeId, HyperEdge]
    total_cost: float


@dataclass(frozen=True)
class GraphStats:
    nodes: int
    edges: int  # directed count; a standard edge contributes two
    splitting_edges: int
    nodes_per_agent_set: dict[tuple[int, ...], int]


class _SubIndex:
    """Append-only coordinate matrix for one agent set's nodes."""

    __slots__ = ("ids", "pos", "_buf", "_n")

    def __init__(self, width: int) -> None:
        self.ids: list[NodeId] = []
        self.pos: dict[NodeId, int] = {}
        self._buf = np.empty((8, width))
        self._n = 0

    def add(self, nid: NodeId, coords: Sequence[float]) -> None:
        if self._n == self._buf.shape[0]:
            grown = np.empty((2 * self._buf.shape[0], self._buf.shape[1]))
            grown[: self._n] = self._buf[: self._n]
            self._buf = grown
        self._buf[self._n] = coords
        self.pos[nid] = self._n
        self.ids.append(nid)
        self._n += 1

    def matrix(self) -> np.ndarray:
        return self._buf[: self._n]

    def __len__(self) -> int:
        return self._n


class _StdEdges:
    """Undirected standard edges of one agent set, in local indices."""

    __slots__ = ("u", "v", "w", "_pairs", "has_duplicates")

    def __init__(self) -> None:
        self.u: list[int] = []
        self.v: list[int] = []
        self.w: list[float] = []
        self._pairs: set[tuple[int, int]] = set()
        self.has_duplicates = False

    def add(self, a: int, b: int, w: float) -> None:
        key = (a, b) if a < b else (b, a)
        if key in self._pairs:
            self.has_duplicates = True
        else:
            self._pairs.add(key)
        self.u.append(a)
        self.v.append(b)
        self.w.append(w)

    def __len__(self) -> int:
        return len(self.u)


@dataclass
class _BlockSolve:
    ids: list[NodeId]
    values: np.ndarray
    pred: np.ndarray | None
    goal_mask: np.ndarray
    virtual: int


class PlanHypergraph:
    """Growing hypergraph shared by all planners."""

    def __init__(self) -> None:
        self._configs: list[BlockConfig] = []
        self._resources: list[object | None] = []
        self._sub: dict[tuple[int, ...], _SubIndex] = {}
        self._std: dict[tuple[int, ...], _StdEdges] = {}
        self._splits: list[HyperEdge] = []
        self._splits_by_source_set: dict[tuple[int, ...], list[int]] = {}
        self._edge_ids = 0

    # --- nodes -------------------------------------------------------------

    def add_node(self, config: BlockConfig, resources: object | None = None) -> NodeId:
        nid = len(self._configs)
        self._configs.append(config)
        self._resources.append(resources)
        key = config.agents.members
        sub = self._sub.get(key)
        if sub is None:
            sub = self._sub[key] = _SubIndex(len(config.coords))
        sub.add(nid, config.coords)
        return nid

    def config(self, nid: NodeId) -> BlockConfig:
        return self._configs[nid]

    def resources(self, nid: NodeId) -> object | None:
        return self._resources[nid]

    def node_count(self) -> int:
        return len(self._configs)

    def count(self, agents: AgentSet) -> int:
        sub = self._sub.get(agents.members)
        return len(sub) if sub is not None else 0

    def agent_sets(self) -> list[tuple[int, ...]]:
        return sorted(self._sub.keys(), key=lambda t: (len(t), t))

    def near(self, query: BlockConfig, radius: float) -> list[NodeId]:
        """Same-agent-set nodes within `radius` of query (joint Euclidean, inclusive)."""
        ids, _ = self.near_with_coords(query, radius)
        return ids

    def near_with_coords(
        self, query: BlockConfig, radius: float
    ) -> tuple[list[NodeId], np.ndarray]:
        sub = self._sub.get(query.agents.members)
        if sub is None or len(sub) == 0:
            return [], np.empty((0, len(query.coords)))
        mat = sub.matrix()
        q = np.asarray(query.coords)
        d2 = ((mat - q) ** 2).sum(axis=1)
        keep = np.nonzero(d2 <= radius * radius)[0]
        return [sub.ids[i] for i in keep], mat[keep]

    # --- edges -------------------------------------------------------------

    def add_hyperedge(
        self, source: NodeId, targets: Sequence[NodeId], cost: float
    ) -> int:
        """Connect source to one or more target nodes.

        A single target over the same agent set yields a standard edge,
        recorded in both directions. Multiple targets must partition the
        source's agent set and yield a directed splitting edge.
        """
        if not (0 <= source < len(self._configs)):
            raise ValueError(f"unknown source node {source}")
        if not targets:
            raise ValueError("hyperedge needs at least one target")
        if not (math.isfinite(cost) and cost >= 0.0):
            raise ValueError(f"edge cost must be finite and non-negative, got {cost}")
        src_agents = self._configs[source].agents
        union: list[int] = []
        for t in targets:
            if not (0 <= t < len(self._configs)):
                raise ValueError(f"unknown target node {t}")
            union.extend(self._configs[t].agents.members)
        if len(set(union)) != len(union) or set(union) != set(src_agents.members):
            raise ValueError(
                "targets must carry disjoint agent sets covering the source's"
            )

        eid = self._edge_ids
        self._edge_ids += 1
        if len(targets) == 1:
            key = src_agents.members
            sub = self._sub[key]
            std = self._std.get(key)
            if std is None:
                std = self._std[key] = _StdEdges()
            std.add(sub.pos[source], sub.pos[targets[0]], float(cost))
        else:
            edge = HyperEdge(source, tuple(targets), float(cost))
            idx = len(self._splits)
            self._splits.append(edge)
            self._splits_by_source_set.setdefault(src_agents.members, []).append(idx)
        return eid

    def standard_edges(self) -> Iterator[tuple[NodeId, NodeId, float]]:
        """Each undirected standard edge once, in as-added direction."""
        for key, std in self._std.items():
            ids = self._sub[key].ids
            for a, b, w in zip(std.u, std.v, std.w):
                yield ids[a], ids[b], w

    def splitting_edges(self) -> Iterator[HyperEdge]:
        return iter(self._splits)

    def stats(self) -> GraphStats:
        n_std = sum(len(e) for e in self._std.values())
        per_set = {key: len(sub) for key, sub in self._sub.items()}
        return GraphStats(
            nodes=len(self._configs),
            edges=2 * n_std + len(self._splits),
            splitting_edges=len(self._splits),
            nodes_per_agent_set=per_set,
        )

    # --- cost-to-goal solve --------------------------------------------------

    def _solve_blocks(
        self, goal_fn: GoalFn, want_pred: bool
    ) -> tuple[np.ndarray, dict[tuple[int, ...], _BlockSolve]]:
        """Cost-to-goal for every node, most refined agent sets first."""
        values = np.full(len(self._configs), np.inf)
        blocks: dict[tuple[int, ...], _BlockSolve] = {}
        for key in self.agent_sets():
            sub = self._sub[key]
            n_loc = len(sub)
            ids_arr = np.array(sub.ids)
            agents = AgentSet(key)
            goal_mask = np.asarray(goal_fn(agents, sub.matrix()), bool)

            v0 = np.where(goal_mask, 0.0, np.inf)
            for idx in self._splits_by_source_set.get(key, ()):  # refined sets done
                e = self._splits[idx]
                cand = e.cost
                for t in e.targets:
                    cand = cand + values[t]
                loc = sub.pos[e.source]
                if cand < v0[loc]:
                    v0[loc] = cand

            std = self._std.get(key)
            virtual = n_loc
            if std is None or len(std) == 0 or not np.isfinite(v0).any():
                values[ids_arr] = v0
                pred = None
                if want_pred:
                    pred = np.full(n_loc + 1, virtual)
                blocks[key] = _BlockSolve(sub.ids, v0, pred, goal_mask, virtual)
                continue

            dense = np.full((n_loc + 1, n_loc + 1), np.inf)
            uu = np.asarray(std.u)
            vv = np.asarray(std.v)
            ww = np.asarray(std.w)
            if std.has_duplicates:
                np.minimum.at(dense, (uu, vv), ww)
                np.minimum.at(dense, (vv, uu), ww)
            else:
                dense[uu, vv] = ww
                dense[vv, uu] = ww
            seeded = np.isfinite(v0)
            dense[virtual, :n_loc][seeded] = v0[seeded]
            graph = csgraph_from_dense(dense, null_value=np.inf)
            if want_pred:
                dist, pred = dijkstra(
                    graph, directed=True, indices=virtual, return_predecessors=True
                )
            else:
                dist = dijkstra(graph, directed=True, indices=virtual)
                pred = None
            values[ids_arr] = dist[:n_loc]
            blocks[key] = _BlockSolve(sub.ids, dist[:n_loc], pred, goal_mask, virtual)
        return values, blocks

    def best_cost(self, roots: Sequence[NodeId], goal_fn: GoalFn) -> float | None:
        """Total cost of the best solution from the given roots, if any."""
        if not roots:
            raise ValueError("need at least one root")
        values, _ = self._solve_blocks(goal_fn, want_pred=False)
        total = 0.0
        for r in roots:
            if not np.isfinite(values[r]):
                return None
            total += float(values[r])
        return total

    def best_solution(self, roots: Sequence[NodeId], goal_fn: GoalFn) -> HyperPath | None:
        """Best hyperpath from the roots, or None when any root is cut off."""
        if not roots:
            raise ValueError("need at least one root")
        values, blocks = self._solve_blocks(goal_fn, want_pred=True)
        if not all(np.isfinite(values[r]) for r in roots):
            return None

        pair_cost_cache: dict[tuple[int, ...], dict[tuple[int, int], float]] = {}

        def pair_cost(key: tuple[int, ...], a: NodeId, b: NodeId) -> float:
            table = pair_cost_cache.get(key)
            if table is None:
                table = {}
                ids = self._sub[key].ids
                std = self._std[key]
                for lu, lv, w in zip(std.u, std.v, std.w):
                    pk = (ids[lu], ids[lv]) if ids[lu] < ids[lv] else (ids[lv], ids[lu])
                    prev = table.get(pk)
                    if prev is None or w < prev:
                        table[pk] = w
                pair_cost_cache[key] = table
            return table[(a, b) if a < b else (b, a)]

        steps: dict[NodeId, HyperEdge] = {}
        stack: list[NodeId] = list(roots)
        while stack:
            u = stack.pop()
            if u in steps:
                raise RuntimeError(f"node {u} reached twice during extraction")
            key = self._configs[u].agents.members
            blk = blocks[key]
            sub = self._sub[key]
            loc = sub.pos[u]
            p = blk.pred[loc] if blk.pred is not None else blk.virtual
            if p >= 0 and p != blk.virtual:
                nxt = sub.ids[p]
                w = pair_cost(key, u, nxt)
                steps[u] = HyperEdge(u, (nxt,), w)
                stack.append(nxt)
                continue
            # seeded directly: a goal leaf or a splitting step
            if blk.goal_mask[loc] and values[u] == 0.0:
                continue
            chosen: HyperEdge | None = None
            for idx in self._splits_by_source_set.get(key, ()):
                e = self._splits[idx]
                if e.source != u:
                    continue
                cand = e.cost
                for t in e.targets:
                    cand = cand + values[t]
                if cand == values[u]:
                    chosen = e
                    break
            if chosen is None:
                raise RuntimeError(f"no step reproduces cost-to-goal at node {u}")
            steps[u] = chosen
            stack.extend(chosen.targets)

        total = 0.0
        for r in roots:
            total += float(values[r])
        return HyperPath(tuple(roots), steps, total)

    # --- export --------------------------------------------------------------

    def dump(self, out: TextIO, environment: object | None = None) -> None:
        """Line-oriented text dump for debugging and plotting.

        Optional header lines carry the obstacle map so downstream tools
        need no other input: `radius r`, `obstacle x0 y0 x1 y1`. Then one
        `node <id> <agents> <coords...>` line per node and one
        `edge <src> <targets> <cost> <std|split>` line per stored edge
        (standard edges appear once).
        """
        out.write("# factplan graph dump v1\n")
        if environment is not None:
            out.write(f"radius {environment.agent_radius!r}\n")
            for r in environment.obstacles:
                out.write(
                    f"obstacle {r.xmin!r} {r.ymin!r} {r.xmax!r} {r.ymax!r}\n"
                )
        for nid, cfg in enumerate(self._configs):
            agents = ",".join(str(a) for a in cfg.agents)
            coords = " ".join(repr(c) for c in cfg.coords)
            out.write(f"node {nid} {agents} {coords}\n")
        for u, v, w in self.standard_edges():
            out.write(f"edge {u} {v} {w!r} std\n")
        for e in self._splits:
            targets = ",".join(str(t) for t in e.targets)
            out.write(f"edge {e.source} {targets} {e.cost!r} split\n")
