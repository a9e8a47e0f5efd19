"""Readers for the planner's documented text outputs.

Three formats, all produced by the `plan` CLI: benchmark cost traces
(`trace.csv`), factorization-gain tables (`plan gain` CSV), and
line-oriented graph dumps (`plan dump`). Anything missing, empty, or
off-format raises InputFormatError so callers can report one uniform
error kind.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path


class InputFormatError(ValueError):
    """Input file missing, empty, or not in the documented format."""


TRACE_HEADER = ("run_id", "algorithm", "seed", "iteration", "best_cost")
GAIN_HEADER = (
    "agents",
    "f",
    "n_joint",
    "n_fact",
    "gain_exact",
    "gain_asymptotic",
    "asymptotic_regime",
)
DUMP_MAGIC = "# factplan graph dump v1"


@dataclass(frozen=True)
class TraceRow:
    run_id: str
    algorithm: str
    seed: int
    iteration: int
    best_cost: float | None


@dataclass(frozen=True)
class GainRow:
    agents: int
    f: float
    n_joint: float
    n_fact: float
    gain_exact: float
    gain_asymptotic: float
    asymptotic_regime: bool


@dataclass(frozen=True)
class GraphDump:
    """Parsed graph dump: geometry header plus nodes and edges.

    `nodes` maps node id to (agent ids, flat per-agent coordinates);
    standard edges are (u, v, cost) and appear once per undirected
    edge; splitting edges are (source, target ids, cost).
    """

    radius: float | None
    obstacles: tuple[tuple[float, float, float, float], ...]
    nodes: dict[int, tuple[tuple[int, ...], tuple[float, ...]]]
    std_edges: tuple[tuple[int, int, float], ...]
    split_edges: tuple[tuple[int, tuple[int, ...], float], ...]


def _read_text(path) -> str:
    p = Path(path)
    try:
        return p.read_text()
    except OSError as exc:
        raise InputFormatError(f"cannot read {p}: {exc}") from exc


def _csv_rows(path, header: tuple[str, ...]) -> list[list[str]]:
    text = _read_text(path)
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise InputFormatError(f"{path}: empty file")
    if tuple(rows[0]) != header:
        raise InputFormatError(
            f"{path}: expected header {','.join(header)!r}, got {rows[0]!r}"
        )
    body = [r for r in rows[1:] if r]
    if not body:
        raise InputFormatError(f"{path}: no data rows")
    return body


def read_trace(path) -> list[TraceRow]:
    out = []
    for r in _csv_rows(path, TRACE_HEADER):
        if len(r) != 5:
            raise InputFormatError(f"{path}: malformed trace row {r!r}")
        out.append(
            TraceRow(
                run_id=r[0],
                algorithm=r[1],
                seed=int(r[2]),
                iteration=int(r[3]),
                best_cost=float(r[4]) if r[4] != "" else None,
            )
        )
    return out


def read_gain(path) -> list[GainRow]:
    out = []
    for r in _csv_rows(path, GAIN_HEADER):
        if len(r) != 7:
            raise InputFormatError(f"{path}: malformed gain row {r!r}")
        out.append(
            GainRow(
                agents=int(r[0]),
                f=float(r[1]),
                n_joint=float(r[2]),
                n_fact=float(r[3]),
                gain_exact=float(r[4]),
                gain_asymptotic=float(r[5]),
                asymptotic_regime=bool(int(r[6])),
            )
        )
    return out


def read_dump(path) -> GraphDump:
    lines = _read_text(path).splitlines()
    if not lines or not lines[0].startswith(DUMP_MAGIC):
        raise InputFormatError(f"{path}: not a graph dump (missing {DUMP_MAGIC!r})")
    radius = None
    obstacles = []
    nodes: dict[int, tuple[tuple[int, ...], tuple[float, ...]]] = {}
    std_edges = []
    split_edges = []
    for ln in lines[1:]:
        if not ln.strip():
            continue
        tok = ln.split()
        try:
            if tok[0] == "radius":
                radius = float(tok[1])
            elif tok[0] == "obstacle":
                obstacles.append(tuple(float(v) for v in tok[1:5]))
            elif tok[0] == "node":
                agents = tuple(int(a) for a in tok[2].split(","))
                coords = tuple(float(v) for v in tok[3:])
                if len(coords) != 2 * len(agents):
                    raise ValueError("coordinate count does not match agent set")
                nodes[int(tok[1])] = (agents, coords)
            elif tok[0] == "edge" and tok[4] == "std":
                std_edges.append((int(tok[1]), int(tok[2]), float(tok[3])))
            elif tok[0] == "edge" and tok[4] == "split":
                targets = tuple(int(t) for t in tok[2].split(","))
                split_edges.append((int(tok[1]), targets, float(tok[3])))
            else:
                raise ValueError(f"unknown record {tok[0]!r}")
        except (IndexError, ValueError) as exc:
            raise InputFormatError(f"{path}: bad dump line {ln!r}: {exc}") from exc
    refs = {u for u, _, _ in std_edges} | {v for _, v, _ in std_edges}
    for src, targets, _ in split_edges:
        refs.add(src)
        refs.update(targets)
    missing = refs - nodes.keys()
    if missing:
        raise InputFormatError(f"{path}: edges reference unknown nodes {sorted(missing)}")
    return GraphDump(
        radius=radius,
        obstacles=tuple(obstacles),
        nodes=nodes,
        std_edges=tuple(std_edges),
        split_edges=tuple(split_edges),
    )
