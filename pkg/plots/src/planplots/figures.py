"""Figure builders over parsed planner outputs.

Every builder returns the numbers it plotted alongside the matplotlib
figure, so callers (and tests) can audit the aggregation without
scraping the image. Rendering is non-interactive; the Agg backend is
forced because the package only ever writes image files.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.collections import LineCollection
from matplotlib.patches import Rectangle

from .io import GainRow, GraphDump, InputFormatError, TraceRow

_AGENT_CMAP = plt.get_cmap("tab10")


@dataclass(frozen=True)
class AlgoCurve:
    """Aggregated best-cost curve of one algorithm over its trials."""

    algorithm: str
    trials: int
    iterations: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    counts: np.ndarray


@dataclass(frozen=True)
class CostTraceResult:
    curves: dict[str, AlgoCurve]
    figure: object


@dataclass(frozen=True)
class GainResult:
    # per agent count: (f values, exact gain) of the first input
    fcurves: dict[int, tuple[np.ndarray, np.ndarray]]
    # per target f: (dispersion labels, exact gain), when sweep inputs given
    sweep: dict[float, tuple[np.ndarray, np.ndarray]] | None
    sweep_agents: int | None
    figure: object


@dataclass(frozen=True)
class GraphResult:
    node_count: int
    std_edge_count: int
    split_dots: tuple[tuple[float, float], ...]
    legend_text: str
    figure: object


def _save(fig, out) -> None:
    if out is not None:
        fig.savefig(out, dpi=150)


def plot_cost_trace(rows: list[TraceRow], out=None) -> CostTraceResult:
    """Mean best-cost curve with a +-1 std band per algorithm.

    At each recorded iteration the mean and (population) std run over
    the trials that already have a solution there; iterations where no
    trial has a cost yet are left out of that algorithm's curve.
    """
    if not rows:
        raise InputFormatError("trace has no rows")
    by_algo: dict[str, dict[int, list[float]]] = {}
    runs: dict[str, set[str]] = {}
    for r in rows:
        by_algo.setdefault(r.algorithm, {})
        runs.setdefault(r.algorithm, set()).add(r.run_id)
        if r.best_cost is not None:
            by_algo[r.algorithm].setdefault(r.iteration, []).append(r.best_cost)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    curves: dict[str, AlgoCurve] = {}
    for algo in sorted(by_algo):
        iters = np.array(sorted(by_algo[algo]), dtype=int)
        vals = [np.array(by_algo[algo][i], dtype=float) for i in iters]
        mean = np.array([v.mean() for v in vals])
        std = np.array([v.std() for v in vals])
        counts = np.array([len(v) for v in vals], dtype=int)
        curve = AlgoCurve(
            algorithm=algo,
            trials=len(runs[algo]),
            iterations=iters,
            mean=mean,
            std=std,
            counts=counts,
        )
        curves[algo] = curve
        if len(iters):
            (line,) = ax.plot(iters, mean, label=f"{algo} ({curve.trials} trials)")
            ax.fill_between(
                iters, mean - std, mean + std, color=line.get_color(), alpha=0.25,
                linewidth=0,
            )
    ax.set_xlabel("iteration")
    ax.set_ylabel("best cost")
    if ax.has_data():
        ax.legend()
    fig.tight_layout()
    _save(fig, out)
    return CostTraceResult(curves=curves, figure=fig)


def _sweep_data(
    labeled: list[tuple[float, list[GainRow]]],
    targets=(0.25, 0.5, 0.75),
) -> tuple[dict[float, tuple[np.ndarray, np.ndarray]], int]:
    """Gain vs dispersion at fixed agent count for a few f values."""
    common = set.intersection(*(set(r.agents for r in rows) for _, rows in labeled))
    if not common:
        raise InputFormatError("gain sweep inputs share no agent count")
    n_fixed = min(common)
    labeled = sorted(labeled, key=lambda lr: -lr[0])
    disps = np.array([lab for lab, _ in labeled])
    sweep: dict[float, tuple[np.ndarray, np.ndarray]] = {}
    for target in targets:
        gains = []
        for _, rows in labeled:
            sub = [r for r in rows if r.agents == n_fixed]
            best = min(sub, key=lambda r: abs(r.f - target))
            gains.append(best.gain_exact)
        sweep[target] = (disps, np.array(gains))
    return sweep, n_fixed


def plot_gain(inputs: list[tuple[str, list[GainRow]]], out=None) -> GainResult:
    """Gain curves: gain vs f per agent count, plus a dispersion panel.

    `inputs` are (label, rows) pairs. The first input drives the
    gain-vs-f panel. When two or more inputs are given and every label
    parses as a float, the labels are read as each file's dispersion
    bound and a second panel shows, at the smallest shared agent count,
    the exact gain approaching its asymptote f as the dispersion
    shrinks. With a single input the second panel instead compares the
    exact and asymptotic expressions on that input.
    """
    if not inputs or any(not rows for _, rows in inputs):
        raise InputFormatError("gain plot needs at least one non-empty table")
    first = inputs[0][1]

    labels_numeric = len(inputs) >= 2
    try:
        labeled = [(float(lab), rows) for lab, rows in inputs]
    except ValueError:
        labels_numeric = False

    fig, (ax_f, ax_d) = plt.subplots(1, 2, figsize=(10, 4.2))

    fcurves: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for n in sorted({r.agents for r in first}):
        sub = sorted((r for r in first if r.agents == n), key=lambda r: r.f)
        fs = np.array([r.f for r in sub])
        gains = np.array([r.gain_exact for r in sub])
        fcurves[n] = (fs, gains)
        ax_f.plot(fs, gains, label=f"|A|={n}")
    ax_f.set_xlabel("factorizable share f")
    ax_f.set_ylabel("exact gain")
    ax_f.set_title(f"gain vs f ({inputs[0][0]})")
    ax_f.legend()

    sweep = None
    sweep_agents = None
    if labels_numeric:
        sweep, sweep_agents = _sweep_data(labeled)
        for target, (disps, gains) in sorted(sweep.items()):
            (line,) = ax_d.plot(disps, gains, marker="o", label=f"f={target:g}")
            ax_d.axhline(target, color=line.get_color(), linestyle="--", linewidth=0.8)
        ax_d.set_xscale("log")
        ax_d.invert_xaxis()
        ax_d.set_xlabel("dispersion bound")
        ax_d.set_ylabel("exact gain")
        ax_d.set_title(f"gain vs dispersion, |A|={sweep_agents}")
        ax_d.legend()
    else:
        n = min(fcurves)
        sub = sorted((r for r in first if r.agents == n), key=lambda r: r.f)
        fs = np.array([r.f for r in sub])
        ax_d.plot(fs, [r.gain_exact for r in sub], label="exact")
        ax_d.plot(
            fs, [r.gain_asymptotic for r in sub], linestyle="--", label="asymptotic"
        )
        ax_d.set_xlabel("factorizable share f")
        ax_d.set_ylabel("gain")
        ax_d.set_title(f"exact vs asymptotic, |A|={n}")
        ax_d.legend()

    fig.tight_layout()
    _save(fig, out)
    return GainResult(
        fcurves=fcurves, sweep=sweep, sweep_agents=sweep_agents, figure=fig
    )


def plot_graph(dump: GraphDump, out=None) -> GraphResult:
    """Workspace overlay of the per-agent subgraphs in a dump.

    Nodes and standard edges are drawn per agent in the agent's color
    (a joint node contributes one point per member agent); every
    splitting hyperedge is marked with a single black dot at the
    centroid of its source configuration.
    """
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.0)
    ax.set_aspect("equal")

    for x0, y0, x1, y1 in dump.obstacles:
        ax.add_patch(
            Rectangle((x0, y0), x1 - x0, y1 - y0, facecolor="0.75", edgecolor="0.4")
        )

    agents = sorted({a for ags, _ in dump.nodes.values() for a in ags})
    segments: dict[int, list] = {a: [] for a in agents}
    for u, v, _ in dump.std_edges:
        ags, cu = dump.nodes[u]
        _, cv = dump.nodes[v]
        for idx, a in enumerate(ags):
            segments[a].append(
                [(cu[2 * idx], cu[2 * idx + 1]), (cv[2 * idx], cv[2 * idx + 1])]
            )
    points: dict[int, list] = {a: [] for a in agents}
    for ags, coords in dump.nodes.values():
        for idx, a in enumerate(ags):
            points[a].append((coords[2 * idx], coords[2 * idx + 1]))

    for a in agents:
        color = _AGENT_CMAP(a % 10)
        if segments[a]:
            ax.add_collection(
                LineCollection(segments[a], colors=[color], linewidths=0.5, alpha=0.5)
            )
        pts = np.array(points[a])
        ax.plot(
            pts[:, 0], pts[:, 1], ".", color=color, markersize=2.5, label=f"agent {a}"
        )

    dots = []
    for src, _, _ in dump.split_edges:
        _, coords = dump.nodes[src]
        xy = np.array(coords, dtype=float).reshape(-1, 2).mean(axis=0)
        dots.append((float(xy[0]), float(xy[1])))
    if dots:
        arr = np.array(dots)
        ax.plot(arr[:, 0], arr[:, 1], "k.", markersize=5, label="split")

    legend_text = (
        f"{len(dump.nodes)} nodes, {len(dump.std_edges)} edges, "
        f"{len(dump.split_edges)} splits"
    )
    if agents:
        ax.legend(title=legend_text, loc="upper right", fontsize="small")
    fig.tight_layout()
    _save(fig, out)
    return GraphResult(
        node_count=len(dump.nodes),
        std_edge_count=len(dump.std_edges),
        split_dots=tuple(dots),
        legend_text=legend_text,
        figure=fig,
    )
