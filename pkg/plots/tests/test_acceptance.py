"""End-to-end checks for the plotting component.

Each check prints one [PASS]/[FAIL] verdict line. Together they pin the
component's contract: every bundled figure regenerates from the bundled
planner outputs alone, the plotted cost-trace aggregates agree with an
independent recomputation to 1e-9, and nothing here is needed (or even
imported) by the planner itself.
"""

import csv
import subprocess
import sys

import pytest

from planplots.cli import main
from planplots.figures import plot_cost_trace
from planplots.io import read_trace


@pytest.fixture
def say(capsys):
    def _say(ok: bool, name: str, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        with capsys.disabled():
            print(f"\n{line}")
        assert ok, line

    return _say


def test_figures_regenerate_from_bundled_inputs(samples, tmp_path, say):
    jobs = {
        "trace.png": ["cost-trace", str(samples / "trace.csv")],
        "gain.png": ["gain"]
        + [
            f"{lab}={samples / f'gain-{lab}.csv'}"
            for lab in ("0.7", "0.3", "0.01", "1e-06")
        ],
        "graph.png": ["graph", str(samples / "graph.txt")],
    }
    sizes = {}
    for name, argv in jobs.items():
        out = tmp_path / name
        rc = main(argv + [str(out)])
        sizes[name] = out.stat().st_size if out.exists() else 0
        if rc != 0 or sizes[name] == 0:
            say(False, "figures regenerate from bundled inputs", f"{name} rc={rc}")
    say(
        True,
        "figures regenerate from bundled inputs",
        ", ".join(f"{n} {s} bytes" for n, s in sizes.items()),
    )


def test_cost_trace_aggregates_match_recomputation(samples, say):
    rows = read_trace(samples / "trace.csv")
    curves = plot_cost_trace(rows).curves

    ref: dict[str, dict[int, list[float]]] = {}
    with open(samples / "trace.csv", newline="") as fh:
        for rec in csv.DictReader(fh):
            if rec["best_cost"] == "":
                continue
            ref.setdefault(rec["algorithm"], {}).setdefault(
                int(rec["iteration"]), []
            ).append(float(rec["best_cost"]))

    worst = 0.0
    points = 0
    ok = set(curves) == set(ref)
    for algo, curve in curves.items():
        by_iter = ref.get(algo, {})
        ok = ok and list(curve.iterations) == sorted(by_iter)
        for it, mean in zip(curve.iterations, curve.mean):
            vals = by_iter[int(it)]
            worst = max(worst, abs(mean - sum(vals) / len(vals)))
            points += 1
    say(
        ok and worst <= 1e-9,
        "plotted cost-trace means match independent recomputation",
        f"{points} points across {sorted(curves)}, max |delta| {worst:.3g} <= 1e-9",
    )


def test_plotting_needs_no_planner_runtime(say):
    code = (
        "import sys\n"
        "import planplots, planplots.cli, planplots.figures, planplots.io\n"
        "sys.exit(1 if 'factplan' in sys.modules else 0)\n"
    )
    proc = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    say(
        proc.returncode == 0,
        "plotting imports do not pull in the planner",
        f"subprocess exit {proc.returncode}",
    )
