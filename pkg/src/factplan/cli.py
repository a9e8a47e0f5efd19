"""Command line front end (`plan run|gain|verify|dump`).

Errors caused by bad inputs are reported as a single JSON object on
stderr (fields `error` and `message`) with exit status 2, so scripted
callers never have to parse tracebacks. `plan verify` exits 1 when a
self-check fails.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .analysis import gain_grid
from .bench import (
    ALGORITHMS,
    BenchConfig,
    Scenario,
    ScenarioParseError,
    ScenarioValidationError,
    bundled_scenario_names,
    emit_results,
    load_bundled,
    load_scenario,
    run_benchmark,
    summarize,
)
from .planners import (
    PlannerParams,
    SetupError,
    run_fact_sba,
    run_prm_star,
    run_sba,
)
from .verify import run_all


def _add_scenario_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--scenario",
        default="cross4",
        help="bundled scenario name or path to a scenario JSON file",
    )
    p.add_argument(
        "--agents",
        type=int,
        default=None,
        help="restrict to the first K agents of the scenario",
    )
    p.add_argument(
        "--heuristic",
        choices=("never", "cone", "straightline"),
        default=None,
        help="override the scenario's factorization heuristic",
    )
    p.add_argument(
        "--cone-angle",
        type=float,
        default=None,
        help="cone half-angle in radians (cone heuristic only)",
    )


def _add_param_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma", type=float, default=100.0)
    p.add_argument("--eta", type=float, default=100.0)
    p.add_argument("--goal-bias", type=float, default=0.1)
    p.add_argument("--stop-nodes", type=int, default=1000)
    p.add_argument("--max-iterations", type=int, default=20_000)
    p.add_argument("--cadence", type=int, default=50)
    p.add_argument("--radius-mode", choices=("per-block", "largest"), default="per-block")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plan",
        description="multi-agent sampling-based planning benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="benchmark algorithms on a scenario")
    _add_scenario_args(run)
    run.add_argument(
        "--algo",
        action="append",
        default=None,
        help=f"algorithm to run, comma separable, repeatable; one of {ALGORITHMS}",
    )
    run.add_argument("--trials", type=int, default=5)
    run.add_argument("--seed", type=int, default=0, help="base seed; trial t uses seed+t")
    run.add_argument("--out", default="results", help="output directory")
    run.add_argument("--prm-samples", type=int, default=1000)
    run.add_argument("--parallelism", type=int, default=1)
    _add_param_args(run)

    gain = sub.add_parser("gain", help="factorization gain tables")
    gain.add_argument(
        "--grid",
        required=True,
        help="e.g. 'f=0:1:101;agents=2,3,5;disp=0.7;p=0.7' (f is start:stop:count)",
    )
    gain.add_argument("--mu", type=float, default=1.0)
    gain.add_argument("--d-i", type=int, default=2, dest="d_i")
    gain.add_argument("--out", default="-", help="output CSV path, '-' for stdout")

    ver = sub.add_parser("verify", help="run the built-in correctness checks")
    ver.add_argument("--seed", type=int, default=0)

    dump = sub.add_parser("dump", help="run one trial and dump its graph as text")
    _add_scenario_args(dump)
    dump.add_argument("--algo", choices=ALGORITHMS, default="factrrg")
    dump.add_argument("--seed", type=int, default=0)
    dump.add_argument("--out", default="graph.txt")
    dump.add_argument("--prm-samples", type=int, default=1000)
    _add_param_args(dump)

    return parser


def _load(args) -> Scenario:
    path = Path(args.scenario)
    if path.exists():
        scenario = load_scenario(path)
    elif args.scenario in bundled_scenario_names():
        scenario = load_bundled(args.scenario)
    else:
        raise ScenarioParseError(
            f"scenario {args.scenario!r} is neither a file nor one of "
            f"{bundled_scenario_names()}"
        )
    if args.agents is not None:
        scenario = scenario.take(args.agents)
    overrides = {}
    if args.heuristic is not None:
        overrides["heuristic_name"] = args.heuristic
    if args.cone_angle is not None:
        overrides["half_angle"] = args.cone_angle
    if overrides:
        scenario = dataclasses.replace(scenario, **overrides)
        scenario.heuristic()  # surface bad overrides immediately
    return scenario


def _params(args) -> PlannerParams:
    return PlannerParams(
        gamma=args.gamma,
        eta=args.eta,
        goal_bias=args.goal_bias,
        stop_nodes=args.stop_nodes,
        max_iterations=args.max_iterations,
        cost_cadence=args.cadence,
        radius_mode=args.radius_mode,
    )


def _cmd_run(args) -> int:
    scenario = _load(args)
    raw = args.algo if args.algo else ["rrg,factrrg"]
    algorithms = tuple(a for part in raw for a in part.split(",") if a)
    config = BenchConfig(
        algorithms=algorithms,
        trials=args.trials,
        base_seed=args.seed,
        params=_params(args),
        prm_samples=args.prm_samples,
        parallelism=args.parallelism,
    )
    reports = run_benchmark(scenario, config)
    paths = emit_results(args.out, scenario, config, reports)
    for row in summarize(reports):
        cost = row["final_cost_mean"]
        print(
            f"{row['algorithm']}: {row['solved']}/{row['trials']} solved"
            + (f", mean cost {cost:.4f}" if cost is not None else "")
            + (f", {row['errors']} errors" if row["errors"] else "")
        )
    for key, p in paths.items():
        print(f"{key}: {p}")
    return 0


def _cmd_gain(args) -> int:
    spec: dict[str, str] = {}
    for part in args.grid.split(";"):
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"grid term {part!r} is not key=value")
        key, value = part.split("=", 1)
        spec[key.strip()] = value.strip()
    missing = {"f", "agents", "disp", "p"} - spec.keys()
    if missing:
        raise ValueError(f"grid spec missing {sorted(missing)}")
    fparts = spec["f"].split(":")
    if len(fparts) != 3:
        raise ValueError("f must be start:stop:count")
    start, stop = float(fparts[0]), float(fparts[1])
    count = int(fparts[2])
    if count < 2 or stop <= start:
        raise ValueError("f grid needs stop > start and count >= 2")
    f_values = [start + (stop - start) * i / (count - 1) for i in range(count)]
    agents = [int(a) for a in spec["agents"].split(",") if a]
    mu = float(spec.get("mu", args.mu))
    d_i = int(spec.get("di", args.d_i))

    reports = gain_grid(f_values, agents, mu, float(spec["disp"]), float(spec["p"]), d_i)
    lines = ["agents,f,n_joint,n_fact,gain_exact,gain_asymptotic,asymptotic_regime"]
    for r in reports:
        lines.append(
            f"{r.inputs.n_agents},{r.inputs.f!r},{r.n_joint!r},{r.n_fact!r},"
            f"{r.gain_exact!r},{r.gain_asymptotic!r},{int(r.asymptotic_regime)}"
        )
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    return 0


def _cmd_verify(args) -> int:
    results = run_all(args.seed)
    failed = 0
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        failed += not r.ok
        print(f"{status} {r.name}: {r.detail}")
    return 1 if failed else 0


def _cmd_dump(args) -> int:
    scenario = _load(args)
    params = scenario.normalized_params(_params(args))
    if args.algo == "rrg":
        res = run_sba(scenario.env, params, args.seed)
    elif args.algo == "factrrg":
        res = run_fact_sba(scenario.env, params, scenario.heuristic(), args.seed)
    else:
        res = run_prm_star(scenario.env, params, args.seed, args.prm_samples)
    out = Path(args.out)
    with out.open("w") as fh:
        res.graph.dump(fh, scenario.env)
    cost = "none" if res.final_cost is None else f"{res.final_cost:.6f}"
    print(
        f"{res.algorithm} seed {res.seed}: {res.stats.nodes} nodes, "
        f"{res.stats.edges} directed edges, best cost {cost}"
    )
    print(f"graph: {out}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "gain": _cmd_gain,
        "verify": _cmd_verify,
        "dump": _cmd_dump,
    }
    try:
        return handlers[args.command](args)
    except (ScenarioParseError, ScenarioValidationError, SetupError, ValueError) as e:
        json.dump({"error": type(e).__name__, "message": str(e)}, sys.stderr)
        sys.stderr.write("\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
