"""Command-line front end: single runs, sweeps, probability tables, traces.

Exit codes: 0 success, 2 validation error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import os
import random
import sys

from mobigrid.config import ConfigError, config_snapshot, make_config
from mobigrid.engine import run
from mobigrid.experiments import (
    MOBILITY_POINTS,
    POPULATION_POINTS,
    measure_run,
    metrics_csv_row,
    mobility_sweep_base,
    population_sweep_base,
    sweep_mobility,
    sweep_population,
    write_summary_csv,
    write_sweep_csv,
)
from mobigrid.hexgrid import HexCoord
from mobigrid.mobility import (
    CellGeometry,
    MobilityParams,
    RelativeDirection,
    WalkerState,
    advance,
    classify_angle,
    confining_angles,
    direction_probabilities,
    sample_drift_angle,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def cmd_run(args: argparse.Namespace) -> int:
    config = make_config(args.config)
    os.makedirs(args.out, exist_ok=True)
    result = run(config, args.seed)
    metrics = measure_run(result)
    header, row = metrics_csv_row(metrics, args.seed)
    with open(os.path.join(args.out, "metrics.csv"), "w", encoding="utf-8") as fh:
        fh.write(header + "\n" + row + "\n")
    with open(os.path.join(args.out, "events.log"), "w", encoding="utf-8") as fh:
        fh.write(result.log_text())
    with open(os.path.join(args.out, "config.txt"), "w", encoding="utf-8") as fh:
        fh.write(config_snapshot(config))
    print(f"run complete: {len(result.log_lines)} log lines -> {args.out}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    os.makedirs(args.out, exist_ok=True)
    if args.mode == "population":
        base = make_config(args.config) if args.config else population_sweep_base()
        rows = sweep_population(
            base, POPULATION_POINTS, args.replicates, args.seed
        )
    else:
        base = make_config(args.config) if args.config else mobility_sweep_base()
        rows = sweep_mobility(base, MOBILITY_POINTS, args.replicates, args.seed)
    sweep_path = os.path.join(args.out, f"{args.mode}_sweep.csv")
    summary_path = os.path.join(args.out, f"{args.mode}_sweep_summary.csv")
    write_sweep_csv(rows, sweep_path, args.mode)
    write_summary_csv(rows, summary_path, args.mode)
    print(f"wrote {sweep_path} and {summary_path} ({len(rows)} rows)")
    return EXIT_OK


def cmd_probs(args: argparse.Namespace) -> int:
    params = MobilityParams(args.sigma)
    probs = direction_probabilities(params, confining_angles(CellGeometry.regular()))
    print(f"sigma_deg = {args.sigma:g}")
    for k in RelativeDirection:
        print(f"{k.name.lower():<2} = {probs.p(k):.6f}")
    print(f"sum = {sum(probs.as_tuple()):.6f}")
    return EXIT_OK


def cmd_walk(args: argparse.Namespace) -> int:
    params = MobilityParams(args.sigma)
    angles = confining_angles(CellGeometry.regular())
    rng = random.Random(f"{args.seed}:walk")
    state = WalkerState(HexCoord(0, 0), heading=0)
    print("step\ttheta_deg\tk\theading\tcell")
    for step in range(1, args.steps + 1):
        theta = sample_drift_angle(rng, params)
        direction = classify_angle(theta, angles)
        state = advance(state, direction)
        print(
            f"{step}\t{theta:.4f}\t{direction.name}\t{state.heading}\t{state.cell}"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mobigrid",
        description="Wireless mobile grid simulator with normal-walk mobility",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a single simulation run")
    p_run.add_argument("--config", default=None, help="flat key=value config file")
    p_run.add_argument("--seed", type=int, default=1)
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.set_defaults(fn=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run an experiment sweep")
    p_sweep.add_argument("--config", default=None)
    p_sweep.add_argument("--mode", choices=("population", "mobility"), required=True)
    p_sweep.add_argument("--replicates", type=int, default=30)
    p_sweep.add_argument("--seed", type=int, default=1)
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(fn=cmd_sweep)

    p_probs = sub.add_parser("probs", help="print the six direction probabilities")
    p_probs.add_argument("--sigma", type=float, required=True)
    p_probs.set_defaults(fn=cmd_probs)

    p_walk = sub.add_parser("walk", help="trace a single walker")
    p_walk.add_argument("--sigma", type=float, default=30.0)
    p_walk.add_argument("--steps", type=int, default=20)
    p_walk.add_argument("--seed", type=int, default=1)
    p_walk.set_defaults(fn=cmd_walk)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # pragma: no cover - defensive
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
