"""Batch front-end: evaluate session files, run simulations, serve the API.

Exit codes for ``evaluate``: 0 when the session passes (converged), 2 when
the comparison data is incomplete, 3 when agreement sits below the threshold,
1 on input errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .engine import CONVERGED, INCOMPLETE
from .errors import DecisionError
from .session import Session
from .simulate import POLICIES, SimulationSpec, run_simulation

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCOMPLETE = 2
EXIT_BELOW_THRESHOLD = 3


def _config_overrides(args: argparse.Namespace, config):
    updates = {}
    for name in ("epsilon", "threshold", "cap", "mean"):
        value = getattr(args, name, None)
        if value is not None:
            updates[name] = value
    if getattr(args, "floor", None) is not None:
        updates["revision_floor"] = args.floor
    return dataclasses.replace(config, **updates) if updates else config


def _print_evaluation(session: Session) -> None:
    evaluation = session.current_evaluation()
    if evaluation.status == INCOMPLETE:
        print("status: incomplete")
        comp = evaluation.completeness
        print(f"union connected: {comp.union_connected}")
        print(f"components: {comp.components}")
        if comp.suggested_edges:
            pairs = ", ".join(
                f"{session.alternatives[i]}-{session.alternatives[j]}"
                for i, j in comp.suggested_edges
            )
            print(f"suggested comparisons: {pairs}")
        disconnected = [e for e, ok in comp.connected.items() if not ok]
        if disconnected:
            print(f"experts without a spanning tree: {', '.join(disconnected)}")
        return
    w = evaluation.result.w.w
    K = evaluation.report.K
    print("priority vector: " + "  ".join(f"{x:.4f}" for x in w))
    print("agreement K:     " + "  ".join(f"{x:.4f}" for x in K)
          + f"   (threshold {evaluation.report.threshold})")
    print(f"trees: {evaluation.tree_count}   replicas: {evaluation.result.replica_count}")
    for label, weight in sorted(zip(session.alternatives, w), key=lambda p: -p[1]):
        print(f"  {label}: {weight:.4f}")
    print(f"status: {evaluation.status}")


def cmd_evaluate(args: argparse.Namespace) -> int:
    path = Path(args.session)
    try:
        raw = path.read_text()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        print(f"error: {path}:{exc.lineno}:{exc.colno}: {exc.msg}", file=sys.stderr)
        return EXIT_ERROR
    try:
        session = Session.from_dict(data)
        session.config = _config_overrides(args, session.config)
        evaluation = session.evaluate()
        _print_evaluation(session)
    except DecisionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.spectrums and evaluation.report is not None:
        out = Path(args.spectrums)
        out.mkdir(parents=True, exist_ok=True)
        for coord, spectrum in enumerate(evaluation.report.spectrums):
            label = session.alternatives[coord]
            (out / f"spectrum_{coord}_{label}.tsv").write_text(spectrum.table())
        print(f"spectrum tables written to {out}/")
    if args.output:
        Path(args.output).write_text(json.dumps(session.to_dict(), indent=2) + "\n")
        print(f"updated session written to {args.output}")
    if evaluation.status == INCOMPLETE:
        return EXIT_INCOMPLETE
    if evaluation.status == CONVERGED:
        return EXIT_OK
    return EXIT_BELOW_THRESHOLD


def cmd_simulate(args: argparse.Namespace) -> int:
    ground_truth = None
    if args.ground_truth:
        ground_truth = tuple(float(x) for x in args.ground_truth.split(","))
    spec = SimulationSpec(
        n=args.n,
        m=args.experts,
        ground_truth=ground_truth,
        jitter_grades=args.jitter_grades,
        jitter_cells=args.jitter_cells,
        policy=args.policy,
        seed=args.seed,
        repetitions=args.reps,
    )
    spec = dataclasses.replace(spec, config=_config_overrides(args, spec.config))
    summary = run_simulation(spec)
    for outcome in summary.outcomes:
        err = f"{outcome.final_error:.4f}" if outcome.final_error == outcome.final_error else "n/a"
        print(f"seed {outcome.seed}: {outcome.trace.status} after "
              f"{outcome.rounds} rounds, L-inf error {err}")
    print(f"converged: {summary.converged_fraction:.0%} of {len(summary.outcomes)} runs")
    rounds = [o.rounds for o in summary.outcomes]
    print(f"rounds: mean {sum(rounds) / len(rounds):.1f}, max {max(rounds)}")
    if any(o.converged for o in summary.outcomes):
        print(f"max converged L-inf error: {summary.max_converged_error:.4f}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(args.data_dir), host=args.host, port=args.port,
                log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treeconsensus",
        description="Group decision support via spanning-tree aggregation "
                    "of pairwise comparisons",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evaluate", help="evaluate a session file offline")
    ev.add_argument("session", help="path to a session JSON document")
    ev.add_argument("--epsilon", type=float, help="spectrum precision (default 0.01)")
    ev.add_argument("--threshold", type=float, help="agreement threshold (default 0.7)")
    ev.add_argument("--cap", type=int, help="feedback round cap (default 50)")
    ev.add_argument("--mean", choices=("geometric", "arithmetic"),
                    help="aggregation mean (default geometric)")
    ev.add_argument("--floor", type=float, help="revision deviation floor")
    ev.add_argument("--spectrums", metavar="DIR",
                    help="write per-coordinate spectrum tables into DIR")
    ev.add_argument("--output", metavar="FILE",
                    help="write the evaluated session document to FILE")
    ev.set_defaults(func=cmd_evaluate)

    sim = sub.add_parser("simulate", help="synthetic-expert convergence runs")
    sim.add_argument("--n", type=int, default=4, help="alternatives (default 4)")
    sim.add_argument("--experts", type=int, default=3, help="experts (default 3)")
    sim.add_argument("--reps", type=int, default=10, help="seeded repetitions")
    sim.add_argument("--seed", type=int, default=0, help="base seed")
    sim.add_argument("--jitter-grades", type=int, default=1,
                     help="jitter magnitude in grades (default 1)")
    sim.add_argument("--jitter-cells", type=int, default=1,
                     help="misjudged comparisons per expert (default 1)")
    sim.add_argument("--policy", choices=POLICIES, default="accept",
                     help="revision response policy (default accept)")
    sim.add_argument("--ground-truth", metavar="W1,W2,...",
                     help="fixed ground-truth vector (default: random per seed)")
    sim.add_argument("--epsilon", type=float, help="spectrum precision")
    sim.add_argument("--threshold", type=float, help="agreement threshold")
    sim.add_argument("--cap", type=int, help="feedback round cap")
    sim.add_argument("--mean", choices=("geometric", "arithmetic"))
    sim.add_argument("--floor", type=float, help="revision deviation floor")
    sim.set_defaults(func=cmd_simulate)

    srv = sub.add_parser("serve", help="run the facilitation HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    srv.add_argument("--data-dir", default="./sessions",
                     help="directory for session documents")
    srv.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
