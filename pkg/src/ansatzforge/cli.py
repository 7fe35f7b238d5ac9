"""Command-line entry point.

Subcommands: train, baseline, skeleton, plot.  `train` accepts a JSON
config file mirroring every flag; explicit flags win over the file.
Exit codes: 0 on success, 2 for configuration problems, 3 when the
numerics break down.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, NumericalFailure
from .serialize import dumps
from .skeleton import extract_skeleton, load_corpus
from .training import RunConfig, build_problem, evaluate_baseline, run_training
from .vite import ViteConfig

_SCORING_VITE = ViteConfig(max_steps=2000, energy_tol=1e-10, seed=11)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ansatzforge",
        description="Reinforcement-learned ansatz design for imaginary time evolution.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="run a seeded training campaign")
    train.add_argument("--config", help="JSON file mirroring the flags below")
    train.add_argument("--problem", choices=("maxcut", "h2"))
    train.add_argument("--reward", choices=("v1", "v2"))
    train.add_argument("--threshold", choices=("evolving", "adaptive"))
    train.add_argument("--episodes", type=int)
    train.add_argument("--trials", type=int)
    train.add_argument("--seed", type=int)
    train.add_argument("--out", help="run directory (default: under $ANSATZFORGE_OUT)")
    train.add_argument("--graph-file", help="Max-Cut graph JSON, replaces the 4-node path")
    train.add_argument(
        "--warm-start",
        action=argparse.BooleanOptionalAction,
        help="seed each optimization from the previous step's angles",
    )

    baseline = sub.add_parser("baseline", help="score the hardware-efficient ansatz")
    baseline.add_argument("--problem", choices=("maxcut", "h2"), required=True)
    baseline.add_argument("--reps", type=int, choices=(1, 2), required=True)

    skeleton = sub.add_parser("skeleton", help="extract a consensus circuit from successes")
    skeleton.add_argument("--corpus", required=True, help="directory of circuit JSONs")
    skeleton.add_argument("--support", type=float, required=True,
                          help="cell vote fraction needed to keep a gate, in (0, 1]")
    skeleton.add_argument("--problem", choices=("maxcut", "h2"),
                          help="override the problem tag recorded in the corpus")
    skeleton.add_argument("--graph-file", help="Max-Cut graph JSON for re-scoring")

    plot = sub.add_parser("plot", help="render training curves from a run directory")
    plot.add_argument("--run", required=True)
    plot.add_argument("--out", help="plot directory (default: RUN/plots)")
    return parser


_TRAIN_KEYS = (
    "problem", "reward", "threshold", "episodes", "trials",
    "seed", "out", "graph_file", "warm_start",
)


def _train_config(args) -> RunConfig:
    doc = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file {path} not found")
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
    for key in _TRAIN_KEYS:
        value = getattr(args, key)
        if value is not None:
            doc[key] = value
    return RunConfig.from_dict(doc)


def _cmd_train(args) -> int:
    config = _train_config(args)
    run_dir = run_training(config)
    summary = json.loads((run_dir / "summary.json").read_text())
    print(f"run directory: {run_dir}")
    if summary.get("n_episodes", 0):
        print(
            f"episodes: {summary['n_episodes']}"
            f"  successes: {summary['n_success']}"
            f"  best energy: {summary['best_energy']:.8f}"
        )
    return 0


def _cmd_baseline(args) -> int:
    report = evaluate_baseline(args.problem, args.reps, vite_config=_SCORING_VITE)
    print(dumps(report))
    return 0


def _cmd_skeleton(args) -> int:
    corpus = load_corpus(args.corpus)
    problems = {doc.get("problem") for doc in corpus}
    problem_name = args.problem
    if problem_name is None:
        if len(problems) != 1 or None in problems:
            raise ConfigError(
                "corpus does not name a single problem; pass --problem"
            )
        problem_name = problems.pop()
    config = RunConfig(problem=problem_name, graph_file=args.graph_file)
    problem = build_problem(config)
    candidates = extract_skeleton(
        corpus, args.support, problem.ham, vite_config=_SCORING_VITE
    )
    if not candidates:
        print("no cell pattern clears the support threshold")
        return 0
    for cand in candidates:
        doc = cand.grid.to_json(params=cand.vite.params)
        doc.update(
            {
                "problem": problem_name,
                "support": cand.support,
                "gate_count": cand.grid.gate_count(),
                "depth": cand.grid.depth(),
                "energy": cand.energy,
                "converged": cand.vite.converged,
                "corpus_size": len(corpus),
            }
        )
        print(dumps(doc))
    return 0


def _cmd_plot(args) -> int:
    from .plots import emit_plots

    written = emit_plots(args.run, out_dir=args.out)
    for path in written:
        print(path)
    return 0


_COMMANDS = {
    "train": _cmd_train,
    "baseline": _cmd_baseline,
    "skeleton": _cmd_skeleton,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
