"""The run harness: configuration, the episode loop, logging, baselines.

A run directory looks like

    run_config.json        the resolved configuration
    episodes.csv           one row per (trial, episode)
    summary.json           aggregates and reference energies
    trial_000/
        checkpoint.npz     agent + controller + rng state, resumable
        circuits/          every successful circuit as JSON

Runs are deterministic for a fixed config: the run seed spawns one
stream per trial, the optimizer inits derive statelessly from
(seed, trial, episode, step), and everything executes single threaded.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .agent import AgentConfig, DdqnAgent
from .circuits import DEFAULT_COLS, DEFAULT_ROWS, CircuitGrid, hardware_efficient_grid
from .environment import (
    FAILURE,
    RUNNING,
    SUCCESS,
    CircuitEnv,
    ThresholdController,
)
from .errors import ConfigError
from .hamiltonians import (
    Graph,
    best_basis_state,
    e_bound,
    h2_spec,
    maxcut_hamiltonian,
    path_graph,
)
from .paulis import PauliHamiltonian
from .serialize import dump_json, format_float
from .sim import plus_state
from .vite import ViteConfig, run_vite

OUTPUT_ROOT_ENV = "ANSATZFORGE_OUT"

EPISODE_FIELDS = (
    "trial",
    "episode",
    "outcome",
    "steps",
    "final_energy",
    "gate_count",
    "depth",
    "cumulative_reward",
    "e_threshold",
    "e_best",
    "epsilon_end",
)

_FLOAT_FIELDS = {"final_energy", "cumulative_reward", "e_threshold", "e_best", "epsilon_end"}

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    problem: str = "maxcut"
    reward: str = "v1"
    threshold: str = "evolving"
    episodes: int = 150
    trials: int = 1
    seed: int = 0
    out: str | None = None
    graph_file: str | None = None
    warm_start: bool = False
    agent: AgentConfig = field(default_factory=AgentConfig)
    vite: ViteConfig = field(default_factory=ViteConfig)

    def __post_init__(self):
        if self.problem not in ("maxcut", "h2"):
            raise ConfigError(f"unknown problem {self.problem!r}")
        if self.reward not in ("v1", "v2"):
            raise ConfigError(f"unknown reward variant {self.reward!r}")
        if self.threshold not in ("evolving", "adaptive"):
            raise ConfigError(f"unknown threshold variant {self.threshold!r}")
        if self.episodes < 0:
            raise ConfigError("episodes must be non-negative")
        if self.trials < 1:
            raise ConfigError("trials must be positive")

    def to_dict(self) -> dict:
        doc = dataclasses.asdict(self)
        doc["agent"]["hidden"] = list(doc["agent"]["hidden"])
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        doc = dict(doc)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            if "agent" in doc and isinstance(doc["agent"], dict):
                agent = dict(doc["agent"])
                if "hidden" in agent:
                    agent["hidden"] = tuple(agent["hidden"])
                doc["agent"] = AgentConfig(**agent)
            if "vite" in doc and isinstance(doc["vite"], dict):
                doc["vite"] = ViteConfig(**doc["vite"])
            return cls(**doc)
        except TypeError as exc:
            raise ConfigError(f"bad config value: {exc}") from exc


@dataclass(frozen=True)
class Problem:
    name: str
    ham: PauliHamiltonian
    e_min: float
    e_bound: float
    e_reference: float
    references: dict


def build_problem(config: RunConfig) -> Problem:
    """Resolve the Hamiltonian plus every energy scale the run needs.

    The adaptive threshold starts from a reference energy: for H2 that
    is the Hartree-Fock basis state, for Max-Cut the energy of the
    uniform-superposition start state (which plays the same role of
    "best undressed guess").
    """
    if config.problem == "maxcut":
        graph = (
            Graph.from_file(config.graph_file) if config.graph_file else path_graph()
        )
        ham = maxcut_hamiltonian(graph)
        if ham.n_qubits != DEFAULT_ROWS:
            raise ConfigError(
                f"the search grid has {DEFAULT_ROWS} qubits; graph has {ham.n_qubits}"
            )
        e_min, _ = ham.ground_state()
        reference = ham.expectation(plus_state(ham.n_qubits))
        refs = {"e_min": e_min, "e_bound": e_bound(ham)}
    else:
        spec = h2_spec()
        ham = spec.hamiltonian
        e_min = spec.e_fci
        reference, _ = best_basis_state(ham)
        refs = {
            "e_min": e_min,
            "e_bound": e_bound(ham),
            "e_hf": spec.e_hf,
            "e_fci": spec.e_fci,
        }
    return Problem(config.problem, ham, e_min, e_bound(ham), reference, refs)


def make_controller(config: RunConfig, problem: Problem) -> ThresholdController:
    if config.threshold == "evolving":
        return ThresholdController("evolving", e_min=problem.e_min)
    return ThresholdController(
        "adaptive", e_reference=problem.e_reference, e_bound=problem.e_bound
    )


def resolve_run_dir(config: RunConfig) -> Path:
    if config.out:
        return Path(config.out)
    root = Path(os.environ.get(OUTPUT_ROOT_ENV, "runs"))
    name = f"{config.problem}_{config.reward}_{config.threshold}_seed{config.seed}"
    return root / name


def _row_text(record: dict) -> list[str]:
    row = []
    for name in EPISODE_FIELDS:
        value = record[name]
        row.append(format_float(value) if name in _FLOAT_FIELDS else str(value))
    return row


def _trial_dir(run_dir: Path, trial: int) -> Path:
    return run_dir / f"trial_{trial:03d}"


def save_checkpoint(path: Path, agent: DdqnAgent, controller, env, next_episode: int) -> None:
    meta = {
        "version": CHECKPOINT_VERSION,
        "agent": agent.state_meta(),
        "controller": controller.state_dict(),
        "next_episode": next_episode,
        "env_seed": env.seed,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    arrays = agent.state_arrays()
    arrays["meta_json"] = np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8)
    with open(path, "wb") as fh:
        np.savez_compressed(fh, **arrays)


def load_checkpoint(path: Path, agent: DdqnAgent, controller) -> int:
    """Restore agent and controller in place; returns the next episode."""
    with np.load(path) as data:
        meta = json.loads(bytes(data["meta_json"]).decode())
        if meta.get("version") != CHECKPOINT_VERSION:
            raise ConfigError(f"unsupported checkpoint version in {path}")
        arrays = {k: data[k] for k in data.files if k != "meta_json"}
    agent.restore(arrays, meta["agent"])
    controller.load_state_dict(meta["controller"])
    return int(meta["next_episode"])


def _circuit_doc(problem, trial, episode, step_result) -> dict:
    doc = step_result.grid.to_json(params=step_result.vite.params)
    doc.update(
        {
            "problem": problem.name,
            "trial": trial,
            "episode": episode,
            "energy": step_result.energy,
            "gate_count": step_result.gate_count,
            "depth": step_result.depth,
        }
    )
    return doc


def run_trial(
    config: RunConfig,
    problem: Problem,
    trial: int,
    run_dir: Path,
    csv_writer,
    start_episode: int = 1,
    agent: DdqnAgent | None = None,
    controller: ThresholdController | None = None,
) -> list[dict]:
    """Run (or resume) one trial; returns its episode records."""
    trial_seed_root = np.random.SeedSequence((config.seed, trial))
    agent_seed = int(trial_seed_root.generate_state(1, dtype=np.uint64)[0])
    if agent is None:
        agent = DdqnAgent(DEFAULT_ROWS * DEFAULT_COLS, config.agent, seed=agent_seed)
    if controller is None:
        controller = make_controller(config, problem)
    env = CircuitEnv(
        problem.ham,
        controller,
        vite_config=config.vite,
        reward_variant=config.reward,
        e_bound=problem.e_bound,
        warm_start=config.warm_start,
        seed=int(np.random.SeedSequence((config.seed, trial, 0xE52)).generate_state(1)[0]),
    )
    circuits_dir = _trial_dir(run_dir, trial) / "circuits"
    records = []
    for episode in range(start_episode, config.episodes + 1):
        grid = env.reset(episode)
        state = grid.encode()
        threshold_at_start = controller.e_threshold
        cumulative = 0.0
        eps = 1.0
        step = 0
        final = None
        while True:
            step += 1
            mask = grid.valid_actions()
            action, eps = agent.act(state, mask, episode, step)
            result = env.step(action)
            next_state = result.grid.encode()
            done = result.outcome != RUNNING
            agent.remember(
                state, action, result.reward, next_state, done,
                result.grid.valid_actions(),
            )
            cumulative += result.reward
            grid, state = result.grid, next_state
            if done:
                final = result
                break
        agent.finish_episode(episode)
        record = {
            "trial": trial,
            "episode": episode,
            "outcome": final.outcome,
            "steps": step,
            "final_energy": final.energy,
            "gate_count": final.gate_count,
            "depth": final.depth,
            "cumulative_reward": cumulative,
            "e_threshold": threshold_at_start,
            "e_best": controller.e_best,
            "epsilon_end": eps,
        }
        records.append(record)
        if csv_writer is not None:
            csv_writer.writerow(_row_text(record))
        if final.outcome == SUCCESS and final.vite is not None:
            dump_json(
                _circuit_doc(problem, trial, episode, final),
                circuits_dir / f"episode_{episode:05d}.json",
            )
    save_checkpoint(
        _trial_dir(run_dir, trial) / "checkpoint.npz",
        agent, controller, env, config.episodes + 1,
    )
    return records


def summarize(config: RunConfig, problem: Problem, records: list[dict]) -> dict:
    summary = {
        "problem": problem.name,
        "reward": config.reward,
        "threshold": config.threshold,
        "trials": config.trials,
        "episodes_per_trial": config.episodes,
        "n_episodes": len(records),
        "references": problem.references,
    }
    if not records:
        return summary
    successes = [r for r in records if r["outcome"] == SUCCESS]
    per_episode = {}
    for r in records:
        per_episode.setdefault(r["episode"], []).append(r["gate_count"])
    episodes = sorted(per_episode)
    head = [g for e in episodes[:20] for g in per_episode[e]]
    tail = [g for e in episodes[-20:] for g in per_episode[e]]
    best = min(records, key=lambda r: r["final_energy"])
    compact = [
        r for r in successes if r["gate_count"] <= 12 and r["depth"] <= 5
    ]
    summary.update(
        {
            "n_success": len(successes),
            "success_rate": len(successes) / len(records),
            "best_energy": best["final_energy"],
            "best_episode": {
                k: best[k] for k in ("trial", "episode", "gate_count", "depth")
            },
            "mean_gates_first20": float(np.mean(head)),
            "mean_gates_last20": float(np.mean(tail)),
            "n_compact_successes": len(compact),
        }
    )
    return summary


def run_training(config: RunConfig) -> Path:
    problem = build_problem(config)
    run_dir = resolve_run_dir(config)
    run_dir.mkdir(parents=True, exist_ok=True)
    dump_json(config.to_dict(), run_dir / "run_config.json")

    records = []
    with open(run_dir / "episodes.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(EPISODE_FIELDS)
        for trial in range(config.trials):
            records.extend(
                run_trial(config, problem, trial, run_dir, writer)
            )
            fh.flush()
    dump_json(summarize(config, problem, records), run_dir / "summary.json")
    return run_dir


# ----------------------------------------------------------------------
# reference ansatz evaluation


def evaluate_baseline(
    problem_name: str, reps: int, vite_config: ViteConfig | None = None
) -> dict:
    """Score the hardware-efficient ansatz against a problem.

    Uses a longer, tighter descent than the training loop so the
    reported energy reflects the ansatz, not the stopping rule.
    """
    if problem_name not in ("maxcut", "h2"):
        raise ConfigError(f"unknown problem {problem_name!r}")
    if reps not in (1, 2):
        raise ConfigError("reps must be 1 or 2")
    config = RunConfig(problem=problem_name)
    problem = build_problem(config)
    grid = hardware_efficient_grid(reps)
    cfg = vite_config or ViteConfig(max_steps=2000, energy_tol=1e-10, seed=11)
    result = run_vite(grid, problem.ham, cfg)
    report = {
        "problem": problem_name,
        "reps": reps,
        "gate_count": grid.gate_count(),
        "depth": grid.depth(),
        "energy": result.energy,
        "converged": result.converged,
        "steps": result.steps,
        "references": problem.references,
    }
    report["gap_to_ground"] = result.energy - problem.e_min
    return report
