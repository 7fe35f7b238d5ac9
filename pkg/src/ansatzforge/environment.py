"""The episode machinery: rewards, success thresholds, and the env loop.

An episode grows one circuit.  Every action appends a cell (or a CNOT
pair) at the cursor, the grown circuit is re-optimized by imaginary
time evolution from a fresh random start, and the converged energy
decides the outcome:

* success  - energy dropped strictly below the current threshold;
* failure  - the gate count or depth bound would be exceeded (checked
  before the optimization runs), the optimizer diverged, or the grid
  filled up without a success;
* running  - anything else.

Gate-count and depth bounds follow the search grid: at most 30 counted
gates and depth at most 10, with equality still allowed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .circuits import DEFAULT_COLS, DEFAULT_ROWS, CircuitGrid
from .errors import NumericalFailure
from .paulis import PauliHamiltonian
from .sim import plus_state
from .vite import ViteConfig, ViteResult, run_vite

log = logging.getLogger(__name__)

GATE_BOUND = 30
DEPTH_BOUND = 10

SUCCESS = "success"
FAILURE = "failure"
RUNNING = "running"


def reward_v1(
    e_prev: float,
    e_curr: float,
    gate_count: int,
    e_threshold: float,
    gate_bound: int = GATE_BOUND,
    bonus: float = 0.1,
) -> float:
    """Raw energy drop plus a sparsity bonus on success.

    The bonus fires only on a strict threshold crossing, so a step that
    lands exactly on the threshold earns nothing extra.
    """
    crossed = 1.0 if e_curr < e_threshold else 0.0
    return (e_prev - e_curr) + bonus * (gate_bound - gate_count) * crossed


def reward_v2(
    e_prev: float,
    e_curr: float,
    gate_count: int,
    e_threshold: float,
    e_bound: float,
    gate_bound: int = GATE_BOUND,
) -> float:
    """Energy drop normalized by the remaining headroom above e_bound."""
    denom = e_prev - e_bound
    if denom < 1e-12:
        log.warning(
            "reward_v2 denominator %.3e clamped; E_prev=%.6f sits at or below "
            "the spectral bound %.6f", denom, e_prev, e_bound,
        )
        denom = 1e-12
    crossed = 1.0 if e_curr < e_threshold else 0.0
    return (e_prev - e_curr) / denom + (gate_bound - gate_count) / gate_bound * crossed


class ThresholdController:
    """Success-bar bookkeeping shared by both update schemes.

    evolving: starts at 0, and after every 10th successful episode moves
    to max(E_best - margin, 0.9 * E_min).

    adaptive: starts at the reference energy plus xi0, is nudged up by
    xi every ``period`` episodes (or reset to E_best + xi if it sits
    below E_best), and after 20 consecutive successes snaps to E_best
    (or tightens by eps if already at or below it).  Never drops under
    the spectral bound.
    """

    def __init__(
        self,
        variant: str,
        e_min: float | None = None,
        e_reference: float | None = None,
        e_bound: float | None = None,
        margin: float = 0.01,
        floor_factor: float = 0.9,
        xi0: float = 0.005,
        xi: float = 0.005,
        eps: float = 0.0005,
        period: int = 200,
        run_length: int = 20,
    ):
        if variant not in ("evolving", "adaptive"):
            raise ValueError(f"unknown threshold variant {variant!r}")
        self.variant = variant
        self.e_best = np.inf
        self.success_count = 0
        self.consecutive_successes = 0
        self.episode_counter = 0
        self.margin = margin
        self.xi = xi
        self.eps = eps
        self.period = period
        self.run_length = run_length
        if variant == "evolving":
            if e_min is None:
                raise ValueError("evolving threshold needs e_min")
            self.floor = floor_factor * e_min
            self.e_threshold = 0.0
        else:
            if e_reference is None or e_bound is None:
                raise ValueError("adaptive threshold needs e_reference and e_bound")
            self.floor = e_bound
            self.e_threshold = e_reference + xi0

    def observe_energy(self, energy: float) -> None:
        if energy < self.e_best:
            self.e_best = energy

    def record_episode(self, success: bool) -> None:
        """Apply the end-of-episode update rules."""
        self.episode_counter += 1
        if success:
            self.success_count += 1
            self.consecutive_successes += 1
        else:
            self.consecutive_successes = 0
        if self.variant == "evolving":
            if success and self.success_count % 10 == 0:
                self.e_threshold = max(self.e_best - self.margin, self.floor)
            return
        if self.consecutive_successes >= self.run_length:
            if self.e_threshold < self.e_best:
                self.e_threshold = self.e_best
            else:
                self.e_threshold -= self.eps
            self.consecutive_successes = 0
            self.e_threshold = max(self.e_threshold, self.floor)
        if self.episode_counter % self.period == 0:
            if self.e_threshold < self.e_best:
                self.e_threshold += self.xi
            else:
                self.e_threshold = self.e_best + self.xi
            self.e_threshold = max(self.e_threshold, self.floor)

    def state_dict(self) -> dict:
        return {
            "variant": self.variant,
            "e_threshold": self.e_threshold,
            "e_best": self.e_best,
            "floor": self.floor,
            "success_count": self.success_count,
            "consecutive_successes": self.consecutive_successes,
            "episode_counter": self.episode_counter,
        }

    def load_state_dict(self, state: dict) -> None:
        for key in (
            "e_threshold",
            "e_best",
            "floor",
            "success_count",
            "consecutive_successes",
            "episode_counter",
        ):
            setattr(self, key, state[key])


@dataclass
class StepResult:
    grid: CircuitGrid
    reward: float
    outcome: str
    energy: float
    gate_count: int
    depth: int
    vite: Optional[ViteResult] = field(default=None, repr=False)


class CircuitEnv:
    """Stateful wrapper tying the grid, the optimizer and the threshold."""

    def __init__(
        self,
        ham: PauliHamiltonian,
        controller: ThresholdController,
        vite_config: ViteConfig = ViteConfig(),
        reward_variant: str = "v1",
        e_bound: float | None = None,
        rows: int = DEFAULT_ROWS,
        cols: int = DEFAULT_COLS,
        gate_bound: int = GATE_BOUND,
        depth_bound: int = DEPTH_BOUND,
        warm_start: bool = False,
        seed: int = 0,
    ):
        if reward_variant not in ("v1", "v2"):
            raise ValueError(f"unknown reward variant {reward_variant!r}")
        if reward_variant == "v2" and e_bound is None:
            raise ValueError("reward v2 needs the spectral bound")
        if ham.n_qubits != rows:
            raise ValueError("Hamiltonian size must match the grid rows")
        self.ham = ham
        self.controller = controller
        self.vite_config = vite_config
        self.reward_variant = reward_variant
        self.e_bound = e_bound
        self.rows = rows
        self.cols = cols
        self.gate_bound = gate_bound
        self.depth_bound = depth_bound
        self.warm_start = warm_start
        self.seed = seed
        self._initial_energy = ham.expectation(plus_state(rows))
        self.grid = CircuitGrid.empty(rows, cols)
        self.episode = 0
        self.step_index = 0
        self.e_prev = self._initial_energy
        self._params = None

    def reset(self, episode: int | None = None) -> CircuitGrid:
        """Start episode ``episode`` (defaults to the next one)."""
        self.episode = self.episode + 1 if episode is None else int(episode)
        self.step_index = 0
        self.grid = CircuitGrid.empty(self.rows, self.cols)
        self.e_prev = self._initial_energy
        self._params = None
        return self.grid

    def valid_actions(self) -> np.ndarray:
        return self.grid.valid_actions()

    def _vite_seed(self) -> int:
        seq = np.random.SeedSequence(
            (self.seed, self.episode, self.step_index)
        )
        return int(seq.generate_state(1, dtype=np.uint64)[0])

    def _reward(self, e_curr: float, gate_count: int) -> float:
        if self.reward_variant == "v1":
            return reward_v1(
                self.e_prev, e_curr, gate_count,
                self.controller.e_threshold, self.gate_bound,
            )
        return reward_v2(
            self.e_prev, e_curr, gate_count,
            self.controller.e_threshold, self.e_bound, self.gate_bound,
        )

    def step(self, action: int) -> StepResult:
        """Place one action; returns the new grid, reward and outcome."""
        self.step_index += 1
        grid = self.grid.place(action)
        gate_count = grid.gate_count()
        depth = grid.depth()
        result = None

        if gate_count > self.gate_bound or depth > self.depth_bound:
            # bound violations terminate before any optimization runs
            outcome = FAILURE
            e_curr = self.e_prev
        else:
            try:
                result = run_vite(
                    grid,
                    self.ham,
                    self.vite_config.reseeded(self._vite_seed()),
                    initial_params=self._params if self.warm_start else None,
                )
            except NumericalFailure as exc:
                log.warning("imaginary-time evolution diverged: %s", exc)
                outcome = FAILURE
                e_curr = self.e_prev
            else:
                e_curr = result.energy
                self.controller.observe_energy(e_curr)
                if e_curr < self.controller.e_threshold:
                    outcome = SUCCESS
                elif grid.is_full:
                    outcome = FAILURE
                else:
                    outcome = RUNNING

        reward = self._reward(e_curr, gate_count)
        self.grid = grid
        self.e_prev = e_curr
        self._params = result.params if result is not None else None
        if outcome != RUNNING:
            self.controller.record_episode(outcome == SUCCESS)
        return StepResult(grid, reward, outcome, e_curr, gate_count, depth, result)
