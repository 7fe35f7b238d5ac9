"""Reinforcement-learned quantum circuit design for imaginary time evolution."""

from .circuits import CircuitGrid, hardware_efficient_grid
from .environment import CircuitEnv, ThresholdController, reward_v1, reward_v2
from .errors import ConfigError, NumericalFailure
from .hamiltonians import (
    Graph,
    e_bound,
    h2_hamiltonian,
    h2_spec,
    maxcut_hamiltonian,
    path_graph,
)
from .paulis import PauliHamiltonian
from .sim import exact_ite, plus_state, run_circuit, state_and_tangents, zero_state
from .skeleton import extract_skeleton, load_corpus
from .training import RunConfig, evaluate_baseline, run_training
from .vite import ViteConfig, ViteResult, run_vite

__version__ = "0.1.0"

__all__ = [
    "CircuitEnv",
    "CircuitGrid",
    "ConfigError",
    "Graph",
    "NumericalFailure",
    "PauliHamiltonian",
    "RunConfig",
    "ThresholdController",
    "ViteConfig",
    "ViteResult",
    "__version__",
    "e_bound",
    "evaluate_baseline",
    "exact_ite",
    "extract_skeleton",
    "h2_hamiltonian",
    "h2_spec",
    "hardware_efficient_grid",
    "load_corpus",
    "maxcut_hamiltonian",
    "path_graph",
    "plus_state",
    "reward_v1",
    "reward_v2",
    "run_circuit",
    "run_training",
    "run_vite",
    "state_and_tangents",
    "zero_state",
]
