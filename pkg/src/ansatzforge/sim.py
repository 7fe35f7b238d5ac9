"""Dense statevector simulation of grid circuits.

Everything here works on plain complex ndarrays of length 2**n with
qubit 0 in the least significant bit (see :mod:`ansatzforge.paulis`).
Rotation gates follow the half-angle convention

    R_s(theta) = exp(-i * theta * sigma / 2),

so the derivative of a circuit state with respect to one angle is the
same circuit with an extra -i/2 * sigma inserted right after that gate.
"""

from __future__ import annotations

import numpy as np

from .circuits import CTRL, RX, RY, RZ, CircuitGrid
from .paulis import PAULI, PauliHamiltonian

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
H_GATE = np.array([[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]], dtype=complex)

_GENERATOR = {RX: PAULI["X"], RY: PAULI["Y"], RZ: PAULI["Z"]}


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    phase = np.exp(-0.5j * theta)
    return np.array([[phase, 0.0], [0.0, np.conj(phase)]])


_ROTATION_GATES = {RX: rx, RY: ry, RZ: rz}


def zero_state(n: int) -> np.ndarray:
    state = np.zeros(1 << n, dtype=complex)
    state[0] = 1.0
    return state


def plus_state(n: int) -> np.ndarray:
    return np.full(1 << n, (0.5 ** (n / 2.0)) + 0.0j)


def apply_single(state: np.ndarray, mat: np.ndarray, qubit: int) -> np.ndarray:
    """Apply a 2x2 matrix to one qubit of a state (or a stack of states).

    ``state`` may be shaped (dim,) or (batch, dim); the qubit axis is
    addressed through a reshape, so nothing is ever copied twice.
    """
    single = state.ndim == 1
    batch = state.reshape(1, -1) if single else state
    m, dim = batch.shape
    low = 1 << qubit
    high = dim // (2 * low)
    view = batch.reshape(m, high, 2, low)
    out = np.einsum("ij,ahjl->ahil", mat, view).reshape(m, dim)
    return out[0] if single else out


def apply_cnot(state: np.ndarray, control: int, target: int) -> np.ndarray:
    """CNOT as a basis permutation; works on (dim,) or (batch, dim)."""
    dim = state.shape[-1]
    idx = np.arange(dim)
    perm = idx ^ (((idx >> control) & 1) << target)
    return state[..., perm]


# ----------------------------------------------------------------------
# grid execution


def _start_state(n: int, hadamard_layer: bool) -> np.ndarray:
    return plus_state(n) if hadamard_layer else zero_state(n)


def _check_params(grid: CircuitGrid, params) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    if params.shape != (grid.n_rotations(),):
        raise ValueError(
            f"{params.size} params for {grid.n_rotations()} rotation gates"
        )
    return params


def run_circuit(
    grid: CircuitGrid, params, hadamard_layer: bool = True
) -> np.ndarray:
    """Execute a grid: optional H on every qubit, then the cells in
    column-major order.  ``params`` holds one angle per rotation gate in
    that same order."""
    params = _check_params(grid, params)
    state = _start_state(grid.rows, hadamard_layer)
    k = 0
    for code, row in grid.operations():
        if code == CTRL:
            state = apply_cnot(state, row, row + 1)
        else:
            state = apply_single(state, _ROTATION_GATES[code](params[k]), row)
            k += 1
    return state


def state_and_tangents(
    grid: CircuitGrid, params, hadamard_layer: bool = True
) -> tuple[np.ndarray, np.ndarray]:
    """Final state plus all angle derivatives in a single sweep.

    Returns ``(state, tangents)`` where ``tangents[i]`` is the exact
    derivative of the state with respect to angle i.  Each derivative is
    seeded as -i/2 * sigma applied right after its own gate and then
    dragged through the rest of the circuit together with the state, so
    the whole bundle costs one pass over the gates.
    """
    params = _check_params(grid, params)
    n_rot = params.size
    state = _start_state(grid.rows, hadamard_layer)
    tangents = np.zeros((n_rot, state.size), dtype=complex)
    k = 0
    for code, row in grid.operations():
        if code == CTRL:
            if k:
                tangents[:k] = apply_cnot(tangents[:k], row, row + 1)
            state = apply_cnot(state, row, row + 1)
        else:
            gate = _ROTATION_GATES[code](params[k])
            if k:
                tangents[:k] = apply_single(tangents[:k], gate, row)
            state = apply_single(state, gate, row)
            tangents[k] = apply_single(state, -0.5j * _GENERATOR[code], row)
            k += 1
    return state, tangents


def derivative_state(
    grid: CircuitGrid, params, index: int, hadamard_layer: bool = True
) -> np.ndarray:
    """d/d theta_index of the circuit state (unnormalized tangent vector)."""
    params = _check_params(grid, params)
    if not 0 <= index < params.size:
        raise ValueError(
            f"rotation index {index} out of range for {params.size} rotation gates"
        )
    _, tangents = state_and_tangents(grid, params, hadamard_layer)
    return tangents[index]


# ----------------------------------------------------------------------
# exact imaginary-time reference


def exact_ite(ham: PauliHamiltonian, initial: np.ndarray, tau: float) -> np.ndarray:
    """Normalized exp(-H tau)|initial> through full diagonalization.

    The spectrum is shifted by its minimum before exponentiating, which
    leaves the normalized state untouched and keeps large tau finite.
    """
    if tau < 0:
        raise ValueError("tau must be >= 0")
    initial = np.asarray(initial, dtype=complex)
    if initial.shape != (ham.dim,):
        raise ValueError(f"state has shape {initial.shape}, expected ({ham.dim},)")
    norm = np.linalg.norm(initial)
    if norm < 1e-12:
        raise ValueError("initial state has zero norm")
    vals, vecs = np.linalg.eigh(ham.matrix())
    coeffs = vecs.conj().T @ (initial / norm)
    coeffs = coeffs * np.exp(-(vals - vals[0]) * tau)
    out_norm = np.linalg.norm(coeffs)
    if not np.isfinite(out_norm) or out_norm < 1e-300:
        raise ValueError("imaginary-time propagation lost all weight")
    return vecs @ (coeffs / out_norm)
