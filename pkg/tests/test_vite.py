"""McLachlan system and imaginary-time descent.

The one-parameter oracle: a single Ry(theta) after the Hadamard layer
on one qubit, with H = Z.  The state is Ry(theta)|+>, so

    E(theta) = -sin(theta),
    A = [[1/4]]            (the tangent is -i/2 Y |phi>, unit norm),
    C = [cos(theta) / 2]   (= -dE/dtheta / 2).

Everything below is checked against these closed forms or against
central finite differences.
"""

import numpy as np
import pytest

from ansatzforge.circuits import (
    ACTION_CNOT,
    ACTION_RX,
    ACTION_RY,
    ACTION_RZ,
    CircuitGrid,
)
from ansatzforge.errors import NumericalFailure
from ansatzforge.paulis import PauliHamiltonian
from ansatzforge.vite import ViteConfig, build_a, build_c, run_vite, vite_step


def single_ry_grid():
    return CircuitGrid.empty(rows=1, cols=1).place(ACTION_RY)


def four_ry_grid():
    grid = CircuitGrid.empty()
    for _ in range(4):
        grid = grid.place(ACTION_RY)
    return grid


Z1 = PauliHamiltonian([(1.0, "Z")])


def test_one_parameter_metric_is_a_quarter():
    for theta in (-1.2, 0.0, 0.7, 2.9):
        a = build_a(single_ry_grid(), [theta])
        assert a.shape == (1, 1)
        assert a[0, 0] == pytest.approx(0.25, abs=1e-12)


def test_one_parameter_drive_is_half_cosine():
    for theta in (-1.2, 0.0, 0.7, 2.9):
        c = build_c(single_ry_grid(), [theta], Z1)
        assert c[0] == pytest.approx(np.cos(theta) / 2.0, abs=1e-12)


def test_one_euler_step_follows_the_closed_form():
    theta = 0.3
    config = ViteConfig()
    a = build_a(single_ry_grid(), [theta])
    c = build_c(single_ry_grid(), [theta], Z1)
    stepped = vite_step(np.array([theta]), a, c, config)
    velocity = (np.cos(theta) / 2.0) / (0.25 + config.ridge)
    assert stepped[0] == pytest.approx(theta + 0.1 * velocity, abs=1e-12)


def test_descent_reaches_the_single_qubit_ground_state():
    # ground state of Z reachable at theta = pi/2 where E = -1
    result = run_vite(single_ry_grid(), Z1, ViteConfig(seed=3))
    assert result.converged
    assert result.energy == pytest.approx(-1.0, abs=1e-6)
    assert result.trace[0] > result.energy


def test_metric_matches_finite_difference_overlaps(rng):
    from ansatzforge.sim import run_circuit

    grid = CircuitGrid.empty()
    for action in (ACTION_RY, ACTION_RX, ACTION_RZ, ACTION_RY, ACTION_CNOT,
                   ACTION_RX, ACTION_RZ):
        grid = grid.place(action)
    params = rng.uniform(-np.pi, np.pi, size=grid.n_rotations())
    h = 1e-6

    def state(p):
        return run_circuit(grid, p)

    n = len(params)
    numeric = np.zeros((n, 2 ** 4), dtype=complex)
    for i in range(n):
        up, down = params.copy(), params.copy()
        up[i] += h
        down[i] -= h
        numeric[i] = (state(up) - state(down)) / (2 * h)
    expected = np.real(numeric.conj() @ numeric.T)
    assert np.allclose(build_a(grid, params), expected, atol=1e-6)


def test_drive_is_half_the_negative_energy_gradient(maxcut, rng):
    from ansatzforge.sim import run_circuit

    grid = four_ry_grid().place(ACTION_CNOT).place(ACTION_CNOT)
    params = rng.uniform(-np.pi, np.pi, size=4)
    h = 1e-6
    grad = np.zeros(4)
    for i in range(4):
        up, down = params.copy(), params.copy()
        up[i] += h
        down[i] -= h
        grad[i] = (
            maxcut.expectation(run_circuit(grid, up))
            - maxcut.expectation(run_circuit(grid, down))
        ) / (2 * h)
    assert np.allclose(build_c(grid, params, maxcut), -grad / 2.0, atol=1e-6)


def test_four_ry_column_solves_the_path_cut(maxcut):
    result = run_vite(four_ry_grid(), maxcut, ViteConfig(seed=0))
    assert result.converged
    assert result.energy == pytest.approx(-3.0, abs=1e-3)


def test_rotationless_grid_returns_the_start_energy(maxcut):
    grid = CircuitGrid.empty().place(ACTION_CNOT)
    result = run_vite(grid, maxcut)
    assert result.converged
    assert result.steps == 0
    assert result.params.size == 0
    assert result.trace.tolist() == [pytest.approx(0.0, abs=1e-12)]


def test_trace_energy_belongs_to_the_returned_params(maxcut):
    result = run_vite(four_ry_grid(), maxcut, ViteConfig(seed=4, max_steps=37))
    from ansatzforge.sim import run_circuit

    replayed = maxcut.expectation(run_circuit(four_ry_grid(), result.params))
    assert replayed == pytest.approx(result.energy, abs=1e-12)
    assert len(result.trace) == result.steps + 1


def test_seeded_inits_are_reproducible(maxcut):
    a = run_vite(four_ry_grid(), maxcut, ViteConfig(seed=9, max_steps=5))
    b = run_vite(four_ry_grid(), maxcut, ViteConfig(seed=9, max_steps=5))
    c = run_vite(four_ry_grid(), maxcut, ViteConfig(seed=10, max_steps=5))
    assert np.array_equal(a.params, b.params)
    assert not np.array_equal(a.params, c.params)


def test_initial_params_override_the_prefix(maxcut):
    config = ViteConfig(seed=9, max_steps=0)
    plain = run_vite(four_ry_grid(), maxcut, config)
    warmed = run_vite(four_ry_grid(), maxcut, config, initial_params=[1.0, -1.0])
    assert warmed.params[0] == 1.0
    assert warmed.params[1] == -1.0
    assert np.array_equal(warmed.params[2:], plain.params[2:])
    with pytest.raises(ValueError, match="initial params"):
        run_vite(four_ry_grid(), maxcut, config, initial_params=np.ones(5))


def test_qubit_count_mismatch_is_rejected(maxcut):
    with pytest.raises(ValueError, match="qubits"):
        run_vite(single_ry_grid(), maxcut)


def test_divergent_start_raises_with_partial_trace(maxcut):
    with pytest.raises(NumericalFailure) as info:
        run_vite(
            four_ry_grid(), maxcut, ViteConfig(seed=0),
            initial_params=[np.nan, 0.0, 0.0, 0.0],
        )
    assert info.value.trace is not None
    assert len(info.value.trace) == 0


def test_loose_tolerance_converges_after_one_step(maxcut):
    result = run_vite(four_ry_grid(), maxcut, ViteConfig(energy_tol=1e3))
    assert result.converged
    assert result.steps == 1


def test_max_steps_zero_reports_the_initial_energy_only(maxcut):
    result = run_vite(four_ry_grid(), maxcut, ViteConfig(seed=2, max_steps=0))
    assert not result.converged
    assert result.steps == 0
    assert len(result.trace) == 1


def test_singular_system_falls_back_to_least_squares():
    # A + ridge*I exactly singular: solve fails, lstsq returns the
    # minimum-norm (zero) velocity and the step keeps the params
    config = ViteConfig()
    a = np.array([[-config.ridge]])
    stepped = vite_step(np.array([0.4]), a, np.array([0.0]), config)
    assert stepped[0] == pytest.approx(0.4)
    assert np.isfinite(stepped).all()


def test_reseeded_copies_everything_else():
    config = ViteConfig(delta_tau=0.05, max_steps=77)
    other = config.reseeded(123)
    assert other.seed == 123
    assert other.delta_tau == 0.05
    assert other.max_steps == 77
