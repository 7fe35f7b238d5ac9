"""Weighted sums of Pauli strings on a small register.

States are plain complex ndarrays of length 2**n.  Qubit 0 lives in the
least significant bit of the basis index, so ``state[5]`` is the
amplitude of qubit 0 = 1, qubit 1 = 0, qubit 2 = 1.  A Pauli string is
written left to right in qubit order: ``"XZII"`` applies X to qubit 0
and Z to qubit 1 of a four-qubit register.
"""

from __future__ import annotations

import numpy as np

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_HERMITIAN_TOL = 1e-10


def _string_action(string: str, n: int):
    """Precompute the basis permutation and phases of one Pauli string.

    For a string P the matrix element <y|P|x> is nonzero only for
    y = x ^ flip, where flip has a bit set wherever P holds X or Y.
    The returned arrays satisfy (P psi)[i] = phase[i ^ flip] * psi[i ^ flip].
    """
    dim = 1 << n
    idx = np.arange(dim)
    flip = 0
    phase = np.ones(dim, dtype=complex)
    for qubit, op in enumerate(string):
        bit = (idx >> qubit) & 1
        if op == "X":
            flip |= 1 << qubit
        elif op == "Y":
            flip |= 1 << qubit
            phase = phase * (1j * (1.0 - 2.0 * bit))
        elif op == "Z":
            phase = phase * (1.0 - 2.0 * bit)
    return idx ^ flip, phase


class PauliHamiltonian:
    """A Hermitian operator sum(coeff * pauli_string).

    Parameters
    ----------
    terms : iterable of (float, str)
        Real coefficients and Pauli strings of equal length.  Duplicate
        strings are merged; terms that cancel exactly are dropped.
    n_qubits : int, optional
        Register size.  Required only when ``terms`` is empty (the zero
        Hamiltonian); otherwise inferred from the strings.
    """

    def __init__(self, terms, n_qubits: int | None = None):
        merged: dict[str, float] = {}
        for coeff, string in terms:
            if isinstance(coeff, complex):
                if abs(coeff.imag) > _HERMITIAN_TOL:
                    raise ValueError(f"coefficient {coeff} is not real")
                coeff = coeff.real
            coeff = float(coeff)
            if not isinstance(string, str) or not string:
                raise ValueError(f"bad Pauli string {string!r}")
            if any(ch not in PAULI for ch in string):
                raise ValueError(f"bad Pauli string {string!r}")
            if n_qubits is None:
                n_qubits = len(string)
            if len(string) != n_qubits:
                raise ValueError(
                    f"string {string!r} has length {len(string)}, expected {n_qubits}"
                )
            merged[string] = merged.get(string, 0.0) + coeff
        if n_qubits is None:
            raise ValueError("empty Hamiltonian needs an explicit n_qubits")
        self._n = int(n_qubits)
        self._terms = tuple(
            (c, s) for s, c in merged.items() if c != 0.0
        )
        self._matrix = None
        self._actions = None

    @property
    def n_qubits(self) -> int:
        return self._n

    @property
    def terms(self) -> tuple[tuple[float, str], ...]:
        return self._terms

    @property
    def dim(self) -> int:
        return 1 << self._n

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        body = " + ".join(f"{c:g}*{s}" for c, s in self._terms[:4])
        if len(self._terms) > 4:
            body += f" + ... ({len(self._terms)} terms)"
        return f"PauliHamiltonian({body or '0'}, n_qubits={self._n})"

    def __add__(self, other: "PauliHamiltonian") -> "PauliHamiltonian":
        if not isinstance(other, PauliHamiltonian):
            return NotImplemented
        if other._n != self._n:
            raise ValueError("qubit counts differ")
        return PauliHamiltonian(
            list(self._terms) + list(other._terms), n_qubits=self._n
        )

    def __mul__(self, scalar) -> "PauliHamiltonian":
        scalar = float(scalar)
        return PauliHamiltonian(
            [(scalar * c, s) for c, s in self._terms], n_qubits=self._n
        )

    __rmul__ = __mul__

    # ------------------------------------------------------------------

    def _term_actions(self):
        if self._actions is None:
            self._actions = [
                (c,) + _string_action(s, self._n) for c, s in self._terms
            ]
        return self._actions

    def apply(self, state: np.ndarray) -> np.ndarray:
        """Return H|state> without building the dense matrix."""
        state = np.asarray(state, dtype=complex)
        if state.shape != (self.dim,):
            raise ValueError(f"state has shape {state.shape}, expected ({self.dim},)")
        out = np.zeros_like(state)
        for coeff, perm, phase in self._term_actions():
            out += coeff * (phase * state)[perm]
        return out

    def expectation(self, state: np.ndarray) -> float:
        """<state|H|state> for a normalized state, as a real number."""
        state = np.asarray(state, dtype=complex)
        norm = np.linalg.norm(state)
        if not np.isclose(norm, 1.0, atol=1e-9):
            raise ValueError(f"state norm {norm} is not 1")
        value = np.vdot(state, self.apply(state))
        if abs(value.imag) > _HERMITIAN_TOL:
            raise ValueError(f"expectation has imaginary residue {value.imag}")
        return float(value.real)

    def matrix(self) -> np.ndarray:
        """Dense 2**n x 2**n matrix, cached after the first call."""
        if self._matrix is None:
            if self._n > 10:
                raise ValueError("dense matrix limited to 10 qubits")
            mat = np.zeros((self.dim, self.dim), dtype=complex)
            for coeff, string in self._terms:
                term = np.ones((1, 1), dtype=complex)
                # qubit 0 is the least significant bit, so it sits last
                # in the kron chain
                for op in reversed(string):
                    term = np.kron(term, PAULI[op])
                mat += coeff * term
            self._matrix = mat
        return self._matrix

    def ground_state(self) -> tuple[float, np.ndarray]:
        """Lowest eigenvalue and a matching unit eigenvector."""
        if len(self._terms) == 0:
            vec = np.zeros(self.dim, dtype=complex)
            vec[0] = 1.0
            return 0.0, vec
        vals, vecs = np.linalg.eigh(self.matrix())
        return float(vals[0]), np.ascontiguousarray(vecs[:, 0])
