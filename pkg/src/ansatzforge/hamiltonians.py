"""Problem Hamiltonians: weighted Max-Cut instances and the packaged H2.

The H2 coefficients live in ``data/h2_bk_sto3g.json`` (STO-3G at
0.735 angstrom, Bravyi-Kitaev encoded, four qubits).  They were frozen
once from an independent integrals-and-SCF calculation; the loader only
verifies the checksum and re-derives the sanity energies.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import ConfigError
from .paulis import PauliHamiltonian

_H2_RESOURCE = "h2_bk_sto3g.json"


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph with vertices 0..n_vertices-1."""

    n_vertices: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if self.n_vertices < 1:
            raise ValueError("graph needs at least one vertex")
        seen = set()
        normalized = []
        for edge in self.edges:
            u, v, w = edge
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValueError(f"edge ({u},{v}) out of range")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            normalized.append((u, v, w))
        object.__setattr__(self, "edges", tuple(normalized))

    @classmethod
    def from_dict(cls, doc: dict) -> "Graph":
        try:
            return cls(int(doc["n"]), tuple(tuple(e) for e in doc["edges"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad graph document: {exc}") from exc

    @classmethod
    def from_file(cls, path) -> "Graph":
        try:
            doc = json.loads(open(path).read())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read graph file {path}: {exc}") from exc
        return cls.from_dict(doc)


def path_graph(n: int = 4) -> Graph:
    """The default Max-Cut instance: a unit-weight path 0-1-...-(n-1)."""
    return Graph(n, tuple((k, k + 1, 1.0) for k in range(n - 1)))


def maxcut_hamiltonian(graph: Graph) -> PauliHamiltonian:
    """sum over edges of w * Z_u Z_v on n_vertices qubits.

    Cutting an edge makes its term -w, so the ground energy is
    (total weight) - 2 * (max cut value).
    """
    terms = []
    for u, v, w in graph.edges:
        label = ["I"] * graph.n_vertices
        label[u] = "Z"
        label[v] = "Z"
        terms.append((w, "".join(label)))
    return PauliHamiltonian(terms, n_qubits=graph.n_vertices)


def e_bound(ham: PauliHamiltonian) -> float:
    """-sum of |coefficients|: a certified lower bound on the spectrum."""
    return -float(sum(abs(c) for c, _ in ham.terms))


def best_basis_state(ham: PauliHamiltonian) -> tuple[float, int]:
    """Lowest-energy computational basis state (energy, basis index).

    For the packaged H2 this recovers the Hartree-Fock reference, since
    the occupation encoding maps Slater determinants to basis states.
    """
    diag = np.real(np.diag(ham.matrix()))
    idx = int(np.argmin(diag))
    return float(diag[idx]), idx


@dataclass(frozen=True)
class MoleculeSpec:
    """A frozen molecular problem: qubit terms plus reference energies."""

    name: str
    hamiltonian: PauliHamiltonian
    e_hf: float
    e_fci: float
    metadata: dict = field(default_factory=dict)


def h2_spec() -> MoleculeSpec:
    """Load and verify the packaged H2 Hamiltonian."""
    try:
        raw = (
            resources.files("ansatzforge") / "data" / _H2_RESOURCE
        ).read_text()
    except (FileNotFoundError, OSError) as exc:
        raise ConfigError(f"missing H2 data file {_H2_RESOURCE}: {exc}") from exc
    try:
        doc = json.loads(raw)
        terms = [(float(c), str(s)) for c, s in doc["terms"]]
        stated = doc["sha256"]
        reference = doc["reference"]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"corrupt H2 data file: {exc}") from exc
    blob = json.dumps(doc["terms"], separators=(",", ":")).encode()
    digest = hashlib.sha256(blob).hexdigest()
    if digest != stated:
        raise ConfigError(
            f"H2 data checksum mismatch: file says {stated}, computed {digest}"
        )
    ham = PauliHamiltonian(terms, n_qubits=int(doc["n_qubits"]))
    e_hf, _ = best_basis_state(ham)
    e_fci, _ = ham.ground_state()
    if abs(e_fci - reference["e_fci"]) > 1e-9 or abs(e_hf - reference["e_hf"]) > 1e-9:
        raise ConfigError("H2 data file disagrees with its own reference energies")
    meta = {k: doc[k] for k in ("geometry", "basis", "mapping", "sha256")}
    return MoleculeSpec("h2", ham, e_hf=e_hf, e_fci=e_fci, metadata=meta)


def h2_hamiltonian() -> PauliHamiltonian:
    return h2_spec().hamiltonian
