"""Consensus skeletons from a corpus of successful circuits.

Circuits found by independent trials tend to share a recurring core.
This module votes cell by cell: a cell makes it into the skeleton when
its most common non-empty code appears in at least ``support`` of the
corpus.  The surviving cells are compacted into a fresh, structurally
valid grid and re-scored by imaginary-time evolution, so a candidate is
always something the environment itself could have produced.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .circuits import CTRL, EMPTY, IDLE, ROTATIONS, TGT, CircuitGrid
from .errors import ConfigError
from .paulis import PauliHamiltonian
from .vite import ViteConfig, ViteResult, run_vite


@dataclass
class SkeletonCandidate:
    grid: CircuitGrid
    vite: ViteResult = field(repr=False)
    support: float
    kept_cells: int

    @property
    def energy(self) -> float:
        return self.vite.energy


def load_corpus(directory) -> list[dict]:
    """Read every circuit JSON below ``directory``."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ConfigError(f"corpus directory {directory} does not exist")
    docs = []
    for path in sorted(directory.rglob("*.json")):
        try:
            doc = json.loads(path.read_text())
            CircuitGrid.from_json(doc)
        except (json.JSONDecodeError, ValueError) as exc:
            raise ConfigError(f"bad circuit file {path}: {exc}") from exc
        if "energy" not in doc:
            raise ConfigError(f"{path} lacks an 'energy' tag; not a scored circuit")
        docs.append(doc)
    if not docs:
        raise ConfigError(f"no circuit files found under {directory}")
    return docs


def _consensus_cells(grids: list[CircuitGrid], support: float) -> np.ndarray:
    rows, cols = grids[0].rows, grids[0].cols
    votes = np.zeros((rows, cols, 7), dtype=np.int64)
    for grid in grids:
        for r in range(rows):
            for c in range(cols):
                votes[r, c, grid.cells[r, c]] += 1
    kept = np.zeros((rows, cols), dtype=np.int64)
    threshold = support * len(grids)
    for r in range(rows):
        for c in range(cols):
            nonempty = votes[r, c, 1:]
            if nonempty.sum() == 0:
                continue
            code = int(np.argmax(nonempty)) + 1  # ties break to lower code
            if nonempty[code - 1] >= threshold:
                kept[r, c] = code
    return kept


def _repair(kept: np.ndarray) -> np.ndarray:
    """Make the voted cells a legal circuit again.

    Half CNOTs are dropped, gaps inside kept columns become identities,
    rotations that would repeat across identity-only gaps are demoted to
    identities (the optimizer would merge them anyway), and columns left
    with nothing but identities disappear.
    """
    rows, cols = kept.shape
    cells = kept.copy()
    for c in range(cols):
        for r in range(rows):
            if cells[r, c] == CTRL and (r == rows - 1 or cells[r + 1, c] != TGT):
                cells[r, c] = EMPTY
            elif cells[r, c] == TGT and (r == 0 or cells[r - 1, c] != CTRL):
                cells[r, c] = EMPTY
    keep_cols = [c for c in range(cols) if (cells[:, c] != EMPTY).any()]
    cells = cells[:, keep_cols]
    cells[cells == EMPTY] = IDLE
    for r in range(rows):
        last = None
        for c in range(cells.shape[1]):
            code = cells[r, c]
            if code == IDLE:
                continue
            if code in ROTATIONS:
                if code == last:
                    cells[r, c] = IDLE
                    continue
                last = code
            else:
                last = None
    keep_cols = [
        c for c in range(cells.shape[1]) if (cells[:, c] != IDLE).any()
    ]
    return cells[:, keep_cols]


def extract_skeleton(
    corpus: list[dict] | list[CircuitGrid],
    support: float,
    ham: PauliHamiltonian,
    vite_config: ViteConfig | None = None,
) -> list[SkeletonCandidate]:
    """Vote, repair, re-validate and re-score; returns 0 or 1 candidates.

    ``corpus`` holds circuit documents (dicts with "cells") or grids.
    """
    if not 0.0 < support <= 1.0:
        raise ConfigError(f"support must lie in (0, 1], got {support}")
    if not corpus:
        raise ConfigError("empty corpus")
    grids = [
        doc if isinstance(doc, CircuitGrid) else CircuitGrid.from_json(doc)[0]
        for doc in corpus
    ]
    shape = {(g.rows, g.cols) for g in grids}
    if len(shape) > 1:
        raise ConfigError(f"corpus mixes grid shapes: {sorted(shape)}")
    kept = _consensus_cells(grids, support)
    cells = _repair(kept)
    if cells.size == 0 or not np.isin(cells, list(ROTATIONS) + [CTRL]).any():
        return []
    grid = CircuitGrid.from_cells(cells)  # validates every structural rule
    result = run_vite(grid, ham, vite_config or ViteConfig(seed=1))
    kept_cells = int((cells != IDLE).sum())
    return [SkeletonCandidate(grid, result, support, kept_cells)]
