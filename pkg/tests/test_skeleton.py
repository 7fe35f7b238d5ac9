"""Consensus extraction: voting, repair, and re-scoring."""

import json

import numpy as np
import pytest

from ansatzforge.circuits import (
    ACTION_CNOT,
    ACTION_RX,
    ACTION_RY,
    ACTION_RZ,
    IDLE,
    RX,
    RY,
    CircuitGrid,
)
from ansatzforge.errors import ConfigError
from ansatzforge.skeleton import extract_skeleton, load_corpus
from ansatzforge.vite import ViteConfig, run_vite

QUICK = ViteConfig(max_steps=5)


def scored_doc(grid, ham, config=None):
    result = run_vite(grid, ham, config or ViteConfig(seed=0))
    doc = grid.to_json(params=result.params)
    doc["energy"] = result.energy
    doc["problem"] = "maxcut"
    return doc


def ry_column():
    grid = CircuitGrid.empty()
    for _ in range(4):
        grid = grid.place(ACTION_RY)
    return grid


def motif_grid():
    # Ry column followed by two stacked CNOTs
    grid = ry_column()
    return grid.place(ACTION_CNOT).place(ACTION_CNOT)


def test_identical_corpus_returns_that_circuit(maxcut):
    doc = scored_doc(ry_column(), maxcut)
    candidates = extract_skeleton([doc] * 3, 0.5, maxcut)
    assert len(candidates) == 1
    cand = candidates[0]
    # compacted to the occupied column only
    assert cand.grid.cols == 1
    assert (cand.grid.cells[:, 0] == ry_column().cells[:, 0]).all()
    assert cand.energy == pytest.approx(doc["energy"], abs=2e-3)
    assert cand.kept_cells == 4


def test_disjoint_corpus_yields_nothing(maxcut):
    rx_col = CircuitGrid.empty()
    rz_col = CircuitGrid.empty()
    for _ in range(4):
        rx_col = rx_col.place(ACTION_RX)
        rz_col = rz_col.place(ACTION_RZ)
    docs = [scored_doc(rx_col, maxcut), scored_doc(rz_col, maxcut)]
    assert extract_skeleton(docs, 0.9, maxcut, vite_config=QUICK) == []


def test_planted_motif_survives_varied_decoration(maxcut):
    # every member shares the motif; decorations rotate through three
    # gate types so no decorated cell reaches majority support
    decorations = (ACTION_RX, ACTION_RY, ACTION_RZ)
    docs = []
    for k in range(9):
        grid = motif_grid()
        for _ in range(4):
            grid = grid.place(decorations[k % 3])
        if k % 2:
            for _ in range(4):
                grid = grid.place(decorations[(k + 1) % 3])
        docs.append(scored_doc(grid, maxcut, QUICK))

    candidates = extract_skeleton([json.loads(json.dumps(d)) for d in docs],
                                  0.5, maxcut)
    assert len(candidates) == 1
    cand = candidates[0]
    assert cand.grid.cols == 2
    assert (cand.grid.cells == motif_grid().cells[:, :2]).all()
    assert cand.kept_cells == 8
    # the motif alone still solves the cut when re-optimized
    assert cand.energy < -2.9
    assert cand.vite.converged


def test_widowed_control_is_dropped_in_repair(maxcut):
    # the control cell wins its vote (2 of 5 at support 0.4) while the
    # target cell below loses a tie to Rx, leaving a control with no
    # partner that repair must clear
    cnot_top = ry_column()
    cnot_top = cnot_top.place(ACTION_CNOT).place(ACTION_RX).place(ACTION_RX)
    scatter = ry_column()
    scatter = (scatter.place(ACTION_RZ).place(ACTION_RX)
               .place(ACTION_RX).place(ACTION_RX))
    rx_col = ry_column()
    for _ in range(4):
        rx_col = rx_col.place(ACTION_RX)
    docs = [scored_doc(g, maxcut, QUICK)
            for g in (cnot_top, cnot_top, scatter, rx_col, ry_column())]
    candidates = extract_skeleton(docs, 0.4, maxcut, vite_config=QUICK)
    assert len(candidates) == 1
    cells = candidates[0].grid.cells
    assert cells.shape == (4, 2)
    assert (cells[:, 0] == RY).all()
    assert cells[0, 1] == IDLE
    assert (cells[1:, 1] == RX).all()
    assert candidates[0].kept_cells == 7


def test_adjacency_conflicts_are_demoted_to_identity(maxcut):
    # two members agree on Ry columns at both ends but disagree in the
    # middle, leaving two surviving Ry columns that would collide
    a = ry_column()
    a = a.place(ACTION_RX).place(ACTION_RX).place(ACTION_RX).place(ACTION_RX)
    for _ in range(4):
        a = a.place(ACTION_RY)
    b = ry_column()
    b = b.place(ACTION_RZ).place(ACTION_RZ).place(ACTION_RZ).place(ACTION_RZ)
    for _ in range(4):
        b = b.place(ACTION_RY)
    docs = [scored_doc(a, maxcut, QUICK), scored_doc(b, maxcut, QUICK)]
    candidates = extract_skeleton(docs, 0.9, maxcut, vite_config=QUICK)
    assert len(candidates) == 1
    cells = candidates[0].grid.cells
    # the trailing Ry column lost its gates to the adjacency rule
    assert cells.shape[1] == 1
    assert candidates[0].kept_cells == 4


def test_random_corpora_never_break_the_repair(rng, maxcut):
    for _ in range(40):
        docs = []
        for _ in range(int(rng.integers(2, 6))):
            grid = CircuitGrid.empty()
            while True:
                mask = grid.valid_actions()
                if not mask.any() or rng.random() < 0.08:
                    break
                grid = grid.place(int(rng.choice(np.flatnonzero(mask))))
            if grid.n_rotations() == 0:
                continue
            docs.append(scored_doc(grid, maxcut, QUICK))
        if not docs:
            continue
        support = float(rng.uniform(0.2, 1.0))
        for cand in extract_skeleton(docs, support, maxcut, vite_config=QUICK):
            cand.grid.validate()
            assert np.isfinite(cand.energy)
            assert cand.grid.gate_count() >= 1


def test_extract_validates_its_inputs(maxcut):
    doc = scored_doc(ry_column(), maxcut, QUICK)
    with pytest.raises(ConfigError, match="support"):
        extract_skeleton([doc], 0.0, maxcut)
    with pytest.raises(ConfigError, match="support"):
        extract_skeleton([doc], 1.5, maxcut)
    with pytest.raises(ConfigError, match="empty"):
        extract_skeleton([], 0.5, maxcut)
    small = CircuitGrid.empty(rows=4, cols=3)
    small = small.place(ACTION_RY)
    mixed = [doc, small.to_json(params=[0.1])]
    with pytest.raises(ConfigError, match="shapes"):
        extract_skeleton(mixed, 0.5, maxcut)


def test_corpus_loading_and_its_failure_modes(tmp_path, maxcut):
    with pytest.raises(ConfigError, match="does not exist"):
        load_corpus(tmp_path / "nowhere")
    empty = tmp_path / "empty"
    empty.mkdir()
    with pytest.raises(ConfigError, match="no circuit files"):
        load_corpus(empty)

    good = tmp_path / "good"
    (good / "nested").mkdir(parents=True)
    doc = scored_doc(ry_column(), maxcut, QUICK)
    (good / "one.json").write_text(json.dumps(doc))
    (good / "nested" / "two.json").write_text(json.dumps(doc))
    docs = load_corpus(good)
    assert len(docs) == 2

    (good / "broken.json").write_text("{oops")
    with pytest.raises(ConfigError, match="bad circuit"):
        load_corpus(good)
    (good / "broken.json").write_text(json.dumps({"cells": [[7]]}))
    with pytest.raises(ConfigError, match="bad circuit"):
        load_corpus(good)

    untagged = tmp_path / "untagged"
    untagged.mkdir()
    bare = ry_column().to_json(params=[0.0, 0.0, 0.0, 0.0])
    (untagged / "one.json").write_text(json.dumps(bare))
    with pytest.raises(ConfigError, match="energy"):
        load_corpus(untagged)
