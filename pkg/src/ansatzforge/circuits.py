"""The gate grid an agent edits, plus its bookkeeping.

A circuit is a rows x cols table of integer cell codes:

    0 empty   1 Rx   2 Ry   3 Rz   4 identity   5 CNOT control   6 CNOT target

Row r is qubit r (row 0 = top wire = least significant bit).  Cells are
filled column by column, top to bottom, so the occupied cells always
form a prefix in column-major order.  A CNOT consumes two vertically
adjacent cells of one column, control on top, and its target always
sits on qubit control+1.

The fixed Hadamard layer that precedes every circuit is implicit: it is
applied by the simulator and never appears in the cells, the gate count
or the depth.

Agent actions are indexed 0 Rx, 1 Ry, 2 Rz, 3 identity, 4 CNOT.
"""

from __future__ import annotations

import numpy as np

EMPTY, RX, RY, RZ, IDLE, CTRL, TGT = range(7)
ROTATIONS = (RX, RY, RZ)

ACTION_RX, ACTION_RY, ACTION_RZ, ACTION_IDLE, ACTION_CNOT = range(5)
N_ACTIONS = 5
ACTION_CODES = {ACTION_RX: RX, ACTION_RY: RY, ACTION_RZ: RZ, ACTION_IDLE: IDLE}
_CODE_ACTIONS = {RX: ACTION_RX, RY: ACTION_RY, RZ: ACTION_RZ}

ACTION_NAMES = ("rx", "ry", "rz", "id", "cnot")

DEFAULT_ROWS = 4
DEFAULT_COLS = 10


class CircuitGrid:
    """Immutable-by-convention gate grid.

    ``place`` returns a fresh grid; nothing mutates ``cells`` in place.
    """

    __slots__ = ("cells", "filled")

    def __init__(self, cells: np.ndarray, filled: int):
        self.cells = cells
        self.filled = filled

    @classmethod
    def empty(cls, rows: int = DEFAULT_ROWS, cols: int = DEFAULT_COLS) -> "CircuitGrid":
        if rows < 1 or cols < 1:
            raise ValueError("grid needs at least one row and one column")
        return cls(np.zeros((rows, cols), dtype=np.int64), 0)

    @classmethod
    def from_cells(cls, cells) -> "CircuitGrid":
        """Build and fully validate a grid from a cell table."""
        cells = np.asarray(cells, dtype=np.int64)
        if cells.ndim != 2:
            raise ValueError("cells must be a 2-D table")
        flat = cells.ravel(order="F")
        occupied = np.flatnonzero(flat != EMPTY)
        filled = int(occupied[-1]) + 1 if occupied.size else 0
        grid = cls(cells.copy(), filled)
        grid.validate()
        return grid

    # -- geometry ------------------------------------------------------

    @property
    def rows(self) -> int:
        return self.cells.shape[0]

    @property
    def cols(self) -> int:
        return self.cells.shape[1]

    @property
    def is_full(self) -> bool:
        return self.filled >= self.cells.size

    @property
    def cursor(self) -> tuple[int, int] | None:
        """(row, col) of the next free cell, or None when full."""
        if self.is_full:
            return None
        return self.filled % self.rows, self.filled // self.rows

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CircuitGrid)
            and self.filled == other.filled
            and np.array_equal(self.cells, other.cells)
        )

    def __hash__(self):
        return hash((self.filled, self.cells.tobytes()))

    def __repr__(self) -> str:
        return f"CircuitGrid({self.rows}x{self.cols}, filled={self.filled})"

    # -- action legality -----------------------------------------------

    def _last_rotation(self, row: int, col: int) -> int | None:
        """Most recent rotation code on ``row`` left of ``col``.

        Identity cells are transparent; any CNOT endpoint resets the
        chain.  Returns None when no rotation is reachable.
        """
        for k in range(col - 1, -1, -1):
            code = self.cells[row, k]
            if code == IDLE:
                continue
            if code in ROTATIONS:
                return int(code)
            return None  # CNOT endpoint (or empty, which cannot occur)
        return None

    def valid_actions(self) -> np.ndarray:
        """Boolean mask over the five actions at the current cursor."""
        mask = np.zeros(N_ACTIONS, dtype=bool)
        if self.is_full:
            return mask
        row, col = self.cursor
        mask[:] = True
        last = self._last_rotation(row, col)
        if last is not None:
            mask[_CODE_ACTIONS[last]] = False
        if row == self.rows - 1 or self.cells[row + 1, col] != EMPTY:
            mask[ACTION_CNOT] = False
        return mask

    def place(self, action: int) -> "CircuitGrid":
        """Write one action at the cursor and advance it."""
        mask = self.valid_actions()
        if not 0 <= action < N_ACTIONS or not mask[action]:
            raise ValueError(f"action {action} is invalid under the current mask")
        row, col = self.cursor
        cells = self.cells.copy()
        if action == ACTION_CNOT:
            cells[row, col] = CTRL
            cells[row + 1, col] = TGT
            return CircuitGrid(cells, self.filled + 2)
        cells[row, col] = ACTION_CODES[action]
        return CircuitGrid(cells, self.filled + 1)

    # -- traversal -------------------------------------------------------

    def operations(self):
        """Yield (code, row) per gate in execution order.

        Execution order is column by column, top to bottom within a
        column.  Identity cells and CNOT target cells are skipped; a
        CNOT is reported once, at its control row.
        """
        for col in range(self.cols):
            for row in range(self.rows):
                code = int(self.cells[row, col])
                if code in ROTATIONS or code == CTRL:
                    yield code, row

    def n_rotations(self) -> int:
        return int(np.isin(self.cells, ROTATIONS).sum())

    # -- metrics ---------------------------------------------------------

    def gate_count(self) -> int:
        """Rotations plus CNOTs; identities and the H layer are free."""
        return self.n_rotations() + int((self.cells == CTRL).sum())

    def depth(self) -> int:
        """Layer count under as-soon-as-possible scheduling.

        Identity cells take no layer; a CNOT occupies one layer on both
        of its qubits.
        """
        busy = [0] * self.rows
        for code, row in self.operations():
            if code == CTRL:
                layer = max(busy[row], busy[row + 1]) + 1
                busy[row] = busy[row + 1] = layer
            else:
                busy[row] += 1
        return max(busy) if busy else 0

    def encode(self) -> np.ndarray:
        """Row-major flatten of the cell codes, scaled into [0, 1]."""
        return self.cells.astype(np.float64).ravel(order="C") / 6.0

    # -- validation ------------------------------------------------------

    def validate(self) -> None:
        """Raise ValueError unless every structural rule holds."""
        cells = self.cells
        if not np.isin(cells, range(7)).all():
            raise ValueError("cell codes must lie in 0..6")
        flat = cells.ravel(order="F")
        if (flat[: self.filled] == EMPTY).any() or (flat[self.filled:] != EMPTY).any():
            raise ValueError("occupied cells must form a column-major prefix")
        for col in range(self.cols):
            for row in range(self.rows):
                code = cells[row, col]
                if code == CTRL:
                    if row == self.rows - 1 or cells[row + 1, col] != TGT:
                        raise ValueError(
                            f"CNOT control at ({row},{col}) has no target below"
                        )
                elif code == TGT:
                    if row == 0 or cells[row - 1, col] != CTRL:
                        raise ValueError(
                            f"CNOT target at ({row},{col}) has no control above"
                        )
        for row in range(self.rows):
            last = None
            for col in range(self.cols):
                code = int(cells[row, col])
                if code in (EMPTY, IDLE):
                    continue
                if code in ROTATIONS:
                    if code == last:
                        raise ValueError(
                            f"repeated {ACTION_NAMES[_CODE_ACTIONS[code]]} on row "
                            f"{row} separated only by identities"
                        )
                    last = code
                else:
                    last = None

    # -- serialization ---------------------------------------------------

    def to_json(self, params=None) -> dict:
        doc = {"cells": self.cells.tolist()}
        if params is not None:
            doc["params"] = [float(p) for p in params]
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> tuple["CircuitGrid", list[float]]:
        if "cells" not in doc:
            raise ValueError("circuit document lacks 'cells'")
        grid = cls.from_cells(doc["cells"])
        params = [float(p) for p in doc.get("params", [])]
        if len(params) != grid.n_rotations():
            raise ValueError(
                f"{len(params)} params for {grid.n_rotations()} rotation gates"
            )
        return grid, params


def hardware_efficient_grid(reps: int, rows: int = DEFAULT_ROWS) -> CircuitGrid:
    """Hardware-efficient Ry/Rz ansatz with a linear CNOT ladder.

    One Ry column and one Rz column per rotation block, ``reps``
    entangling ladders in between, one extra rotation block at the end.
    The ladder is laid out over three columns so its CNOTs stay strictly
    sequential, which is what the textbook depth counts assume.  The
    grid is made just wide enough, so reps=2 on four qubits needs twelve
    columns even though the search grid stops at ten.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if rows < 2:
        raise ValueError("the CNOT ladder needs at least two rows")
    cols = 2 + reps * (rows - 1 + 2)
    grid = CircuitGrid.empty(rows, cols)
    rotation_block = [ACTION_RY] * rows + [ACTION_RZ] * rows
    actions = list(rotation_block)
    for _ in range(reps):
        for control in range(rows - 1):
            # one ladder column: identities above the CNOT, then the
            # CNOT, then identities below
            actions.extend([ACTION_IDLE] * control)
            actions.append(ACTION_CNOT)
            actions.extend([ACTION_IDLE] * (rows - 2 - control))
        actions.extend(rotation_block)
    for action in actions:
        grid = grid.place(action)
    return grid
