"""Block-pushing grid world: K uniquely-attributed objects on a GxG board.

One object moves one cell per step; moves into occupied or off-board cells
are legal no-ops. Rendering paints each object's shape stencil in its color
into its 10x10 pixel cell on a black background.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import CELL_PIXELS, AttributeCatalog

DIRECTIONS = ("up", "down", "left", "right")
DIRECTION_VECTORS = ((-1, 0), (1, 0), (0, -1), (0, 1))  # row 0 is the top row

DEFAULT_GRID_SIZE = 5
DEFAULT_NUM_OBJECTS = 5


class CapacityError(ValueError):
    """More objects than grid cells."""


@dataclass(frozen=True)
class GridAction:
    obj: int
    direction: int

    def __post_init__(self):
        if not 0 <= self.direction < 4:
            raise ValueError(f"direction {self.direction} outside [0,4)")
        if self.obj < 0:
            raise ValueError("object index must be non-negative")


@dataclass(frozen=True)
class GridState:
    grid_size: int
    positions: tuple  # K x (row, col)
    attributes: tuple  # K x (shape id, color id)

    def __post_init__(self):
        g = self.grid_size
        if len(self.positions) != len(self.attributes):
            raise ValueError("positions / attributes length mismatch")
        if len(set(self.positions)) != len(self.positions):
            raise ValueError("objects overlap")
        for r, c in self.positions:
            if not (0 <= r < g and 0 <= c < g):
                raise ValueError(f"position ({r},{c}) outside {g}x{g} grid")

    @property
    def num_objects(self) -> int:
        return len(self.positions)


def grid_reset(rng, catalog: AttributeCatalog, assignment, grid_size: int = DEFAULT_GRID_SIZE) -> GridState:
    """Place the assigned objects on distinct uniformly-random cells."""
    assignment = tuple((int(s), int(c)) for s, c in assignment)
    k = len(assignment)
    if k > grid_size * grid_size:
        raise CapacityError(f"{k} objects cannot fit a {grid_size}x{grid_size} grid")
    if len(set(assignment)) != k:
        raise ValueError("attribute assignment must be unique per object")
    for s, c in assignment:
        catalog.stencil(s)
        catalog.color(c)
    cells = rng.choice(grid_size * grid_size, size=k, replace=False)
    positions = tuple((int(i) // grid_size, int(i) % grid_size) for i in cells)
    return GridState(grid_size, positions, assignment)


def grid_step(state: GridState, action: GridAction) -> GridState:
    """Move one object one cell; blocked and off-board moves return the input state."""
    if not 0 <= action.obj < state.num_objects:
        raise ValueError(f"object index {action.obj} outside [0,{state.num_objects})")
    dr, dc = DIRECTION_VECTORS[action.direction]
    r, c = state.positions[action.obj]
    nr, nc = r + dr, c + dc
    g = state.grid_size
    if not (0 <= nr < g and 0 <= nc < g):
        return state
    if (nr, nc) in state.positions:
        return state
    positions = list(state.positions)
    positions[action.obj] = (nr, nc)
    return GridState(g, tuple(positions), state.attributes)


def render_grid(state: GridState, catalog: AttributeCatalog) -> np.ndarray:
    """Rasterize to (G*10, G*10, 3) uint8; [0,1] floats after /255."""
    side = state.grid_size * CELL_PIXELS
    canvas = np.zeros((side, side, 3), dtype=np.uint8)
    for (r, c), (shape_id, color_id) in zip(state.positions, state.attributes):
        stencil = catalog.stencil(shape_id)
        color = catalog.color_u8(color_id)
        block = canvas[r * CELL_PIXELS : (r + 1) * CELL_PIXELS,
                       c * CELL_PIXELS : (c + 1) * CELL_PIXELS]
        block[stencil] = color
    return canvas


def encode_action(action: GridAction | None, num_objects: int) -> np.ndarray:
    """Per-object one-hot move encoding, flattened to length 4*K.

    The acted object's 4-block is one-hot at its direction; every other
    block is zeros, and a missing action (physics environments) encodes as
    all zeros.
    """
    out = np.zeros(num_objects * 4, dtype=np.float32)
    if action is None:
        return out
    if not 0 <= action.obj < num_objects:
        raise ValueError(f"object index {action.obj} outside [0,{num_objects})")
    out[action.obj * 4 + action.direction] = 1.0
    return out
