"""Experience buffers: sequences of (observation, action, next observation).

Episodes carry exact simulator states alongside the pixels so diagnostics
never need to re-simulate. Each episode derives its own seed from (master
seed, episode index), which makes generation order-independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .blocks import render_blocks_iso
from .bodies import BodyState, advance_frame, sample_bounded_state
from .catalog import AttributeCatalog
from .grid import (
    DEFAULT_GRID_SIZE,
    GridAction,
    GridState,
    grid_reset,
    grid_step,
    render_grid,
)

ENVIRONMENTS = ("shapes2d", "blocks3d", "threebody")
NO_ACTION = (255, 255)


@dataclass
class Episode:
    observations: np.ndarray  # (T+1, H, W, C) uint8
    actions: np.ndarray  # (T, 2) uint8 (object, direction); (255,255) = none
    attributes: np.ndarray  # (K, 2) uint8 (shape id, color id)
    grid_positions: np.ndarray | None = None  # (T+1, K, 2) uint8
    body_states: np.ndarray | None = None  # (T+1, K, 5) float64: x y vx vy m

    @property
    def steps(self) -> int:
        return self.actions.shape[0]


@dataclass
class ExperienceBuffer:
    environment: str
    grid_size: int
    num_objects: int
    steps: int
    episodes: list = field(default_factory=list)
    provenance: str = ""

    @property
    def num_episodes(self) -> int:
        return len(self.episodes)

    @property
    def num_transitions(self) -> int:
        return self.num_episodes * self.steps

    @property
    def obs_shape(self) -> tuple:
        return self.episodes[0].observations.shape[1:]


def episode_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def _grid_episode(rng, environment, catalog, assignment, steps, grid_size) -> Episode:
    render = render_grid if environment == "shapes2d" else render_blocks_iso
    state = grid_reset(rng, catalog, assignment, grid_size)
    k = state.num_objects
    observations = [render(state, catalog)]
    positions = [state.positions]
    actions = []
    for _ in range(steps):
        action = GridAction(int(rng.integers(k)), int(rng.integers(4)))
        state = grid_step(state, action)
        observations.append(render(state, catalog))
        positions.append(state.positions)
        actions.append((action.obj, action.direction))
    return Episode(
        observations=np.stack(observations),
        actions=np.array(actions, dtype=np.uint8).reshape(steps, 2),
        attributes=np.array(assignment, dtype=np.uint8),
        grid_positions=np.array(positions, dtype=np.uint8),
    )


def _body_episode(rng, catalog, assignment, steps) -> Episode:
    from .bodies import render_bodies

    colors = [catalog.color(color_id) for _shape_id, color_id in assignment]
    # one warm-up frame so every stored observation has a true previous frame
    states = [sample_bounded_state(rng, frames=steps + 1)]
    for _ in range(steps + 1):
        states.append(advance_frame(states[-1]))
    observations = [
        render_bodies(current=states[t + 1], previous=states[t], colors=colors)
        for t in range(steps + 1)
    ]
    recorded = states[1:]
    body_states = np.stack(
        [
            np.concatenate([s.positions, s.velocities, s.masses[:, None]], axis=1)
            for s in recorded
        ]
    )
    return Episode(
        observations=np.stack(observations),
        actions=np.full((steps, 2), NO_ACTION[0], dtype=np.uint8),
        attributes=np.array(assignment, dtype=np.uint8),
        body_states=body_states,
    )


def generate_buffer(
    environment: str,
    catalog: AttributeCatalog,
    assignment,
    episodes: int,
    steps: int,
    seed: int,
    grid_size: int = DEFAULT_GRID_SIZE,
    provenance: str = "",
) -> ExperienceBuffer:
    """Roll `episodes` independent episodes of `steps` transitions each.

    Grid environments sample a uniform (object, direction) action per step;
    the gravitational environment rolls passively with sentinel actions.
    """
    if environment not in ENVIRONMENTS:
        raise ValueError(f"unknown environment {environment!r}")
    if episodes < 0 or steps < 1:
        raise ValueError("need episodes >= 0 and steps >= 1")
    assignment = tuple((int(s), int(c)) for s, c in assignment)
    buf = ExperienceBuffer(
        environment=environment,
        grid_size=grid_size,
        num_objects=len(assignment),
        steps=steps,
        provenance=provenance,
    )
    for index in range(episodes):
        rng = episode_rng(seed, index)
        if environment == "threebody":
            buf.episodes.append(_body_episode(rng, catalog, assignment, steps))
        else:
            buf.episodes.append(
                _grid_episode(rng, environment, catalog, assignment, steps, grid_size)
            )
    return buf
