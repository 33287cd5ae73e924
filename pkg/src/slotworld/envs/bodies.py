"""Three-body gravitational system with a leapfrog integrator.

Pairwise inverse-square attraction with Plummer softening, integrated
kick-drift-kick. Observations are two consecutive frames (previous RGB
stacked with current RGB) so velocity is implicit in the pixels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

G_CONST = 1.0
SOFTENING = 0.1
DT = 0.01
FRAME_SUBSTEPS = 20  # integrator steps per rendered frame
FRAME_HALF_WIDTH = 2.0  # world units mapped to the image half-extent
IMAGE_SIZE = 50
BODY_RADIUS_PX = 3.0
MASS_RANGE = (0.5, 1.5)


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class BodyState:
    positions: np.ndarray  # (K, 2) float64
    velocities: np.ndarray  # (K, 2) float64
    masses: np.ndarray  # (K,) float64

    def __post_init__(self):
        p = np.asarray(self.positions, dtype=np.float64)
        v = np.asarray(self.velocities, dtype=np.float64)
        m = np.asarray(self.masses, dtype=np.float64)
        if p.shape != v.shape or p.shape != (m.shape[0], 2):
            raise ValueError("inconsistent body-state shapes")
        if not (np.isfinite(p).all() and np.isfinite(v).all() and np.isfinite(m).all()):
            raise SimulationError("non-finite body state")
        if (m <= 0).any():
            raise ValueError("masses must be positive")
        object.__setattr__(self, "positions", p)
        object.__setattr__(self, "velocities", v)
        object.__setattr__(self, "masses", m)

    @property
    def num_bodies(self) -> int:
        return self.masses.shape[0]


def gravitational_accel(positions, masses, g=G_CONST, softening=SOFTENING):
    delta = positions[None, :, :] - positions[:, None, :]  # delta[i, j] = p_j - p_i
    r2 = (delta**2).sum(axis=-1) + softening**2
    inv = r2**-1.5
    np.fill_diagonal(inv, 0.0)
    return g * (delta * (inv * masses[None, :])[:, :, None]).sum(axis=1)


def three_body_step(state: BodyState, dt: float = DT, g: float = G_CONST,
                    softening: float = SOFTENING) -> BodyState:
    """One kick-drift-kick leapfrog step."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    a0 = gravitational_accel(state.positions, state.masses, g, softening)
    v_half = state.velocities + 0.5 * dt * a0
    p_new = state.positions + dt * v_half
    a1 = gravitational_accel(p_new, state.masses, g, softening)
    v_new = v_half + 0.5 * dt * a1
    if not (np.isfinite(p_new).all() and np.isfinite(v_new).all()):
        raise SimulationError("integration diverged")
    return BodyState(p_new, v_new, state.masses)


def advance_frame(state: BodyState, substeps: int = FRAME_SUBSTEPS, dt: float = DT,
                  g: float = G_CONST, softening: float = SOFTENING) -> BodyState:
    for _ in range(substeps):
        state = three_body_step(state, dt, g, softening)
    return state


def total_momentum(state: BodyState) -> np.ndarray:
    return (state.masses[:, None] * state.velocities).sum(axis=0)


def total_energy(state: BodyState, g: float = G_CONST, softening: float = SOFTENING) -> float:
    kinetic = 0.5 * (state.masses * (state.velocities**2).sum(axis=1)).sum()
    delta = state.positions[None, :, :] - state.positions[:, None, :]
    dist = np.sqrt((delta**2).sum(axis=-1) + softening**2)
    mm = state.masses[:, None] * state.masses[None, :]
    iu = np.triu_indices(state.num_bodies, k=1)
    potential = -g * (mm[iu] / dist[iu]).sum()
    return float(kinetic + potential)


def sample_bounded_state(rng, frames: int, substeps: int = FRAME_SUBSTEPS,
                         dt: float = DT, num_bodies: int = 3,
                         max_tries: int = 256) -> BodyState:
    """Rejection-sample an initial state that stays in frame for `frames` frames.

    Bodies start on a rough ring with tangential, common-handed velocities
    near circular speed; candidates are simulated forward and rejected if
    any body leaves the safe region or two bodies pass too close.
    """
    for _ in range(max_tries):
        masses = rng.uniform(*MASS_RANGE, num_bodies)
        radii = rng.uniform(0.6, 1.1, num_bodies)
        base = rng.uniform(0.0, 2.0 * np.pi)
        angles = base + 2.0 * np.pi * np.arange(num_bodies) / num_bodies
        angles = angles + rng.uniform(-0.3, 0.3, num_bodies)
        pos = np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1)
        speed = np.sqrt(G_CONST * masses.sum() / radii) * rng.uniform(0.5, 0.75, num_bodies)
        tang = np.stack([-np.sin(angles), np.cos(angles)], axis=1)
        vel = speed[:, None] * tang + rng.normal(0.0, 0.05, (num_bodies, 2))
        # zero out net momentum and recenter on the mass centroid
        vel -= (masses[:, None] * vel).sum(axis=0) / masses.sum()
        pos -= (masses[:, None] * pos).sum(axis=0) / masses.sum()
        state = BodyState(pos, vel, masses)

        probe, ok = state, True
        for _ in range(frames * substeps):
            probe = three_body_step(probe, dt)
            if np.abs(probe.positions).max() > 0.85 * FRAME_HALF_WIDTH:
                ok = False
                break
            delta = probe.positions[None] - probe.positions[:, None]
            d2 = (delta**2).sum(axis=-1)
            d2[np.diag_indices(num_bodies)] = np.inf
            if d2.min() < 0.12**2:
                ok = False
                break
        if ok:
            return state
    raise SimulationError(f"no bounded configuration found in {max_tries} tries")


def world_to_pixel(positions: np.ndarray) -> np.ndarray:
    """World (x, y) -> fractional pixel (row, col)."""
    scale = (IMAGE_SIZE / 2.0) / FRAME_HALF_WIDTH
    col = IMAGE_SIZE / 2.0 + positions[:, 0] * scale
    row = IMAGE_SIZE / 2.0 + positions[:, 1] * scale
    return np.stack([row, col], axis=1)


def _draw_discs(state: BodyState, colors) -> np.ndarray:
    frame = np.zeros((IMAGE_SIZE, IMAGE_SIZE, 3), dtype=np.uint8)
    rows = np.arange(IMAGE_SIZE) + 0.5
    gy, gx = np.meshgrid(rows, rows, indexing="ij")
    centers = world_to_pixel(state.positions)
    for (row, col), color in zip(centers, colors):
        mask = (gy - row) ** 2 + (gx - col) ** 2 <= BODY_RADIUS_PX**2
        frame[mask] = np.round(np.asarray(color) * 255.0).astype(np.uint8)
    return frame


def render_bodies(current: BodyState, previous: BodyState, colors) -> np.ndarray:
    """(50, 50, 6) uint8: previous-frame RGB stacked before current-frame RGB."""
    prev = _draw_discs(previous, colors)
    cur = _draw_discs(current, colors)
    return np.concatenate([prev, cur], axis=2)
