"""Deterministic simulators and experience-buffer generation."""

from .blocks import cube_faces, paint_order, project, render_blocks_iso
from .bodies import (
    DT,
    FRAME_SUBSTEPS,
    SOFTENING,
    BodyState,
    SimulationError,
    advance_frame,
    gravitational_accel,
    render_bodies,
    sample_bounded_state,
    three_body_step,
    total_energy,
    total_momentum,
    world_to_pixel,
)
from .buffer import (
    ENVIRONMENTS,
    NO_ACTION,
    Episode,
    ExperienceBuffer,
    episode_rng,
    generate_buffer,
)
from .catalog import (
    CELL_PIXELS,
    DEFAULT_COLOR_NAMES,
    DEFAULT_COLORS,
    DEFAULT_SHAPES,
    SHAPE_STENCILS,
    AttributeCatalog,
    CatalogError,
)
from .dataset_io import (
    DatasetFormatError,
    DatasetHeader,
    manifest,
    read_buffer,
    read_header,
    write_buffer,
)
from .grid import (
    DEFAULT_GRID_SIZE,
    DEFAULT_NUM_OBJECTS,
    DIRECTION_VECTORS,
    DIRECTIONS,
    CapacityError,
    GridAction,
    GridState,
    encode_action,
    grid_reset,
    grid_step,
    render_grid,
)
