"""Object appearance catalogs: shape stencils and color palettes.

Shapes are 10x10 binary stencils rasterized once at import; colors are RGB
triples in [0, 1]. Six of each ship as the default so one shape and one
color can be held out of training.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CELL_PIXELS = 10


class CatalogError(ValueError):
    """Unknown shape / color id, or a malformed catalog."""


def _pixel_grid():
    c = np.arange(CELL_PIXELS) + 0.5
    return np.meshgrid(c, c, indexing="ij")  # (y, x) with row index first


def _square():
    return np.ones((CELL_PIXELS, CELL_PIXELS), dtype=bool)


def _triangle():
    y, x = _pixel_grid()
    return np.abs(x - 5.0) <= (y + 1.0) / 2.0


def _circle():
    y, x = _pixel_grid()
    return (x - 5.0) ** 2 + (y - 5.0) ** 2 <= 4.5**2


def _diamond():
    y, x = _pixel_grid()
    return np.abs(x - 5.0) + np.abs(y - 5.0) <= 4.5


def _cross():
    y, x = _pixel_grid()
    return (np.abs(x - 5.0) <= 1.5) | (np.abs(y - 5.0) <= 1.5)


def _pentagon():
    y, x = _pixel_grid()
    angles = -np.pi / 2 + 2 * np.pi * np.arange(5) / 5  # vertex pointing up
    vx = 5.0 + 4.7 * np.cos(angles)
    vy = 5.0 + 4.7 * np.sin(angles)
    inside = np.ones_like(x, dtype=bool)
    for i in range(5):
        x1, y1 = vx[i], vy[i]
        x2, y2 = vx[(i + 1) % 5], vy[(i + 1) % 5]
        inside &= (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) >= 0
    return inside


SHAPE_STENCILS: dict[str, np.ndarray] = {
    "square": _square(),
    "triangle": _triangle(),
    "circle": _circle(),
    "diamond": _diamond(),
    "cross": _cross(),
    "pentagon": _pentagon(),
}

DEFAULT_SHAPES = tuple(SHAPE_STENCILS)

DEFAULT_COLORS = (
    (1.0, 0.0, 0.0),
    (0.0, 1.0, 0.0),
    (0.0, 0.0, 1.0),
    (1.0, 1.0, 0.0),
    (1.0, 0.0, 1.0),
    (0.0, 1.0, 1.0),
)
DEFAULT_COLOR_NAMES = ("red", "green", "blue", "yellow", "magenta", "cyan")


@dataclass(frozen=True)
class AttributeCatalog:
    """Ordered shape identifiers and RGB colors an environment can draw from."""

    shapes: tuple = DEFAULT_SHAPES
    colors: tuple = DEFAULT_COLORS
    color_names: tuple = field(default=())

    def __post_init__(self):
        if len(set(self.shapes)) != len(self.shapes):
            raise CatalogError("duplicate shape identifiers")
        if len(set(self.colors)) != len(self.colors):
            raise CatalogError("duplicate colors")
        for s in self.shapes:
            if s not in SHAPE_STENCILS:
                raise CatalogError(f"unknown shape identifier {s!r}")
        if self.color_names and len(self.color_names) != len(self.colors):
            raise CatalogError("color_names length mismatch")
        if not self.color_names:
            object.__setattr__(
                self, "color_names", tuple(f"color{i}" for i in range(len(self.colors)))
            )

    @classmethod
    def default(cls) -> "AttributeCatalog":
        return cls(DEFAULT_SHAPES, DEFAULT_COLORS, DEFAULT_COLOR_NAMES)

    @classmethod
    def bodies_default(cls) -> "AttributeCatalog":
        """Discs only; bodies vary by color alone."""
        return cls(("circle",), DEFAULT_COLORS, DEFAULT_COLOR_NAMES)

    def stencil(self, shape_id: int) -> np.ndarray:
        if not 0 <= shape_id < len(self.shapes):
            raise CatalogError(f"shape id {shape_id} outside catalog")
        return SHAPE_STENCILS[self.shapes[shape_id]]

    def color(self, color_id: int) -> tuple:
        if not 0 <= color_id < len(self.colors):
            raise CatalogError(f"color id {color_id} outside catalog")
        return self.colors[color_id]

    def color_u8(self, color_id: int) -> np.ndarray:
        return np.round(np.asarray(self.color(color_id)) * 255.0).astype(np.uint8)
