"""Isometric cube rendering for the block-pushing world.

Same dynamics as the flat grid; only the view changes. Cubes project to a
fixed isometric camera and are painted back-to-front, so nearer cubes
partially occlude farther ones. Within a cube the paint order is left face,
right face, top face.
"""

from __future__ import annotations

import numpy as np

from .catalog import AttributeCatalog
from .grid import GridState

IMAGE_SIZE = 50
ISO_X0 = 25.0
ISO_Y0 = 16.0
ISO_HALF_W = 4.0  # screen x per grid step
ISO_HALF_H = 2.0  # screen y per grid step
ISO_CUBE_H = 6.0  # screen y per unit height

FACE_SHADE = {"top": 1.0, "right": 0.8, "left": 0.55}


def project(r: float, c: float, z: float) -> tuple:
    """Grid corner (r, c) at height z -> screen (x, y), y down."""
    x = ISO_X0 + (c - r) * ISO_HALF_W
    y = ISO_Y0 + (c + r) * ISO_HALF_H - z * ISO_CUBE_H
    return x, y


def cube_faces(r: int, c: int):
    """Screen-space quads for the three visible faces of a unit cube."""
    p = project
    top = [p(r, c, 1), p(r, c + 1, 1), p(r + 1, c + 1, 1), p(r + 1, c, 1)]
    left = [p(r + 1, c, 1), p(r + 1, c + 1, 1), p(r + 1, c + 1, 0), p(r + 1, c, 0)]
    right = [p(r, c + 1, 1), p(r + 1, c + 1, 1), p(r + 1, c + 1, 0), p(r, c + 1, 0)]
    return {"top": top, "left": left, "right": right}


def _fill_convex(canvas: np.ndarray, pts, color: np.ndarray) -> None:
    xs = np.array([px for px, _ in pts])
    ys = np.array([py for _, py in pts])
    # normalize to counter-clockwise so the half-plane test has one sign
    area = np.sum(xs * np.roll(ys, -1) - np.roll(xs, -1) * ys)
    if area < 0:
        xs, ys = xs[::-1], ys[::-1]
    x0 = max(int(np.floor(xs.min())), 0)
    x1 = min(int(np.ceil(xs.max())) + 1, canvas.shape[1])
    y0 = max(int(np.floor(ys.min())), 0)
    y1 = min(int(np.ceil(ys.max())) + 1, canvas.shape[0])
    if x0 >= x1 or y0 >= y1:
        return
    px = np.arange(x0, x1) + 0.5
    py = np.arange(y0, y1) + 0.5
    gx, gy = np.meshgrid(px, py)
    inside = np.ones(gx.shape, dtype=bool)
    n = len(xs)
    for i in range(n):
        ex, ey = xs[(i + 1) % n] - xs[i], ys[(i + 1) % n] - ys[i]
        inside &= ex * (gy - ys[i]) - ey * (gx - xs[i]) >= -1e-9
    canvas[y0:y1, x0:x1][inside] = color


def paint_order(positions) -> list:
    """Indices back-to-front: ascending depth r+c, then r, then c."""
    keyed = [((r + c, r, c), i) for i, (r, c) in enumerate(positions)]
    return [i for _, i in sorted(keyed)]


def render_blocks_iso(state: GridState, catalog: AttributeCatalog) -> np.ndarray:
    canvas = np.zeros((IMAGE_SIZE, IMAGE_SIZE, 3), dtype=np.uint8)
    for i in paint_order(state.positions):
        r, c = state.positions[i]
        _shape_id, color_id = state.attributes[i]
        base = np.asarray(catalog.color(color_id))
        faces = cube_faces(r, c)
        for name in ("left", "right", "top"):
            shade = np.round(base * FACE_SHADE[name] * 255.0).astype(np.uint8)
            _fill_convex(canvas, faces[name], shade)
    return canvas
