"""Coarse binary instance masks rasterized from box geometry.

A cell is foreground when its center point lies in the ground-truth box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import OrientedBox, as_vertices, contains_exact


@dataclass(frozen=True)
class MaskSpec:
    """Axis-aligned image window ``(x0, y0, x1, y1)`` covered by a grid."""

    window: tuple[float, float, float, float]
    grid_h: int = 7
    grid_w: int = 7

    def __post_init__(self):
        x0, y0, x1, y1 = self.window
        if not (x1 > x0 and y1 > y0):
            raise ValueError(f"mask window needs positive extent, got {self.window}")
        if self.grid_h < 1 or self.grid_w < 1:
            raise ValueError("grid dimensions must be at least 1")

    def cell_centers(self) -> np.ndarray:
        """``(grid_h, grid_w, 2)`` cell-center coordinates; rows run along +y."""
        x0, y0, x1, y1 = self.window
        xs = x0 + (np.arange(self.grid_w) + 0.5) * (x1 - x0) / self.grid_w
        ys = y0 + (np.arange(self.grid_h) + 0.5) * (y1 - y0) / self.grid_h
        gx, gy = np.meshgrid(xs, ys)
        return np.stack([gx, gy], axis=-1)


def rasterize_box(box, spec: MaskSpec) -> np.ndarray:
    return contains_exact(spec.cell_centers(), box).astype(float)


def roi_sample_points(roi, grid=(7, 7)) -> np.ndarray:
    """Cell centers of an ``h x w`` grid laid along the RoI's own edges.

    Columns follow the first edge (vertex 0 to 1), rows the last edge
    (vertex 0 to 3), matching a rotated RoI crop.
    """
    if not isinstance(roi, OrientedBox):
        roi = OrientedBox(roi)
    h, w = grid
    if h < 1 or w < 1:
        raise ValueError("grid dimensions must be at least 1")
    v = as_vertices(roi)
    u = (np.arange(w) + 0.5) / w
    t = (np.arange(h) + 0.5) / h
    ax, ay = v[1] - v[0], v[3] - v[0]
    return v[0] + t[:, None, None] * ay + u[None, :, None] * ax


def mask_for_roi(gt_box, roi_box, grid=(7, 7)) -> np.ndarray:
    """Binary mask of ``gt_box`` sampled in the rotated frame of ``roi_box``."""
    return contains_exact(roi_sample_points(roi_box, grid), gt_box).astype(float)


def render_mask(mask) -> str:
    """Text rendering, one row of ``0``/``1`` characters per grid row."""
    m = np.asarray(mask)
    return "\n".join("".join("1" if x else "0" for x in row) for row in m)
