"""Exact geometry of oriented boxes.

Boxes are convex quadrilaterals stored as four counter-clockwise vertices.
Most functions here accept either an :class:`OrientedBox` or a raw vertex
array of shape ``(..., 4, 2)`` and broadcast over leading dimensions, so the
same code path serves single queries and large vectorized batches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Relative slack on the "sum of triangle areas <= box area" comparison.
CONTAINMENT_RTOL = 1e-9
# Vertices closer than this are merged by the polygon clipper.
MERGE_EPS = 1e-12


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _scalar(x):
    x = np.asarray(x)
    return x.item() if x.ndim == 0 else x


def signed_area(vertices) -> np.ndarray:
    """Shoelace area of polygon(s) ``(..., n, 2)``; positive when counter-clockwise."""
    v = np.asarray(vertices, dtype=float)
    # shift to the first vertex: avoids cancellation for small boxes far from the origin
    v = v - v[..., :1, :]
    return 0.5 * _cross(v, np.roll(v, -1, axis=-2)).sum(axis=-1)


@dataclass(frozen=True)
class BoxParams:
    """Center/size/angle description of a rectangle.

    ``theta`` is the rotation (radians) of the width axis from +x.
    """

    cx: float
    cy: float
    w: float
    h: float
    theta: float = 0.0

    def __post_init__(self):
        vals = (self.cx, self.cy, self.w, self.h, self.theta)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"box parameters must be finite, got {vals}")
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"box sides must be positive, got w={self.w}, h={self.h}")

    def vertices(self) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        hw, hh = self.w / 2.0, self.h / 2.0
        local = np.array([[-hw, -hh], [hw, -hh], [hw, hh], [-hw, hh]])
        rot = np.array([[c, -s], [s, c]])
        return local @ rot.T + np.array([self.cx, self.cy])

    def to_box(self) -> "OrientedBox":
        return OrientedBox(self.vertices())


class OrientedBox:
    """Convex quadrilateral with counter-clockwise vertices.

    Clockwise input is reversed (keeping the first vertex first). Raises
    ``ValueError`` for non-finite, non-convex or zero-area input.
    """

    __slots__ = ("_vertices", "_area")

    def __init__(self, vertices):
        v = np.array(vertices, dtype=float)
        if v.shape != (4, 2):
            raise ValueError(f"expected 4 vertices of shape (4, 2), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("box vertices must be finite")
        area = signed_area(v)
        if area < 0:
            v = v[[0, 3, 2, 1]]
            area = -area
        scale = max(float(np.ptp(v, axis=0).max()), 1.0)
        if area <= 1e-12 * scale * scale:
            raise ValueError("degenerate box: area is zero")
        edges = np.roll(v, -1, axis=0) - v
        turns = _cross(edges, np.roll(edges, -1, axis=0))
        if np.any(turns < -1e-12 * scale * scale):
            raise ValueError("box vertices do not form a convex quadrilateral")
        v.setflags(write=False)
        self._vertices = v
        self._area = float(area)

    @classmethod
    def from_params(cls, cx, cy, w, h, theta=0.0) -> "OrientedBox":
        return BoxParams(cx, cy, w, h, theta).to_box()

    @property
    def vertices(self) -> np.ndarray:
        return self._vertices

    @property
    def area(self) -> float:
        return self._area

    @property
    def center(self) -> np.ndarray:
        """Area centroid of the quadrilateral."""
        origin = self._vertices[0]
        v = self._vertices - origin
        nxt = np.roll(v, -1, axis=0)
        cr = _cross(v, nxt)
        return origin + ((v + nxt) * cr[:, None]).sum(axis=0) / (6.0 * self._area)

    @property
    def diagonal(self) -> float:
        v = self._vertices
        return float(max(np.hypot(*(v[2] - v[0])), np.hypot(*(v[3] - v[1]))))

    @property
    def circumradius(self) -> float:
        """Largest center-to-vertex distance."""
        return float(np.hypot(*(self._vertices - self.center).T).max())

    def to_params(self) -> BoxParams:
        """Read back center/size/angle, treating the box as a rectangle."""
        v = self._vertices
        e1, e2 = v[1] - v[0], v[3] - v[0]
        cx, cy = self.center
        return BoxParams(float(cx), float(cy), float(np.hypot(*e1)),
                         float(np.hypot(*e2)), math.atan2(e1[1], e1[0]))

    def translated(self, dx: float, dy: float) -> "OrientedBox":
        return OrientedBox(self._vertices + np.array([dx, dy]))

    def __eq__(self, other):
        if not isinstance(other, OrientedBox):
            return NotImplemented
        return np.array_equal(self._vertices, other._vertices)

    def __hash__(self):
        return hash(self._vertices.tobytes())

    def __repr__(self):
        pts = ", ".join(f"({x:g}, {y:g})" for x, y in self._vertices)
        return f"OrientedBox([{pts}])"


def as_vertices(box) -> np.ndarray:
    """Vertex array ``(..., 4, 2)`` for a box or batch of boxes."""
    if isinstance(box, OrientedBox):
        return box.vertices
    v = np.asarray(box, dtype=float)
    if v.shape[-2:] != (4, 2):
        raise ValueError(f"expected vertices of shape (..., 4, 2), got {v.shape}")
    return v


def triangle_area(a, b, c):
    """Unsigned area ``|cross(b - a, c - a)| / 2``; zero for collinear points."""
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    return _scalar(0.5 * np.abs(_cross(b - a, c - a)))


def box_area(box):
    """Area of a box (or batch of boxes)."""
    if isinstance(box, OrientedBox):
        return box.area
    return _scalar(np.abs(signed_area(as_vertices(box))))


def edge_triangle_areas(p, box) -> np.ndarray:
    """Areas of the four triangles joining ``p`` to each box edge, in edge order.

    ``p`` has shape ``(..., 2)`` and broadcasts against the box batch; the
    result has shape ``(..., 4)``.
    """
    v = as_vertices(box)
    p = np.asarray(p, dtype=float)[..., None, :]
    a = v - p
    b = np.roll(v, -1, axis=-2) - p
    return 0.5 * np.abs(_cross(a, b))


def area_excess(p, box):
    """Relative excess ``(sum of edge triangles - area) / area``; ~0 inside, > 0 outside."""
    v = as_vertices(box)
    area = np.abs(signed_area(v))
    total = edge_triangle_areas(p, v).sum(axis=-1)
    return _scalar((total - area) / area)


def contains_exact(p, box):
    """1 if ``p`` lies in the closed box (triangle-partition test), else 0."""
    v = as_vertices(box)
    area = np.abs(signed_area(v))
    total = edge_triangle_areas(p, v).sum(axis=-1)
    return _scalar((total <= area * (1.0 + CONTAINMENT_RTOL)).astype(np.int64))


def _dedupe(poly: np.ndarray) -> np.ndarray:
    if len(poly) == 0:
        return poly
    keep = [poly[0]]
    for q in poly[1:]:
        if np.abs(q - keep[-1]).max() > MERGE_EPS:
            keep.append(q)
    if len(keep) > 1 and np.abs(keep[0] - keep[-1]).max() <= MERGE_EPS:
        keep.pop()
    return np.array(keep)


def clip_convex(subject, clip) -> np.ndarray:
    """Clip convex polygon ``subject`` by convex counter-clockwise polygon ``clip``.

    Successive half-plane clipping against each edge of ``clip``. Returns an
    ``(m, 2)`` counter-clockwise vertex array, ``m == 0`` when empty.
    """
    poly = np.asarray(subject, dtype=float)
    clip = np.asarray(clip, dtype=float)
    if signed_area(poly) < 0:
        poly = poly[::-1]
    for s, e in zip(clip, np.roll(clip, -1, axis=0)):
        if len(poly) == 0:
            break
        d = e - s
        side = _cross(d, poly - s)
        out = []
        for i in range(len(poly)):
            j = (i + 1) % len(poly)
            pi, pj, si, sj = poly[i], poly[j], side[i], side[j]
            if si >= 0:
                out.append(pi)
            if (si >= 0) != (sj >= 0):
                t = si / (si - sj)
                out.append(pi + t * (pj - pi))
        poly = _dedupe(np.array(out)) if out else np.empty((0, 2))
    if len(poly) < 3:
        return np.empty((0, 2))
    return poly


def convex_intersection(a, b) -> np.ndarray:
    """Vertices of the intersection polygon of two boxes, counter-clockwise."""
    return clip_convex(as_vertices(a), as_vertices(b))


def intersection_area(a, b) -> float:
    poly = convex_intersection(a, b)
    if len(poly) < 3:
        return 0.0
    return max(float(signed_area(poly)), 0.0)


def rotated_iou(a, b) -> float:
    """Intersection over union of two oriented boxes."""
    inter = intersection_area(a, b)
    union = box_area(a) + box_area(b) - inter
    if union <= 0:
        return 0.0
    return min(max(inter / union, 0.0), 1.0)
