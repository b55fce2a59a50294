# coding: utf-8

# # Oriented boxes and the triangle test
#
# A box is four ordered vertices. A point is inside when the four triangles it
# forms with the edges add up to exactly the box area; outside, they overshoot.

import math

import numpy as np

from attnpoints import OrientedBox, contains_exact, rotated_iou
from attnpoints.geometry import area_excess, edge_triangle_areas

box = OrientedBox.from_params(cx=2.0, cy=1.0, w=4.0, h=2.0, theta=math.radians(30))
print(box)
print("area", box.area)

# The center splits the box into four triangles with no overshoot.

tri = edge_triangle_areas(box.center, box)
print("triangles", tri, "sum", tri.sum())

# Move a point outward along the width axis and watch the excess grow.

axis = box.vertices[1] - box.vertices[0]
axis /= np.linalg.norm(axis)
for step in [0.0, 1.9, 2.0, 2.1, 3.0, 5.0]:
    p = box.center + step * axis
    print(f"offset {step:3.1f}  inside {contains_exact(p, box)}  excess {area_excess(p, box):.4f}")

# Batches broadcast: one box against a grid of points.

xs, ys = np.meshgrid(np.linspace(-1, 5, 13), np.linspace(-2, 4, 7))
grid = np.stack([xs, ys], axis=-1)
print(contains_exact(grid, box))

# Rotated IoU clips one polygon against the other.

for dtheta in [0, 10, 45, 90]:
    other = OrientedBox.from_params(2.0, 1.0, 4.0, 2.0, math.radians(30 + dtheta))
    print(f"rotate by {dtheta:2d} deg  IoU {rotated_iou(box, other):.4f}")
