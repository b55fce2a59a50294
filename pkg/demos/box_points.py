# coding: utf-8

# # Pulling points into a box
#
# The smooth containment score is 1 on the box and decays with the relative
# area excess. Its sharpness k controls how fast.

import numpy as np

from attnpoints import FitConfig, OrientedBox, bp_loss, fit_points, soft_contains

target = OrientedBox.from_params(0.5, 0.5, 1.0, 1.0, 0.0)

for k in [1.0, 10.0, 100.0]:
    row = [soft_contains((x, 0.5), target, k) for x in [0.5, 1.0, 1.2, 1.5, 2.0, 3.0]]
    print(f"k={k:5.1f} ", "  ".join(f"{v:.4f}" for v in row))

# Eight points start on a ring around the box. Each step moves every point a
# fixed distance down its own gradient, and the distance decays over time.

trace = fit_points(target)
print("initial loss", trace.losses[0])
print("final loss  ", trace.final_loss)
print("iterations  ", len(trace.losses), "converged", trace.converged)
print(np.round(trace.points, 3))

# With raw gradient steps the far points barely move: their kernel value is
# flat out there.

raw = fit_points(target, FitConfig(normalize=False, step_size=0.1, max_iters=2000))
print("raw-gradient final loss", raw.final_loss, "converged", raw.converged)

# A long thin target rotated by 1 rad takes a few more steps.

thin = OrientedBox.from_params(0, 0, 6, 0.5, 1.0)
trace = fit_points(thin, FitConfig(seed=3))
print("thin target:", len(trace.losses), "iterations, loss", bp_loss(trace.points, thin))
