# coding: utf-8

# # Coarse masks and attention features
#
# A ground-truth box is rasterized in the frame of a proposal (RoI) to give a
# 7x7 target. Attention over the RoI's feature grid is squashed to (0, 1) and
# scored against that target with binary cross-entropy.

import numpy as np

from attnpoints import OrientedBox, ga_loss, mask_for_roi, render_mask, roi_attention

gt = OrientedBox.from_params(10.0, 10.0, 8.0, 3.0, 0.4)
roi = OrientedBox.from_params(11.0, 10.5, 9.0, 5.0, 0.2)

mask = mask_for_roi(gt, roi)
print(render_mask(mask))
print("coverage", mask.mean())

# Random features score poorly. Features that already look like the mask do
# much better with plain attention; the linear-cost variant mixes tokens
# differently and keeps less of the spatial layout.

rng = np.random.default_rng(0)
noise = rng.normal(size=(7, 7))
print("noise features ", ga_loss(roi_attention(noise), mask))

shaped = 4.0 * (mask - 0.5) + 0.1 * noise
print("shaped features", ga_loss(roi_attention(shaped), mask))
print("linear variant ", ga_loss(roi_attention(shaped, efficient=True), mask))

# Multi-channel grids use C x C projections; the output keeps the grid shape.

feats = rng.normal(size=(7, 7, 4))
wq, wk, wv = (rng.normal(scale=0.5, size=(4, 4)) for _ in range(3))
print(roi_attention(feats, wq, wk, wv).shape)
