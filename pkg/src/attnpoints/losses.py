"""Box-point, guided-attention and reference regression losses.

The box-point kernel smooths the triangle-partition containment test: with
``e = (sum of edge-triangle areas - box area) / box area`` it evaluates
``2 / (1 + exp(k * e))``. ``e`` is zero on the closed box and positive
outside, so the kernel is exactly 1 inside and decays towards 0 with distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    CONTAINMENT_RTOL,
    _cross,
    _scalar,
    as_vertices,
    edge_triangle_areas,
    rotated_iou,
    signed_area,
)

BCE_EPS = 1e-7
DEFAULT_K = 10.0
DEFAULT_NUM_POINTS = 8


@dataclass(frozen=True)
class KernelConfig:
    k: float = DEFAULT_K

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k > 0):
            raise ValueError(f"kernel sharpness k must be finite and positive, got {self.k}")


def _as_cfg(cfg) -> KernelConfig:
    if cfg is None:
        return KernelConfig()
    if isinstance(cfg, KernelConfig):
        return cfg
    return KernelConfig(float(cfg))


def _excess_and_area(p, box):
    v = as_vertices(box)
    area = np.abs(signed_area(v))
    scale = np.ptp(v, axis=-2).max(axis=-1)
    if np.any(area <= 1e-12 * np.maximum(scale, 1.0) ** 2):
        raise ValueError("degenerate box: area is zero")
    total = edge_triangle_areas(p, v).sum(axis=-1)
    excess = (total - area) / area
    # Interior partition noise is folded onto the boundary.
    excess = np.where(excess <= CONTAINMENT_RTOL, 0.0, excess)
    return v, area, excess


def _kernel(excess, k):
    # 2 / (1 + exp(k e)), written to stay finite for large k e
    return 2.0 * np.exp(-np.logaddexp(0.0, k * excess))


def soft_contains(p, box, cfg=None):
    """Smooth containment score in (0, 1]; exactly 1 on the closed box.

    ``cfg`` is a :class:`KernelConfig` or a bare ``k``. Broadcasts over
    points ``(..., 2)`` and boxes ``(..., 4, 2)``.
    """
    k = _as_cfg(cfg).k
    _, _, excess = _excess_and_area(p, box)
    return _scalar(_kernel(excess, k))


def soft_contains_grad(p, box, cfg=None) -> np.ndarray:
    """Analytic gradient of :func:`soft_contains` with respect to ``p``.

    Zero on the closed box. On an edge's supporting line that edge's term is
    non-smooth and contributes zero.
    """
    k = _as_cfg(cfg).k
    p = np.asarray(p, dtype=float)
    v, area, excess = _excess_and_area(p, box)
    d = np.roll(v, -1, axis=-2) - v
    c = _cross(v - p[..., None, :], np.roll(v, -1, axis=-2) - p[..., None, :])
    sgn = np.sign(c)[..., None]
    # d|c_i|/dp = sign(c_i) * (-d_y, d_x)
    dcdp = np.stack([-d[..., 1], d[..., 0]], axis=-1)
    dsum = 0.5 * (sgn * dcdp).sum(axis=-2)
    sig = np.exp(-np.logaddexp(0.0, k * excess))  # sigmoid(-k e)
    dkernel = -2.0 * k * sig * (1.0 - sig)
    outside = (excess > 0)[..., None]
    grad = np.where(outside, (dkernel / area)[..., None] * dsum, 0.0)
    return grad


def _points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"box points must have shape (N, 2), got {pts.shape}")
    if len(pts) == 0:
        raise ValueError("box-point set is empty")
    if not np.all(np.isfinite(pts)):
        raise ValueError("box points must be finite")
    return pts


def bp_loss(points, target, cfg=None) -> float:
    """One minus the mean kernel score of the box-points against ``target``."""
    pts = _points(points)
    return float(1.0 - np.mean(soft_contains(pts, target, cfg)))


def bp_loss_grad(points, target, cfg=None) -> np.ndarray:
    """Per-point gradient of :func:`bp_loss`, shape ``(N, 2)``."""
    pts = _points(points)
    return -soft_contains_grad(pts, target, cfg) / len(pts)


def ga_loss(features, mask, eps: float = BCE_EPS) -> float:
    """Binary cross-entropy between attention features and a binary mask.

    Features are clamped to ``[eps, 1 - eps]`` before taking logs.
    """
    x = np.asarray(features, dtype=float)
    y = np.asarray(mask, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"feature shape {x.shape} does not match mask shape {y.shape}")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("mask entries must be 0 or 1")
    x = np.clip(x, eps, 1.0 - eps)
    bce = -(y * np.log(x) + (1.0 - y) * np.log1p(-x))
    return float(bce.mean())


def smooth_l1(x, y):
    """Huber-style loss: quadratic below unit error, linear above."""
    diff = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
    return _scalar(np.where(diff < 1.0, 0.5 * diff**2, diff - 0.5))


def iou_loss(a, b) -> float:
    return 1.0 - rotated_iou(a, b)
