"""Drive a free point set into a target box by descending the box-point loss."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .geometry import OrientedBox, contains_exact
from .losses import DEFAULT_K, DEFAULT_NUM_POINTS, KernelConfig, bp_loss, bp_loss_grad


@dataclass(frozen=True)
class FitConfig:
    """Descent settings.

    ``step_size`` is a displacement length in pixels (default ``0.1`` times the
    target diagonal). With ``normalize`` each point moves ``step_size`` along
    its own descent direction; otherwise the raw gradient is scaled by
    ``step_size``. The step shrinks by ``decay`` every iteration.
    """

    n_points: int = DEFAULT_NUM_POINTS
    k: float = DEFAULT_K
    step_size: float | None = None
    max_iters: int = 2000
    seed: int = 42
    tolerance: float = 0.05
    decay: float = 0.99
    normalize: bool = True

    def __post_init__(self):
        if self.n_points < 1:
            raise ValueError("n_points must be at least 1")
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")
        if self.step_size is not None and self.step_size < 0:
            raise ValueError("step_size must be non-negative")
        if not 0 < self.tolerance < 1:
            raise ValueError("tolerance must lie in (0, 1)")
        if not 0 < self.decay <= 1:
            raise ValueError("decay must lie in (0, 1]")
        KernelConfig(self.k)


@dataclass
class FitTrace:
    losses: list[float]
    points: np.ndarray
    final_loss: float
    converged: bool
    initial_points: np.ndarray = field(repr=False, default=None)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["iteration", "loss"])
        for i, loss in enumerate(self.losses):
            writer.writerow([i, f"{loss:.6g}"])
        return buf.getvalue()


def init_points(target: OrientedBox, n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform samples in the annulus between 1x and 3x the target circumradius."""
    r0 = target.circumradius
    radius = np.sqrt(rng.uniform(r0**2, (3 * r0) ** 2, size=n))
    angle = rng.uniform(0.0, 2 * np.pi, size=n)
    return target.center + radius[:, None] * np.stack([np.cos(angle), np.sin(angle)], axis=1)


def _rng(seed: int) -> np.random.Generator:
    # numpy refuses negative seeds; give them their own entropy pool
    seed = int(seed)
    return np.random.default_rng(seed if seed >= 0 else [-seed, 1])


def _done(points, target, loss, tol):
    # loss alone can dip under tol with a point still outside
    return loss <= tol and bool(np.all(contains_exact(points, target)))


def fit_points(target, cfg: FitConfig | None = None, points=None) -> FitTrace:
    """Gradient descent of the box-point loss from a seeded annulus start.

    ``losses[i]`` is the loss before update ``i``. Stops once the loss is at
    most ``cfg.tolerance`` with every point inside the target, or after
    ``cfg.max_iters`` updates. Passing ``points`` skips the random start.
    """
    cfg = cfg or FitConfig()
    if not isinstance(target, OrientedBox):
        target = OrientedBox(target)
    kcfg = KernelConfig(cfg.k)
    step = 0.1 * target.diagonal if cfg.step_size is None else float(cfg.step_size)
    if points is None:
        p = init_points(target, cfg.n_points, _rng(cfg.seed))
    else:
        p = np.array(points, dtype=float).reshape(-1, 2)
    start = p.copy()

    losses = []
    converged = False
    for _ in range(cfg.max_iters):
        loss = bp_loss(p, target, kcfg)
        losses.append(loss)
        if _done(p, target, loss, cfg.tolerance):
            converged = True
            break
        grad = bp_loss_grad(p, target, kcfg)
        if cfg.normalize:
            norm = np.hypot(grad[:, 0], grad[:, 1])[:, None]
            grad = np.divide(grad, norm, out=np.zeros_like(grad), where=norm > 0)
        p = p - step * grad
        step *= cfg.decay
    final = bp_loss(p, target, kcfg)
    if not converged and cfg.max_iters > 0:
        converged = _done(p, target, final, cfg.tolerance)
    return FitTrace(losses, p, final, converged, start)
