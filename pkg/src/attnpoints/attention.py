"""Reference self-attention over RoI feature grids.

Matrices are plain 2-D numpy arrays. Feature grids are ``(H, W)`` or
``(H, W, C)`` arrays; each cell becomes one token.
"""

from __future__ import annotations

import numpy as np

ROI_SHAPE = (7, 7)


def _matrix(m, name) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    return m


def softmax_rows(m) -> np.ndarray:
    """Row-wise softmax, stabilized by subtracting each row's maximum."""
    m = _matrix(m, "matrix")
    z = np.exp(m - m.max(axis=1, keepdims=True))
    return z / z.sum(axis=1, keepdims=True)


def _check_qkv(q, k, v):
    q, k, v = _matrix(q, "q"), _matrix(k, "k"), _matrix(v, "v")
    if q.shape[1] != k.shape[1]:
        raise ValueError(f"q and k need equal widths, got {q.shape[1]} and {k.shape[1]}")
    if k.shape[0] != v.shape[0]:
        raise ValueError(f"k and v need equal row counts, got {k.shape[0]} and {v.shape[0]}")
    return q, k, v


def self_attention(q, k, v) -> np.ndarray:
    """``softmax(q k^T / sqrt(d_k)) v``."""
    q, k, v = _check_qkv(q, k, v)
    scores = q @ k.T / np.sqrt(q.shape[1])
    return softmax_rows(scores) @ v


def efficient_attention(q, k, v) -> np.ndarray:
    """Linear-cost factorization ``softmax_rows(q) @ (softmax_cols(k)^T @ v)``.

    The ``n x n`` score matrix is never formed; the keys are first aggregated
    with the values into a ``d_k x d_v`` context. Not numerically equal to
    :func:`self_attention` in general, but agrees on single-token and
    uniform-weight inputs.
    """
    q, k, v = _check_qkv(q, k, v)
    context = softmax_rows(k.T) @ v
    return softmax_rows(q) @ context


def activate_logistic(g) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    return np.exp(-np.logaddexp(0.0, -g))


def roi_attention(roi, wq=None, wk=None, wv=None, *, efficient=False,
                  shape=None) -> np.ndarray:
    """Attention features for one RoI grid, squashed to (0, 1).

    The grid is flattened to ``H*W`` tokens of ``C`` channels (``C = 1`` for a
    2-D grid), projected by ``wq``, ``wk``, ``wv`` (``C x C``, identity when
    omitted), attended, reshaped back and passed through the logistic.
    If ``shape`` is given the grid's spatial shape must match it.
    """
    roi = np.asarray(roi, dtype=float)
    if roi.ndim not in (2, 3):
        raise ValueError(f"RoI grid must be (H, W) or (H, W, C), got {roi.shape}")
    if shape is not None and tuple(roi.shape[:2]) != tuple(shape):
        raise ValueError(f"RoI grid is {roi.shape[:2]}, configured for {tuple(shape)}")
    if not np.all(np.isfinite(roi)):
        raise ValueError("RoI features must be finite")
    tokens = roi.reshape(roi.shape[0] * roi.shape[1], -1)
    c = tokens.shape[1]
    proj = []
    for name, w in (("wq", wq), ("wk", wk), ("wv", wv)):
        w = np.eye(c) if w is None else _matrix(w, name)
        if w.shape[0] != c or w.shape[1] != c:
            raise ValueError(f"{name} must be {c}x{c}, got {w.shape}")
        proj.append(tokens @ w)
    attend = efficient_attention if efficient else self_attention
    out = attend(*proj)
    return activate_logistic(out.reshape(roi.shape))
