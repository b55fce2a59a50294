"""Rotated-box detection scoring with VOC07 / VOC12 average precision."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .geometry import OrientedBox, rotated_iou

TP, FP, IGNORED = 1, 0, -1
METRICS = ("voc07", "voc12")
COCO_THRESHOLDS = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))


@dataclass(frozen=True)
class GroundTruthRecord:
    image_id: str
    class_id: str
    box: OrientedBox
    difficult: bool = False

    def __post_init__(self):
        if not self.image_id or not self.class_id:
            raise ValueError("image and class identifiers must be non-empty")
        if not isinstance(self.box, OrientedBox):
            object.__setattr__(self, "box", OrientedBox(self.box))
        object.__setattr__(self, "difficult", bool(self.difficult))


@dataclass(frozen=True)
class DetectionRecord:
    """A scored detection; the score is clamped to ``[0, 1]``."""

    image_id: str
    class_id: str
    box: OrientedBox
    score: float

    def __post_init__(self):
        if not self.image_id or not self.class_id:
            raise ValueError("image and class identifiers must be non-empty")
        if not isinstance(self.box, OrientedBox):
            object.__setattr__(self, "box", OrientedBox(self.box))
        if not math.isfinite(self.score):
            raise ValueError(f"detection score must be finite, got {self.score}")
        object.__setattr__(self, "score", min(max(float(self.score), 0.0), 1.0))


@dataclass(frozen=True)
class PrecisionRecallCurve:
    recall: np.ndarray
    precision: np.ndarray

    def __len__(self):
        return len(self.recall)

    def points(self) -> list[tuple[float, float]]:
        return [(float(r), float(p)) for r, p in zip(self.recall, self.precision)]

    @classmethod
    def from_points(cls, points) -> "PrecisionRecallCurve":
        pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
        return cls(pts[:, 0], pts[:, 1])


def score_order(scores) -> np.ndarray:
    """Indices by descending score; ties keep input order."""
    return np.argsort(-np.asarray(scores, dtype=float), kind="stable")


def match_detections(dets, gts, iou_threshold: float) -> np.ndarray:
    """Greedy TP/FP assignment for one class.

    Detections are visited by descending score. Each takes the
    highest-IoU ground truth in its image that is still free (difficult
    boxes are never used up). IoU at or above the threshold makes it a TP,
    or IGNORED when that ground truth is difficult; otherwise it is a FP.
    The returned flags are aligned with the input order of ``dets``.
    """
    if not 0.0 < iou_threshold < 1.0:
        raise ValueError(f"IoU threshold must lie in (0, 1), got {iou_threshold}")
    by_image = defaultdict(list)
    for g in gts:
        by_image[g.image_id].append(g)
    used = {img: np.zeros(len(lst), dtype=bool) for img, lst in by_image.items()}
    flags = np.full(len(dets), FP, dtype=np.int8)
    for i in score_order([d.score for d in dets]):
        det = dets[i]
        cands = by_image.get(det.image_id, [])
        best, best_iou = -1, -1.0
        for j, g in enumerate(cands):
            if used[det.image_id][j] and not g.difficult:
                continue
            iou = rotated_iou(det.box, g.box)
            if iou > best_iou:
                best, best_iou = j, iou
        if best >= 0 and best_iou >= iou_threshold:
            if cands[best].difficult:
                flags[i] = IGNORED
            else:
                flags[i] = TP
                used[det.image_id][best] = True
    return flags


def pr_curve(flags, num_gt: int) -> PrecisionRecallCurve:
    """Cumulative precision/recall over score-ordered TP (truthy) / FP flags."""
    tp_flags = np.asarray(flags, dtype=bool)
    if num_gt < 0:
        raise ValueError("num_gt must be non-negative")
    tp = np.cumsum(tp_flags)
    fp = np.cumsum(~tp_flags)
    if num_gt == 0:
        if tp.size and tp[-1] > 0:
            raise ValueError("true positives reported with zero ground truths")
        recall = np.zeros(tp.shape)
    else:
        recall = tp / num_gt
    precision = tp / np.maximum(tp + fp, 1)
    return PrecisionRecallCurve(recall.astype(float), precision.astype(float))


def _as_curve(curve) -> PrecisionRecallCurve:
    if isinstance(curve, PrecisionRecallCurve):
        return curve
    return PrecisionRecallCurve.from_points(curve)


def ap_voc07(curve) -> float:
    """11-point interpolated AP: mean max precision at recall >= 0, 0.1, ..., 1."""
    c = _as_curve(curve)
    if len(c) == 0:
        return 0.0
    total = 0.0
    for t in np.arange(11) / 10:
        reach = c.recall >= t
        total += c.precision[reach].max() if reach.any() else 0.0
    return float(total / 11)


def ap_voc12(curve) -> float:
    """Area under the monotone precision envelope (all-point interpolation)."""
    c = _as_curve(curve)
    if len(c) == 0:
        return 0.0
    mrec = np.concatenate([[0.0], c.recall, [1.0]])
    mpre = np.concatenate([[0.0], c.precision, [0.0]])
    mpre = np.maximum.accumulate(mpre[::-1])[::-1]
    steps = np.flatnonzero(mrec[1:] != mrec[:-1])
    return float(np.sum((mrec[steps + 1] - mrec[steps]) * mpre[steps + 1]))


AP_FUNCTIONS = {"voc07": ap_voc07, "voc12": ap_voc12}


def mean_ap(per_class_ap) -> float:
    if not per_class_ap:
        raise ValueError("mean AP needs at least one class")
    return float(np.mean(list(per_class_ap.values())))


@dataclass
class EvalReport:
    metric: str
    thresholds: tuple[float, ...]
    classes: tuple[str, ...]
    num_gt: dict[str, int]
    ap: dict[float, dict[str, float]]
    mAP: dict[float, float]
    # flags[(threshold, class)] is aligned with that class's detections in input order
    flags: dict[tuple[float, str], np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def mean_map(self) -> float:
        """mAP averaged over all evaluated thresholds."""
        return float(np.mean(list(self.mAP.values())))

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "thresholds": list(self.thresholds),
            "classes": list(self.classes),
            "num_gt": dict(self.num_gt),
            "ap": {f"{t:.2f}": dict(v) for t, v in self.ap.items()},
            "mAP": {f"{t:.2f}": v for t, v in self.mAP.items()},
            "mean_mAP": self.mean_map,
        }

    def format_table(self) -> str:
        """One row per threshold, one column per class, mAP last."""
        width = max([8] + [len(c) for c in self.classes])
        head = f"{'IoU':<6}" + "".join(f"{c:>{width + 1}}" for c in self.classes)
        lines = [f"metric: {self.metric}", head + f"{'mAP':>{width + 1}}"]
        for t in self.thresholds:
            row = f"{t:<6.2f}" + "".join(f"{self.ap[t][c]:>{width + 1}.4f}"
                                         for c in self.classes)
            lines.append(row + f"{self.mAP[t]:>{width + 1}.4f}")
        if len(self.thresholds) > 1:
            lines.append(f"mean mAP over {len(self.thresholds)} thresholds: {self.mean_map:.4f}")
        return "\n".join(lines)


def evaluate(dets, gts, iou_thresholds=(0.5,), metric: str = "voc07") -> EvalReport:
    """Per-class AP and mAP at each IoU threshold.

    Classes are those present in the ground truth; detections of other
    classes are ignored. Difficult ground truths do not count towards recall.
    """
    if metric not in AP_FUNCTIONS:
        raise ValueError(f"unknown metric {metric!r}, expected one of {METRICS}")
    ap_fn = AP_FUNCTIONS[metric]
    thresholds = tuple(float(t) for t in iou_thresholds)
    if not thresholds:
        raise ValueError("at least one IoU threshold is required")
    gt_by_cls = defaultdict(list)
    for g in gts:
        gt_by_cls[g.class_id].append(g)
    det_by_cls = defaultdict(list)
    for d in dets:
        det_by_cls[d.class_id].append(d)
    classes = tuple(sorted(gt_by_cls))
    if not classes:
        raise ValueError("no ground-truth classes to evaluate")
    num_gt = {c: sum(not g.difficult for g in gt_by_cls[c]) for c in classes}

    ap, maps, all_flags = {}, {}, {}
    for t in thresholds:
        ap[t] = {}
        for c in classes:
            cdets = det_by_cls.get(c, [])
            flags = match_detections(cdets, gt_by_cls[c], t)
            all_flags[(t, c)] = flags
            ordered = flags[score_order([d.score for d in cdets])] if cdets else flags
            ordered = ordered[ordered != IGNORED]
            if num_gt[c] == 0:
                ap[t][c] = 0.0
                continue
            ap[t][c] = ap_fn(pr_curve(ordered == TP, num_gt[c]))
        maps[t] = mean_ap(ap[t])
    return EvalReport(metric, thresholds, classes, num_gt, ap, maps, all_flags)
