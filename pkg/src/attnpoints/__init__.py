"""Geometry and losses for box-point and guided-attention training of
oriented object detectors, plus rotated-box mAP evaluation."""

from .attention import (
    activate_logistic,
    efficient_attention,
    roi_attention,
    self_attention,
    softmax_rows,
)
from .dota import (
    AnnotationFile,
    DotaFormatError,
    TilePlan,
    clip_record_to_tile,
    parse_annotation,
    parse_detections,
    plan_tiles,
    serialize_annotation,
    serialize_detections,
)
from .evaluation import (
    DetectionRecord,
    EvalReport,
    GroundTruthRecord,
    PrecisionRecallCurve,
    ap_voc07,
    ap_voc12,
    evaluate,
    match_detections,
    mean_ap,
    pr_curve,
)
from .fitting import FitConfig, FitTrace, fit_points
from .geometry import (
    BoxParams,
    OrientedBox,
    box_area,
    contains_exact,
    convex_intersection,
    edge_triangle_areas,
    rotated_iou,
    triangle_area,
)
from .losses import (
    KernelConfig,
    bp_loss,
    bp_loss_grad,
    ga_loss,
    iou_loss,
    smooth_l1,
    soft_contains,
    soft_contains_grad,
)
from .masks import MaskSpec, mask_for_roi, rasterize_box, render_mask

__version__ = "0.1.0"
