"""Command-line entry point.

Exit status: 0 on success, 1 on data errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import dota
from .evaluation import COCO_THRESHOLDS, METRICS, evaluate
from .fitting import FitConfig, fit_points
from .geometry import BoxParams
from .losses import DEFAULT_K, DEFAULT_NUM_POINTS, KernelConfig, bp_loss, soft_contains
from .masks import mask_for_roi, render_mask


class DataError(Exception):
    pass


def _g(x) -> str:
    return f"{x:.6g}"


def _floats(text, n, what):
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what}: expected {n} comma-separated numbers") from None
    if len(vals) != n or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"{what}: expected {n} comma-separated finite numbers")
    return vals


def box_params(text):
    return _floats(text, 5, "box")


def grid_size(text):
    h, w = _floats(text, 2, "size")
    if h != int(h) or w != int(w) or h < 1 or w < 1:
        raise argparse.ArgumentTypeError("size: expected two positive integers h,w")
    return int(h), int(w)


def _bounded(kind, lo, lo_open=False):
    def parse(text):
        try:
            val = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid {kind.__name__} value: {text!r}") from None
        if (kind is float and not math.isfinite(val)) or val < lo or (lo_open and val == lo):
            op = ">" if lo_open else ">="
            raise argparse.ArgumentTypeError(f"value must be {op} {lo}, got {text}")
        return val
    return parse


def iou_list(text):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok == "0.5:0.95":
            out.extend(COCO_THRESHOLDS)
            continue
        try:
            t = float(tok)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid IoU threshold {tok!r}") from None
        if not 0 < t < 1:
            raise argparse.ArgumentTypeError(f"IoU threshold must lie in (0, 1), got {tok}")
        out.append(t)
    return out


def _box(vals, degrees):
    cx, cy, w, h, theta = vals
    if degrees:
        theta = math.radians(theta)
    try:
        return BoxParams(cx, cy, w, h, theta).to_box()
    except ValueError as exc:
        raise DataError(str(exc)) from None


def cmd_eval(args, out):
    try:
        gts = dota.load_annotation_dir(args.gt)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            dets = dota.load_detection_dir(args.dets)
    except (FileNotFoundError, dota.DotaFormatError) as exc:
        raise DataError(str(exc)) from None
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if not dets:
        print(f"warning: no detections found in {args.dets}", file=sys.stderr)
    try:
        report = evaluate(dets, gts, args.iou, args.metric)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    print(report.format_table(), file=out)
    for t in report.thresholds:
        print(f"mAP@{t:.2f} {report.mAP[t]:.4f}", file=out)
    if args.out:
        Path(args.out).write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")


def cmd_fit(args, out):
    target = _box(args.target, args.degrees)
    cfg = FitConfig(n_points=args.n, k=args.k, step_size=args.lr, max_iters=args.iters,
                    seed=args.seed)
    trace = fit_points(target, cfg)
    initial = bp_loss(trace.initial_points, target, cfg.k)
    print(f"initial_loss {_g(initial)}", file=out)
    print(f"final_loss {_g(trace.final_loss)}", file=out)
    print(f"iterations {len(trace.losses)}", file=out)
    print(f"converged {str(trace.converged).lower()}", file=out)
    print("points", file=out)
    for x, y in trace.points:
        print(f"{_g(x)},{_g(y)}", file=out)
    if args.trace:
        Path(args.trace).write_text(trace.to_csv(), encoding="utf-8")


def kernel_grid(box, n, k):
    """Sample points and kernel values over the padded bounding window of ``box``.

    The window is the box's axis-aligned bounds grown by its own width and
    height on every side.
    """
    v = box.vertices
    lo, hi = v.min(axis=0), v.max(axis=0)
    span = hi - lo
    xs = np.linspace(lo[0] - span[0], hi[0] + span[0], n)
    ys = np.linspace(lo[1] - span[1], hi[1] + span[1], n)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.stack([gx, gy], axis=-1)
    return pts, soft_contains(pts, box, KernelConfig(k))


def cmd_kernel(args, out):
    box = _box(args.box, args.degrees)
    pts, vals = kernel_grid(box, args.grid, args.k)
    print("x,y,value", file=out)
    for (x, y), val in zip(pts.reshape(-1, 2), vals.ravel()):
        print(f"{_g(x)},{_g(y)},{_g(val)}", file=out)


def cmd_rasterize(args, out):
    gt = _box(args.gt, args.degrees)
    roi = _box(args.roi, args.degrees)
    print(render_mask(mask_for_roi(gt, roi, args.size)), file=out)


def cmd_tile(args, out):
    plan = dota.plan_tiles(args.width, args.height, args.window, args.stride)
    out.write(plan.to_text(args.image_id))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="attnpoints", description="Box-point losses, masks and rotated-box evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_degrees(p):
        p.add_argument("--degrees", action="store_true",
                       help="read box angles in degrees instead of radians")

    p = sub.add_parser("eval", help="VOC-style mAP of DOTA detections")
    p.add_argument("--gt", required=True, help="directory of <image_id>.txt annotations")
    p.add_argument("--dets", required=True, help="directory of <class_id>.txt detections")
    p.add_argument("--metric", choices=METRICS, default="voc07")
    p.add_argument("--iou", type=iou_list, default=[0.5],
                   help="comma-separated thresholds; '0.5:0.95' expands to ten")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("fit", help="descend the box-point loss into a target box")
    p.add_argument("--target", type=box_params, required=True, metavar="CX,CY,W,H,THETA")
    p.add_argument("--n", type=_bounded(int, 1), default=DEFAULT_NUM_POINTS)
    p.add_argument("--k", type=_bounded(float, 0, lo_open=True), default=DEFAULT_K)
    p.add_argument("--lr", type=_bounded(float, 0), default=None,
                   help="step length in pixels (default 0.1 x target diagonal)")
    p.add_argument("--iters", type=_bounded(int, 0), default=2000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trace", help="write iteration,loss CSV here")
    add_degrees(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("kernel", help="CSV grid of smooth containment values")
    p.add_argument("--box", type=box_params, required=True, metavar="CX,CY,W,H,THETA")
    p.add_argument("--grid", type=_bounded(int, 2), default=21)
    p.add_argument("--k", type=_bounded(float, 0, lo_open=True), default=DEFAULT_K)
    add_degrees(p)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("rasterize", help="text mask of a box sampled in a RoI")
    p.add_argument("--gt", type=box_params, required=True, metavar="CX,CY,W,H,THETA")
    p.add_argument("--roi", type=box_params, required=True, metavar="CX,CY,W,H,THETA")
    p.add_argument("--size", type=grid_size, default=(7, 7), metavar="H,W")
    add_degrees(p)
    p.set_defaults(func=cmd_rasterize)

    p = sub.add_parser("tile", help="sliding-window crop plan")
    p.add_argument("--width", type=_bounded(int, 1), required=True)
    p.add_argument("--height", type=_bounded(int, 1), required=True)
    p.add_argument("--window", type=_bounded(int, 1), default=dota.DEFAULT_WINDOW)
    p.add_argument("--stride", type=_bounded(int, 1), default=dota.DEFAULT_STRIDE)
    p.add_argument("--image-id", default="image")
    p.set_defaults(func=cmd_tile)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "tile" and args.stride > args.window:
        parser.error(f"--stride {args.stride} exceeds --window {args.window}")
    try:
        args.func(args, out)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
