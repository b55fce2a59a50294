"""DOTA-format annotation/detection text files and large-image tiling.

Annotation lines::

    x1 y1 x2 y2 x3 y3 x4 y4 class difficulty

Detection files hold one class each, with lines::

    image_id score x1 y1 x2 y2 x3 y3 x4 y4
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .evaluation import DetectionRecord, GroundTruthRecord
from .geometry import OrientedBox, intersection_area

HEADER_PREFIXES = ("imagesource:", "gsd:")
DEFAULT_WINDOW = 1024
DEFAULT_STRIDE = 524
DEFAULT_MIN_VISIBLE = 0.1


class DotaFormatError(ValueError):
    """Malformed annotation or detection text; carries the 1-based line number."""

    def __init__(self, message, lineno=None, path=None):
        self.lineno = lineno
        self.path = path
        if path is not None and lineno is not None:
            message = f"{path}:{lineno}: {message}"
        elif lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class AnnotationFile:
    image_id: str
    records: tuple[GroundTruthRecord, ...]


def _is_header(line: str) -> bool:
    first = line.split(None, 1)[0]
    if line.startswith(HEADER_PREFIXES):
        return True
    # any other "key:value" token is treated as an unknown header
    return ":" in first


def _parse_quad(tokens, lineno, path):
    try:
        coords = [float(t) for t in tokens]
    except ValueError:
        raise DotaFormatError(f"non-numeric coordinate in {tokens}", lineno, path) from None
    pts = np.array(coords).reshape(4, 2)
    if not np.all(np.isfinite(pts)):
        raise DotaFormatError("non-finite coordinate", lineno, path)
    if len({tuple(p) for p in pts}) < 4:
        raise DotaFormatError("degenerate box: fewer than 4 distinct vertices", lineno, path)
    try:
        return OrientedBox(pts)
    except ValueError as exc:
        raise DotaFormatError(f"degenerate box: {exc}", lineno, path) from None


def parse_annotation(text: str, image_id: str = "image", path=None) -> AnnotationFile:
    """Parse one image's annotation text into ground-truth records."""
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or _is_header(line):
            continue
        tokens = line.split()
        if len(tokens) != 10:
            raise DotaFormatError(
                f"expected 10 fields (8 coordinates, class, difficulty), got {len(tokens)}",
                lineno, path)
        box = _parse_quad(tokens[:8], lineno, path)
        if tokens[9] not in ("0", "1"):
            raise DotaFormatError(f"difficulty must be 0 or 1, got {tokens[9]!r}", lineno, path)
        records.append(GroundTruthRecord(image_id, tokens[8], box, tokens[9] == "1"))
    return AnnotationFile(image_id, tuple(records))


def _fmt(x) -> str:
    return repr(float(x))


def _quad_tokens(box: OrientedBox) -> str:
    return " ".join(_fmt(c) for c in box.vertices.ravel())


def serialize_annotation(ann: AnnotationFile) -> str:
    lines = [f"{_quad_tokens(r.box)} {r.class_id} {int(r.difficult)}" for r in ann.records]
    return "".join(line + "\n" for line in lines)


def parse_detections(text: str, class_id: str, path=None) -> list[DetectionRecord]:
    """Parse one class's detection file; out-of-range scores are clamped with a warning."""
    dets = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 10:
            raise DotaFormatError(
                f"expected 10 fields (image, score, 8 coordinates), got {len(tokens)}",
                lineno, path)
        try:
            score = float(tokens[1])
        except ValueError:
            raise DotaFormatError(f"non-numeric score {tokens[1]!r}", lineno, path) from None
        if not math.isfinite(score):
            raise DotaFormatError(f"non-finite score {tokens[1]!r}", lineno, path)
        if not 0.0 <= score <= 1.0:
            clamped = min(max(score, 0.0), 1.0)
            where = f"{path}:{lineno}" if path is not None else f"line {lineno}"
            warnings.warn(f"{where}: score {score} clamped to {clamped}", stacklevel=2)
            score = clamped
        box = _parse_quad(tokens[2:], lineno, path)
        dets.append(DetectionRecord(tokens[0], class_id, box, score))
    return dets


def serialize_detections(dets) -> str:
    return "".join(f"{d.image_id} {_fmt(d.score)} {_quad_tokens(d.box)}\n" for d in dets)


def load_annotation_dir(directory) -> list[GroundTruthRecord]:
    """Read every ``<image_id>.txt`` in a directory, ordered by image id."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"annotation directory not found: {directory}")
    records = []
    for path in sorted(directory.glob("*.txt")):
        text = path.read_text(encoding="utf-8")
        records.extend(parse_annotation(text, path.stem, path=path).records)
    return records


def load_detection_dir(directory) -> list[DetectionRecord]:
    """Read every ``<class_id>.txt`` (optionally ``Task1_<class_id>.txt``)."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"detection directory not found: {directory}")
    dets = []
    for path in sorted(directory.glob("*.txt")):
        class_id = path.stem.removeprefix("Task1_")
        dets.extend(parse_detections(path.read_text(encoding="utf-8"), class_id, path=path))
    return dets


@dataclass(frozen=True)
class TilePlan:
    """Windows are ``(x, y, w, h)`` in image pixels."""

    image_w: int
    image_h: int
    window: int
    stride: int
    windows: tuple[tuple[int, int, int, int], ...]

    def __len__(self):
        return len(self.windows)

    def to_text(self, image_id: str = "image") -> str:
        return "".join(f"{image_id} {x} {y} {w} {h}\n" for x, y, w, h in self.windows)


def tile_offsets(size: int, window: int, stride: int) -> list[int]:
    """Window start offsets along one axis; the last window ends at the edge."""
    if size <= window:
        return [0]
    return list(range(0, size - window, stride)) + [size - window]


def tile_count(size: int, window: int, stride: int) -> int:
    return 1 if size <= window else math.ceil((size - window) / stride) + 1


def plan_tiles(image_w: int, image_h: int, window: int = DEFAULT_WINDOW,
               stride: int = DEFAULT_STRIDE) -> TilePlan:
    """Sliding-window crop plan; images smaller than a window get one clamped window."""
    if image_w < 1 or image_h < 1:
        raise ValueError("image dimensions must be positive")
    if window < 1 or not 1 <= stride <= window:
        raise ValueError(f"need window >= 1 and 1 <= stride <= window, got {window}, {stride}")
    tw, th = min(window, image_w), min(window, image_h)
    windows = tuple((x, y, tw, th)
                    for y in tile_offsets(image_h, window, stride)
                    for x in tile_offsets(image_w, window, stride))
    return TilePlan(image_w, image_h, window, stride, windows)


def clip_record_to_tile(record: GroundTruthRecord, tile,
                        min_visible: float = DEFAULT_MIN_VISIBLE):
    """Move a record into a tile's frame, or return None if too little is visible.

    Boxes cut by the tile border keep their full geometry (translated) and are
    flagged difficult.
    """
    x, y, w, h = tile
    rect = OrientedBox([[x, y], [x + w, y], [x + w, y + h], [x, y + h]])
    visible = intersection_area(record.box, rect) / record.box.area
    if visible < min_visible or visible <= 0.0:
        return None
    clipped = visible < 1.0 - 1e-9
    return replace(record, box=record.box.translated(-x, -y),
                   difficult=record.difficult or clipped)

