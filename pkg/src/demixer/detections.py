"""Detection sidecar parsing and source-box selection.

The sidecar is a UTF-8 JSON document::

    { "images": [ { "file": "<relative path>", "width": W, "height": H,
                    "detections": [ { "x": int, "y": int, "w": int, "h": int,
                                      "score": float, "class": "<string>" }, ... ] }, ... ] }

Coordinates are integer pixels, top-left origin, y increasing downward.
Boxes overhanging the image are clipped at parse time and dropped if
nothing remains; an image absent from the file behaves exactly like one
with zero detections. Parsing happens once at pipeline start and the
resulting map is read-only afterwards.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .geometry import ImageDims, PixelBox

SELECT_MODES = ("max-score", "max-area", "random-above-threshold")
DEFAULT_SCORE_THRESHOLD = 0.7


class SidecarError(ValueError):
    """Base class for sidecar file problems."""


class SidecarParseError(SidecarError):
    """Document is not well-formed; carries the byte offset of the fault."""

    def __init__(self, message: str, byte_offset: int) -> None:
        super().__init__(f"{message} (byte offset {byte_offset})")
        self.byte_offset = byte_offset


class SidecarValidationError(SidecarError):
    """Document is well-formed but a record violates the schema."""


@dataclass(frozen=True)
class ScoredBox:
    box: PixelBox
    score: float
    class_tag: str = ""


@dataclass(frozen=True)
class DetectionSet:
    image_key: str
    dims: ImageDims
    boxes: tuple[ScoredBox, ...] = ()


@dataclass(frozen=True)
class BoxSelectPolicy:
    mode: str = "max-score"
    threshold: float = DEFAULT_SCORE_THRESHOLD

    def __post_init__(self) -> None:
        if self.mode not in SELECT_MODES:
            raise ValueError(f"unknown box-select mode {self.mode!r}, expected one of {SELECT_MODES}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0, 1], got {self.threshold}")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise SidecarValidationError(message)


def _is_int(value: object) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _clip_box(x: int, y: int, w: int, h: int, dims: ImageDims) -> PixelBox | None:
    """Intersect [x, x+w) x [y, y+h) with the image; None when empty."""
    x0 = max(x, 0)
    y0 = max(y, 0)
    x1 = min(x + w, dims.width)
    y1 = min(y + h, dims.height)
    if x1 - x0 <= 0 or y1 - y0 <= 0:
        return None
    return PixelBox(x0, y0, x1 - x0, y1 - y0)


def parse_sidecar(document: str | bytes) -> dict[str, DetectionSet]:
    """Parse and validate a sidecar document into per-image detection sets."""
    if isinstance(document, bytes):
        try:
            text = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SidecarParseError("invalid UTF-8", exc.start) from exc
    else:
        text = document
    try:
        root = json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise SidecarParseError(f"malformed JSON: {exc.msg}", offset) from exc

    _require(isinstance(root, dict), "top level must be an object")
    _require("images" in root, 'missing top-level "images" list')
    images = root["images"]
    _require(isinstance(images, list), '"images" must be a list')

    result: dict[str, DetectionSet] = {}
    for i, entry in enumerate(images):
        where = f"images[{i}]"
        _require(isinstance(entry, dict), f"{where} must be an object")
        for key in ("file", "width", "height", "detections"):
            _require(key in entry, f"{where} missing {key!r}")
        file_key = entry["file"]
        _require(isinstance(file_key, str) and file_key, f"{where}.file must be a non-empty string")
        _require(file_key not in result, f"{where}: duplicate image entry {file_key!r}")
        _require(_is_int(entry["width"]) and entry["width"] >= 1, f"{where} ({file_key}): width must be an integer >= 1")
        _require(_is_int(entry["height"]) and entry["height"] >= 1, f"{where} ({file_key}): height must be an integer >= 1")
        dims = ImageDims(entry["width"], entry["height"])
        dets = entry["detections"]
        _require(isinstance(dets, list), f"{where} ({file_key}): detections must be a list")

        boxes: list[ScoredBox] = []
        for j, det in enumerate(dets):
            record = f"{where}.detections[{j}] ({file_key})"
            _require(isinstance(det, dict), f"{record} must be an object")
            for key in ("x", "y", "w", "h", "score"):
                _require(key in det, f"{record} missing {key!r}")
            for key in ("x", "y", "w", "h"):
                _require(_is_int(det[key]), f"{record}: {key} must be an integer")
            _require(det["w"] >= 0 and det["h"] >= 0, f"{record}: negative extent {det['w']}x{det['h']}")
            score = det["score"]
            _require(
                isinstance(score, (int, float)) and not isinstance(score, bool) and math.isfinite(score),
                f"{record}: score must be a finite number",
            )
            _require(0.0 <= score <= 1.0, f"{record}: score {score} outside [0, 1]")
            class_tag = det.get("class", "")
            _require(isinstance(class_tag, str), f"{record}: class must be a string")
            clipped = _clip_box(det["x"], det["y"], det["w"], det["h"], dims)
            if clipped is not None:
                boxes.append(ScoredBox(clipped, float(score), class_tag))
        result[file_key] = DetectionSet(file_key, dims, tuple(boxes))
    return result


def serialize_sidecar(sets: list[DetectionSet] | tuple[DetectionSet, ...]) -> str:
    """Emit the sidecar schema; parse(serialize(parse(x))) is a fixed point."""
    images = []
    for ds in sets:
        images.append(
            {
                "file": ds.image_key,
                "width": ds.dims.width,
                "height": ds.dims.height,
                "detections": [
                    {
                        "x": sb.box.x0,
                        "y": sb.box.y0,
                        "w": sb.box.w,
                        "h": sb.box.h,
                        "score": sb.score,
                        "class": sb.class_tag,
                    }
                    for sb in ds.boxes
                ],
            }
        )
    return json.dumps({"images": images}, indent=2) + "\n"


def select_box(dets: DetectionSet, policy: BoxSelectPolicy, u: float = 0.0) -> ScoredBox | None:
    """Pick the detection that defines the source patch, or None.

    Candidates are boxes with score >= threshold; an empty candidate set
    returns None, which downstream triggers the plain-CutMix fallback.
    max-score and max-area are deterministic with ties broken by lowest
    list index; random-above-threshold picks index floor(u * count).
    """
    candidates = [sb for sb in dets.boxes if sb.score >= policy.threshold]
    if not candidates:
        return None
    if policy.mode == "max-score":
        best = candidates[0]
        for sb in candidates[1:]:
            if sb.score > best.score:
                best = sb
        return best
    if policy.mode == "max-area":
        best = candidates[0]
        for sb in candidates[1:]:
            if sb.box.area > best.box.area:
                best = sb
        return best
    # random-above-threshold
    if not 0.0 <= u < 1.0:
        raise ValueError(f"selection variate must be in [0, 1), got {u}")
    return candidates[min(int(u * len(candidates)), len(candidates) - 1)]
