"""Walk an image directory, run a detector, and write a detection sidecar.

The sidecar is the JSON document the demixer augmentation engine reads
(UTF-8, integer pixel coordinates, origin at the top-left corner)::

    { "images": [ { "file": "<relative path>", "width": W, "height": H,
                    "detections": [ { "x": int, "y": int, "w": int, "h": int,
                                      "score": float, "class": "<string>" }, ... ] }, ... ] }

Every emitted box lies fully inside its image and carries a score at or
above the emission floor.  The default floor (0.5) sits below the engine's
default selection threshold (0.7) so the threshold can be tuned on the
engine side without re-running inference.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

from PIL import Image

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp")


@dataclass(frozen=True)
class RawDetection:
    """One detector hit: a corner box in pixel units plus its confidence.

    Corners may be fractional and may overhang the image; conversion to the
    sidecar's integer x/y/w/h form rounds and clamps them.
    """

    x0: float
    y0: float
    x1: float
    y1: float
    score: float
    label: str = ""


@dataclass(frozen=True)
class SidecarJob:
    """Where to read images, where to write the sidecar, and the score floor."""

    images_root: str | Path
    output_path: str | Path
    score_floor: float = 0.5

    def __post_init__(self) -> None:
        if not isinstance(self.score_floor, (int, float)) or isinstance(self.score_floor, bool):
            raise ValueError(f"score_floor must be a number, got {self.score_floor!r}")
        if not 0.0 <= self.score_floor <= 1.0:
            raise ValueError(f"score_floor {self.score_floor} outside [0, 1]")


class Detector(Protocol):
    """Anything that maps a PIL image to a sequence of raw detections."""

    def detect(self, image: Image.Image) -> Sequence[RawDetection]: ...


def _round_half_up(value: float) -> int:
    return math.floor(value + 0.5)


def pixel_box(raw: RawDetection, width: int, height: int) -> dict | None:
    """Convert corner floats to the sidecar's integer box, or None if empty.

    Corners are rounded half-up, clamped into the image, and boxes whose
    clamped extent collapses to zero are dropped.  The score is clamped
    into [0, 1] so float noise from the detector head cannot produce an
    out-of-range value.
    """
    x0 = min(max(_round_half_up(raw.x0), 0), width)
    y0 = min(max(_round_half_up(raw.y0), 0), height)
    x1 = min(max(_round_half_up(raw.x1), 0), width)
    y1 = min(max(_round_half_up(raw.y1), 0), height)
    w = x1 - x0
    h = y1 - y0
    if w <= 0 or h <= 0:
        return None
    return {
        "x": x0,
        "y": y0,
        "w": w,
        "h": h,
        "score": min(max(float(raw.score), 0.0), 1.0),
        "class": raw.label,
    }


def list_images(root: str | Path) -> list[str]:
    """Relative POSIX paths of all images under root, sorted for determinism."""
    root = Path(root)
    found = [
        path.relative_to(root).as_posix()
        for path in root.rglob("*")
        if path.is_file() and path.suffix.lower() in IMAGE_SUFFIXES
    ]
    return sorted(found)


def _load_image(path: Path) -> tuple[Image.Image | None, int, int]:
    """Decode an image, or return header dimensions for an unreadable one."""
    width = height = 1
    try:
        with Image.open(path) as img:
            width, height = img.size
            return img.convert("RGB"), width, height
    except Exception as exc:
        print(f"warning: cannot decode {path}: {exc}", file=sys.stderr)
        return None, width, height


def detect_directory(job: SidecarJob, detector: Detector) -> str:
    """Run the detector over every image under the job root and write the sidecar.

    Images are visited in sorted relative-path order, so the output bytes are
    a pure function of the directory contents and the detector.  Files that
    fail to decode are reported on stderr and still listed, with an empty
    detection list, so the engine's index and the sidecar stay aligned.
    Returns the document text after writing it to ``job.output_path``.
    """
    root = Path(job.images_root)
    if not root.is_dir():
        raise FileNotFoundError(f"images directory not found: {root}")
    entries = []
    for rel in list_images(root):
        image, width, height = _load_image(root / rel)
        detections = []
        if image is not None:
            for raw in detector.detect(image):
                if raw.score < job.score_floor:
                    continue
                box = pixel_box(raw, width, height)
                if box is not None:
                    detections.append(box)
        entries.append(
            {
                "file": rel,
                "width": width,
                "height": height,
                "detections": detections,
            }
        )
    document = json.dumps({"images": entries}, indent=2) + "\n"
    output = Path(job.output_path)
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(document, encoding="utf-8")
    return document
