"""Crop-region sampling and binary mask arithmetic.

Coordinates are integer pixels with a top-left origin, y growing
downward. A box covers the half-open spans ``[x0, x0+w) x [y0, y0+h)``.
All functions here are pure and safe to call from any number of workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# H x W boolean grid; True marks pixels inside the crop region.
Mask = np.ndarray


@dataclass(frozen=True)
class ImageDims:
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image dims must be at least 1x1, got {self.width}x{self.height}")

    @property
    def area(self) -> int:
        return self.width * self.height


@dataclass(frozen=True)
class PixelBox:
    x0: int
    y0: int
    w: int
    h: int

    def __post_init__(self) -> None:
        if self.x0 < 0 or self.y0 < 0:
            raise ValueError(f"box origin must be non-negative, got ({self.x0}, {self.y0})")
        if self.w < 1 or self.h < 1:
            raise ValueError(f"box extent must be at least 1x1, got {self.w}x{self.h}")

    @property
    def area(self) -> int:
        return self.w * self.h

    def inside(self, dims: ImageDims) -> bool:
        return self.x0 + self.w <= dims.width and self.y0 + self.h <= dims.height

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x0, self.y0, self.w, self.h)


def round_half_up(x: float) -> int:
    """Round to nearest integer, halves up (0.5 -> 1). Assumes x >= 0."""
    return math.floor(x + 0.5)


def crop_box_from_lambda(lam: float, dims: ImageDims, u: tuple[float, float]) -> PixelBox | None:
    """Sample the crop box whose area ratio is ``lam``, fully in bounds.

    Side lengths are ``round(W*sqrt(lam))`` x ``round(H*sqrt(lam))``
    (half-up), so the box matches the image aspect and its area equals
    ``lam`` up to integer rounding. The top-left corner is placed at
    ``floor(u1*(W-w+1)), floor(u2*(H-h+1))``, which covers every valid
    in-bounds position; no clipping is ever needed. Returns None when a
    side rounds to zero (caller emits the target unchanged).
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must be in [0, 1], got {lam}")
    u1, u2 = u
    if not (0.0 <= u1 < 1.0 and 0.0 <= u2 < 1.0):
        raise ValueError(f"position variates must be in [0, 1), got {u}")
    side = math.sqrt(lam)
    w = round_half_up(dims.width * side)
    h = round_half_up(dims.height * side)
    if w == 0 or h == 0:
        return None
    x0 = math.floor(u1 * (dims.width - w + 1))
    y0 = math.floor(u2 * (dims.height - h + 1))
    return PixelBox(x0, y0, w, h)


def mask_from_box(box: PixelBox, dims: ImageDims) -> Mask:
    """Boolean H x W grid set exactly on the box's pixels."""
    if not box.inside(dims):
        raise ValueError(f"box {box.as_tuple()} outside image {dims.width}x{dims.height}")
    mask = np.zeros((dims.height, dims.width), dtype=bool)
    mask[box.y0 : box.y0 + box.h, box.x0 : box.x0 + box.w] = True
    return mask


def effective_lambda(mask: Mask) -> float:
    """Set-bit count over total pixel count."""
    return int(np.count_nonzero(mask)) / mask.size


def box_area_ratio(box: PixelBox | None, dims: ImageDims) -> float:
    """Area ratio of a crop box; identical to effective_lambda of its mask."""
    if box is None:
        return 0.0
    return box.area / dims.area
