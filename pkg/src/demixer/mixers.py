"""The five augmentation strategies as pure functions of a resolved plan.

An image is a ``uint8`` array of shape (H, W, 3); a label is a float64
probability vector. All randomness is resolved before these functions
run: a ``MixPlan`` fixes the pairing, the mix ratio, the target crop box
and (for the detection-guided method) the source object box, so every
mixer is a pure function and the same plan always yields bit-identical
output.

Composition places the source patch into the target crop region and
mixes the labels by the realized area ratio: ``y = (1 - lam_eff) * y_a
+ lam_eff * y_b``. ``lam_eff`` is the exact pasted-area fraction, not
the nominal draw, so labels always agree with the pixels.

Numeric conventions, fixed so outputs are reproducible bit for bit:
integer arithmetic everywhere except the bilinear resampler and the
mixup blend, which work in float64 and round half-up to 8 bits. The
bilinear resampler uses half-pixel centers: source coordinate
``s = (d + 0.5) * (src_len / out_len) - 0.5`` per axis, clamped to
``[0, src_len - 1]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ImageDims, PixelBox, box_area_ratio

METHODS = ("demix", "cutmix", "mixup", "cutout", "saliencymix", "none")
TWO_IMAGE_METHODS = ("demix", "cutmix", "mixup", "saliencymix")
CUTOUT_FILL = 128


@dataclass(frozen=True)
class MixPlan:
    """Fully resolved randomness for one output sample."""

    method: str
    target_index: int
    source_index: int
    lambda_nominal: float
    crop: PixelBox | None = None
    source_box: PixelBox | None = None
    sample_seed: int = 0
    fallback: bool = False


@dataclass(frozen=True)
class MixedSample:
    image: np.ndarray
    label: np.ndarray
    lambda_eff: float


def image_dims(image: np.ndarray) -> ImageDims:
    if image.ndim != 3 or image.shape[2] != 3 or image.dtype != np.uint8:
        raise ValueError(f"expected uint8 HxWx3 image, got shape {image.shape} dtype {image.dtype}")
    return ImageDims(image.shape[1], image.shape[0])


def mix_labels(y_a: np.ndarray, y_b: np.ndarray, lam_eff: float) -> np.ndarray:
    """Label line: (1 - lam_eff) * y_a + lam_eff * y_b, entrywise float64."""
    if y_a.shape != y_b.shape:
        raise ValueError(f"label shapes differ: {y_a.shape} vs {y_b.shape}")
    return (1.0 - lam_eff) * y_a.astype(np.float64) + lam_eff * y_b.astype(np.float64)


def resize_patch(src: np.ndarray, box: PixelBox, out_dims: ImageDims) -> np.ndarray:
    """Cut the box region of src and resize it to out_dims.

    Bilinear, half-pixel centers, round half-up; stretches to fit (no
    aspect preservation). Resizing to the box's own extent is a
    byte-for-byte copy.
    """
    dims = image_dims(src)
    if not box.inside(dims):
        raise ValueError(f"patch box {box.as_tuple()} outside source image {dims.width}x{dims.height}")
    region = src[box.y0 : box.y0 + box.h, box.x0 : box.x0 + box.w]
    if (out_dims.width, out_dims.height) == (box.w, box.h):
        return region.copy()

    # Per-axis source coordinates; expression order matters for bit reproducibility.
    ratio_x = box.w / out_dims.width
    ratio_y = box.h / out_dims.height
    sx = (np.arange(out_dims.width, dtype=np.float64) + 0.5) * ratio_x - 0.5
    sy = (np.arange(out_dims.height, dtype=np.float64) + 0.5) * ratio_y - 0.5
    sx = np.clip(sx, 0.0, box.w - 1.0)
    sy = np.clip(sy, 0.0, box.h - 1.0)
    x0 = np.floor(sx).astype(np.int64)
    y0 = np.floor(sy).astype(np.int64)
    fx = sx - x0
    fy = sy - y0
    x1 = np.minimum(x0 + 1, box.w - 1)
    y1 = np.minimum(y0 + 1, box.h - 1)

    pix = region.astype(np.float64)
    w00 = ((1.0 - fx)[None, :] * (1.0 - fy)[:, None])[:, :, None]
    w01 = (fx[None, :] * (1.0 - fy)[:, None])[:, :, None]
    w10 = ((1.0 - fx)[None, :] * fy[:, None])[:, :, None]
    w11 = (fx[None, :] * fy[:, None])[:, :, None]
    out = pix[y0[:, None], x0[None, :]] * w00
    out = out + pix[y0[:, None], x1[None, :]] * w01
    out = out + pix[y1[:, None], x0[None, :]] * w10
    out = out + pix[y1[:, None], x1[None, :]] * w11
    return np.floor(out + 0.5).astype(np.uint8)


def _resample_to(src: np.ndarray, dims: ImageDims) -> np.ndarray:
    src_dims = image_dims(src)
    if (src_dims.width, src_dims.height) == (dims.width, dims.height):
        return src
    return resize_patch(src, PixelBox(0, 0, src_dims.width, src_dims.height), dims)


def _identity(x: np.ndarray, y: np.ndarray) -> MixedSample:
    return MixedSample(x.copy(), np.array(y, dtype=np.float64, copy=True), 0.0)


def _check_crop(crop: PixelBox, dims: ImageDims) -> None:
    if not crop.inside(dims):
        raise ValueError(f"crop {crop.as_tuple()} outside target image {dims.width}x{dims.height}")


def demix(
    x_a: np.ndarray, y_a: np.ndarray, x_b: np.ndarray, y_b: np.ndarray, plan: MixPlan
) -> MixedSample:
    """Detection-guided mix: the source object box is cut, resized to the
    target crop extent, and pasted there. Without a qualifying detection
    (``plan.source_box is None``) this reduces exactly to cutmix.
    """
    if plan.crop is None:
        return _identity(x_a, y_a)
    if plan.source_box is None:
        return cutmix(x_a, y_a, x_b, y_b, plan)
    dims = image_dims(x_a)
    _check_crop(plan.crop, dims)
    crop = plan.crop
    patch = resize_patch(x_b, plan.source_box, ImageDims(crop.w, crop.h))
    out = x_a.copy()
    out[crop.y0 : crop.y0 + crop.h, crop.x0 : crop.x0 + crop.w] = patch
    lam_eff = box_area_ratio(crop, dims)
    return MixedSample(out, mix_labels(y_a, y_b, lam_eff), lam_eff)


def cutmix(
    x_a: np.ndarray, y_a: np.ndarray, x_b: np.ndarray, y_b: np.ndarray, plan: MixPlan
) -> MixedSample:
    """Replace the crop region of the target with the same-coordinate
    region of the source (no resize; a source of different dims is first
    resampled to the target's size).
    """
    if plan.crop is None:
        return _identity(x_a, y_a)
    dims = image_dims(x_a)
    _check_crop(plan.crop, dims)
    src = _resample_to(x_b, dims)
    crop = plan.crop
    out = x_a.copy()
    out[crop.y0 : crop.y0 + crop.h, crop.x0 : crop.x0 + crop.w] = src[
        crop.y0 : crop.y0 + crop.h, crop.x0 : crop.x0 + crop.w
    ]
    lam_eff = box_area_ratio(crop, dims)
    return MixedSample(out, mix_labels(y_a, y_b, lam_eff), lam_eff)


def mixup(
    x_a: np.ndarray, y_a: np.ndarray, x_b: np.ndarray, y_b: np.ndarray, plan: MixPlan
) -> MixedSample:
    """Pixel-wise convex combination at the nominal ratio, rounded half-up."""
    dims = image_dims(x_a)
    src = _resample_to(x_b, dims)
    lam = plan.lambda_nominal
    blend = (1.0 - lam) * x_a.astype(np.float64) + lam * src.astype(np.float64)
    out = np.floor(blend + 0.5).astype(np.uint8)
    return MixedSample(out, mix_labels(y_a, y_b, lam), lam)


def cutout(x: np.ndarray, y: np.ndarray, plan: MixPlan) -> MixedSample:
    """Erase the crop region with constant gray; the label is unchanged.

    ``lambda_eff`` reports the erased-area ratio for provenance only; it
    is never applied to the label.
    """
    if plan.crop is None:
        return _identity(x, y)
    dims = image_dims(x)
    _check_crop(plan.crop, dims)
    crop = plan.crop
    out = x.copy()
    out[crop.y0 : crop.y0 + crop.h, crop.x0 : crop.x0 + crop.w] = CUTOUT_FILL
    return MixedSample(out, np.array(y, dtype=np.float64, copy=True), box_area_ratio(crop, dims))


def saliency_map(image: np.ndarray) -> np.ndarray:
    """Distance of each pixel from the mean color, box-smoothed.

    Raw value: Euclidean distance in channel space to the image's mean
    color. Smoothing: 3x3 box filter with edge clamping, accumulated in
    row-major window order (fixed so results are bit-reproducible).
    """
    dims = image_dims(image)
    n = dims.area
    sums = image.sum(axis=(0, 1), dtype=np.int64)
    pix = image.astype(np.float64)
    dr = pix[:, :, 0] - (int(sums[0]) / n)
    dg = pix[:, :, 1] - (int(sums[1]) / n)
    db = pix[:, :, 2] - (int(sums[2]) / n)
    t = dr * dr + dg * dg
    t = t + db * db
    raw = np.sqrt(t)

    padded = np.pad(raw, 1, mode="edge")
    acc = np.zeros_like(raw)
    for dy in range(3):
        for dx in range(3):
            acc = acc + padded[dy : dy + dims.height, dx : dx + dims.width]
    return acc / 9.0


def argmax_position(grid: np.ndarray) -> tuple[int, int]:
    """(x, y) of the maximum, ties broken by lowest row-major index."""
    idx = int(np.argmax(grid))
    y, x = divmod(idx, grid.shape[1])
    return x, y


def _anchor_patch(center: tuple[int, int], extent: tuple[int, int], dims: ImageDims) -> PixelBox:
    """Box of the given extent centered on a pixel, shifted (not shrunk)
    to lie fully inside the image."""
    w, h = extent
    cx, cy = center
    x0 = min(max(cx - (w - 1) // 2, 0), dims.width - w)
    y0 = min(max(cy - (h - 1) // 2, 0), dims.height - h)
    return PixelBox(x0, y0, w, h)


def saliencymix(
    x_a: np.ndarray, y_a: np.ndarray, x_b: np.ndarray, y_b: np.ndarray, plan: MixPlan
) -> MixedSample:
    """Paste the most salient crop-sized source region at the target crop."""
    if plan.crop is None:
        return _identity(x_a, y_a)
    dims = image_dims(x_a)
    src_dims = image_dims(x_b)
    _check_crop(plan.crop, dims)
    crop = plan.crop
    if crop.w > src_dims.width or crop.h > src_dims.height:
        raise ValueError(
            f"crop extent {crop.w}x{crop.h} exceeds source image {src_dims.width}x{src_dims.height}"
        )
    center = argmax_position(saliency_map(x_b))
    patch_box = _anchor_patch(center, (crop.w, crop.h), src_dims)
    out = x_a.copy()
    out[crop.y0 : crop.y0 + crop.h, crop.x0 : crop.x0 + crop.w] = x_b[
        patch_box.y0 : patch_box.y0 + patch_box.h, patch_box.x0 : patch_box.x0 + patch_box.w
    ]
    lam_eff = box_area_ratio(crop, dims)
    return MixedSample(out, mix_labels(y_a, y_b, lam_eff), lam_eff)


def apply_plan(
    plan: MixPlan,
    x_a: np.ndarray,
    y_a: np.ndarray,
    x_b: np.ndarray | None = None,
    y_b: np.ndarray | None = None,
) -> MixedSample:
    """Dispatch a plan to its mixer. Two-image methods require the source pair."""
    if plan.method == "none":
        return _identity(x_a, y_a)
    if plan.method == "cutout":
        return cutout(x_a, y_a, plan)
    if plan.method not in TWO_IMAGE_METHODS:
        raise ValueError(f"unknown method {plan.method!r}")
    if x_b is None or y_b is None:
        raise ValueError(f"method {plan.method!r} needs a source image and label")
    fn = {"demix": demix, "cutmix": cutmix, "mixup": mixup, "saliencymix": saliencymix}[plan.method]
    return fn(x_a, y_a, x_b, y_b, plan)
