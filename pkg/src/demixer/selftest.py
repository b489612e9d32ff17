"""Built-in verification battery behind the ``self-test`` subcommand.

Fast, dependency-free checks of the numeric contracts with frozen
expected values; the full test suite is the real gate, this is a
field diagnostic.
"""

from __future__ import annotations

import numpy as np

from .geometry import ImageDims, PixelBox, crop_box_from_lambda, effective_lambda, mask_from_box
from .mixers import MixPlan, cutmix, demix, mix_labels, resize_patch
from .rng import SampleStream, derive_sample_seed


def _check_seed_vectors() -> None:
    assert derive_sample_seed(0, 0) == 0
    assert derive_sample_seed(0, 1) == 0xE220A8397B1DCDAF
    outs = {SampleStream(derive_sample_seed(0, o)).next_u64() for o in range(512)}
    assert len(outs) == 512, "per-sample streams collide"


def _check_resize() -> None:
    strip = np.zeros((1, 2, 3), dtype=np.uint8)
    strip[0, 0] = 10
    strip[0, 1] = 20
    out = resize_patch(strip, PixelBox(0, 0, 2, 1), ImageDims(4, 1))
    assert out[0, :, 0].tolist() == [10, 13, 18, 20], out[0, :, 0].tolist()
    rng = np.random.default_rng(7)
    img = rng.integers(0, 256, size=(7, 5, 3), dtype=np.uint8)
    same = resize_patch(img, PixelBox(0, 0, 5, 7), ImageDims(5, 7))
    assert np.array_equal(same, img), "identity resize must be a byte copy"


def _check_geometry() -> None:
    stream = SampleStream(2024)
    for _ in range(512):
        lam = stream.next_float()
        dims = ImageDims(1 + int(stream.next_float() * 64), 1 + int(stream.next_float() * 64))
        box = crop_box_from_lambda(lam, dims, (stream.next_float(), stream.next_float()))
        if box is None:
            continue
        assert box.inside(dims), f"box {box} escapes {dims}"
        assert effective_lambda(mask_from_box(box, dims)) == box.area / dims.area


def _check_demix_case() -> None:
    rng = np.random.default_rng(11)
    x_a = rng.integers(0, 256, size=(8, 8, 3), dtype=np.uint8)
    x_b = rng.integers(0, 256, size=(8, 8, 3), dtype=np.uint8)
    y_a = np.array([1.0, 0.0, 0.0])
    y_b = np.array([0.0, 1.0, 0.0])
    plan = MixPlan("demix", 0, 1, 0.25, crop=PixelBox(2, 2, 4, 4), source_box=PixelBox(0, 0, 4, 4))
    got = demix(x_a, y_a, x_b, y_b, plan)
    expect = x_a.copy()
    expect[2:6, 2:6] = x_b[0:4, 0:4]
    assert np.array_equal(got.image, expect)
    assert got.lambda_eff == 16 / 64
    assert np.allclose(got.label, [0.75, 0.25, 0.0], atol=0, rtol=0)

    fb_plan = MixPlan("demix", 0, 1, 0.25, crop=PixelBox(1, 3, 4, 2), source_box=None, fallback=True)
    via_fallback = demix(x_a, y_a, x_b, y_b, fb_plan)
    via_cutmix = cutmix(x_a, y_a, x_b, y_b, fb_plan)
    assert np.array_equal(via_fallback.image, via_cutmix.image), "fallback must equal cutmix"


def _check_labels() -> None:
    stream = SampleStream(5)
    for _ in range(256):
        lam = stream.next_float()
        y_a = np.zeros(4)
        y_b = np.zeros(4)
        y_a[int(stream.next_float() * 4)] = 1.0
        y_b[int(stream.next_float() * 4)] = 1.0
        mixed = mix_labels(y_a, y_b, lam)
        assert abs(mixed.sum() - 1.0) < 1e-9
        assert np.all(np.abs(mixed - ((1.0 - lam) * y_a + lam * y_b)) <= 1e-12)


CHECKS = [
    ("seed derivation vectors", _check_seed_vectors),
    ("bilinear resampler", _check_resize),
    ("crop geometry", _check_geometry),
    ("detection-guided composition and fallback", _check_demix_case),
    ("label mixing", _check_labels),
]


def run_battery() -> int:
    failures = 0
    for name, check in CHECKS:
        try:
            check()
        except Exception as exc:
            failures += 1
            print(f"FAIL - {name}: {exc}")
        else:
            print(f"ok - {name}")
    if failures:
        print(f"{failures}/{len(CHECKS)} checks failed")
        return 1
    print(f"all {len(CHECKS)} checks passed")
    return 0
