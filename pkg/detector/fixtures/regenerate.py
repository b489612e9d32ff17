"""Regenerate the fixture photos from the scikit-image sample collection.

Each photo shows a single prominent object so that detector output can be
checked against the hand-annotated object centers in ``annotations.json``.
The three cropped views (shuttle, helmet, coin) isolate one object from a
busier parent image.  Run from this directory::

    python regenerate.py
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import skimage.data
from PIL import Image

PHOTO_DIR = Path(__file__).parent / "photos"


def _rgb(array: np.ndarray) -> np.ndarray:
    if array.dtype == bool:
        array = array.astype(np.uint8) * 255
    if array.ndim == 2:
        array = np.stack([array] * 3, axis=-1)
    return array[:, :, :3]


def main() -> None:
    astronaut = skimage.data.astronaut()
    photos = {
        "astronaut.png": astronaut,
        "camera.png": _rgb(skimage.data.camera()),
        "chelsea.png": skimage.data.chelsea(),
        "coffee.png": skimage.data.coffee(),
        "horse.png": _rgb(skimage.data.horse()),
        "rocket.png": skimage.data.rocket(),
        "clock.png": _rgb(skimage.data.clock()),
        "shuttle.png": astronaut[20:300, 340:512],
        "helmet.png": astronaut[320:512, 290:512],
        "coin.png": _rgb(skimage.data.coins())[5:90, 290:384],
    }
    PHOTO_DIR.mkdir(parents=True, exist_ok=True)
    for name, array in photos.items():
        Image.fromarray(array).save(PHOTO_DIR / name)
        print(f"{name}: {array.shape[1]}x{array.shape[0]}")


if __name__ == "__main__":
    main()
