"""Shared fixtures: synthetic image datasets and detection sidecars."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from demixer.pipeline import load_dataset


def make_image(rng: np.random.Generator, width: int, height: int) -> np.ndarray:
    return rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8)


def write_dataset(
    root: Path,
    count: int,
    width: int = 16,
    height: int = 16,
    classes: int = 3,
    seed: int = 7,
    varied_dims: bool = False,
):
    """Write PNGs plus a labels file under `root`; returns the labels path."""
    rng = np.random.default_rng(seed)
    images = root / "images"
    images.mkdir(parents=True, exist_ok=True)
    lines = []
    for i in range(count):
        w, h = width, height
        if varied_dims:
            w = int(rng.integers(8, width + 1))
            h = int(rng.integers(8, height + 1))
        name = f"img_{i:04d}.png"
        Image.fromarray(make_image(rng, w, h)).save(images / name)
        lines.append(f"{name}\t{i % classes}")
    labels = root / "labels.tsv"
    labels.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return labels, images


def sidecar_document(entries) -> str:
    """entries: list of (file, width, height, [(x, y, w, h, score, cls)])."""
    images = []
    for file, width, height, boxes in entries:
        images.append(
            {
                "file": file,
                "width": width,
                "height": height,
                "detections": [
                    {"x": x, "y": y, "w": w, "h": h, "score": s, "class": c}
                    for x, y, w, h, s, c in boxes
                ],
            }
        )
    return json.dumps({"images": images}, indent=2) + "\n"


@pytest.fixture
def small_dataset(tmp_path):
    labels, images = write_dataset(tmp_path, count=6, width=16, height=12)
    return load_dataset(labels, images)


@pytest.fixture
def dataset_paths(tmp_path):
    labels, images = write_dataset(tmp_path, count=6, width=16, height=12)
    return labels, images
