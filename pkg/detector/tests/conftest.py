import json
from pathlib import Path

import pytest
from PIL import Image

from detr_sidecar import RawDetection

FIXTURES_DIR = Path(__file__).resolve().parents[1] / "fixtures"


class StubBackend:
    """Canned detections keyed by image size, for exercising emission."""

    def __init__(self, by_size=None, default=()):
        self.by_size = dict(by_size or {})
        self.default = tuple(default)

    def detect(self, image):
        return list(self.by_size.get(image.size, self.default))


class CenterBoxBackend:
    """One confident box over the middle half of any image, plus one faint one."""

    def detect(self, image):
        w, h = image.size
        return [
            RawDetection(w * 0.25, h * 0.25, w * 0.75, h * 0.75, 0.9, "subject"),
            RawDetection(0.0, 0.0, float(w), float(h), 0.2, "background"),
        ]


@pytest.fixture
def stub_cls():
    return StubBackend


@pytest.fixture
def center_backend():
    return CenterBoxBackend()


@pytest.fixture(scope="session")
def photo_dir():
    return FIXTURES_DIR / "photos"


@pytest.fixture(scope="session")
def annotations():
    with open(FIXTURES_DIR / "annotations.json", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture
def image_tree(tmp_path):
    """A small directory of solid-color images with distinct sizes."""
    root = tmp_path / "imgs"
    root.mkdir()
    sizes = {"a.png": (20, 14), "b.png": (32, 32), "sub/c.png": (9, 7)}
    for rel, (w, h) in sizes.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        Image.new("RGB", (w, h), (60, 120, 180)).save(path)
    return root, sizes
