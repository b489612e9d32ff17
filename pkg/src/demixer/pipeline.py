"""Dataset ingestion, plan construction, and deterministic parallel execution.

A run materializes ``n * outputs_per_image`` augmented samples. Sample
ordinal ``o = target_index * outputs_per_image + k`` owns all of its
randomness through ``derive_sample_seed(master_seed, o)``, so outputs
are byte-identical for any worker count. Per-sample draw order (the
reproducibility contract, see rng module for the generator):

    1. lambda        uniform and beta policies consume one double
                     (beta maps it through the Beta(a, a) inverse CDF);
                     the fixed policy consumes nothing
    2. crop u1, u2   two doubles (crop-based methods: demix, cutmix,
                     cutout, saliencymix)
    3. pairing       doubles until floor(u * n) != target_index
                     (two-image methods)
    4. selection u   one double (demix with the random-above-threshold
                     box policy only)

Outputs: one lossless PNG per sample named ``aug_<ordinal:06d>.png``
plus ``manifest.jsonl`` with one JSON record per line, written in
ordinal order. Manifest keys: output, label, method, lambda_nominal,
lambda_eff, target_index, source_index, sample_seed, source_box, crop,
fallback. Boxes serialize as [x0, y0, w, h] or null.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .detections import BoxSelectPolicy, DetectionSet, select_box
from .geometry import ImageDims, PixelBox, crop_box_from_lambda
from .mixers import METHODS, TWO_IMAGE_METHODS, MixPlan, apply_plan, image_dims
from .rng import SampleStream, derive_sample_seed

MANIFEST_NAME = "manifest.jsonl"
_CROP_METHODS = ("demix", "cutmix", "cutout", "saliencymix")


class DatasetError(ValueError):
    """Labels file or referenced images are unusable."""


class ConfigError(ValueError):
    """Configuration is inconsistent with the dataset or method."""


class PipelineError(RuntimeError):
    """A sample failed mid-run; carries the ordinals that completed."""

    def __init__(self, message: str, completed: list[int]) -> None:
        super().__init__(message)
        self.completed = completed


@dataclass(frozen=True)
class LambdaPolicy:
    """Mix-ratio sampling law: uniform(0,1), beta(a,a), or a fixed value."""

    kind: str
    value: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("uniform", "beta", "fixed"):
            raise ValueError(f"unknown lambda policy {self.kind!r}")
        if self.kind == "beta" and not self.value > 0.0:
            raise ValueError(f"beta alpha must be > 0, got {self.value}")
        if self.kind == "fixed" and not 0.0 <= self.value <= 1.0:
            raise ValueError(f"fixed lambda must be in [0, 1], got {self.value}")


@dataclass(frozen=True)
class AugmentConfig:
    method: str
    lambda_policy: LambdaPolicy = LambdaPolicy("uniform")
    box_policy: BoxSelectPolicy = BoxSelectPolicy()
    master_seed: int = 0
    outputs_per_image: int = 1
    workers: int | None = None

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}, expected one of {METHODS}")
        if self.outputs_per_image < 1:
            raise ValueError(f"outputs_per_image must be >= 1, got {self.outputs_per_image}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in 64 bits")
        if self.workers is not None and self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class DatasetIndex:
    """Decoded dataset: aligned (relative path, class index) records and images."""

    records: tuple[tuple[str, int], ...]
    class_count: int
    images: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.records)

    def one_hot(self, index: int) -> np.ndarray:
        label = np.zeros(self.class_count, dtype=np.float64)
        label[self.records[index][1]] = 1.0
        return label


@dataclass(frozen=True)
class AugmentedRecord:
    """One manifest row; label vector entries round-trip exactly through JSON."""

    output: str
    label: tuple[float, ...]
    method: str
    lambda_nominal: float
    lambda_eff: float
    target_index: int
    source_index: int
    sample_seed: int
    source_box: tuple[int, int, int, int] | None
    crop: tuple[int, int, int, int] | None
    fallback: bool

    def to_json(self) -> str:
        return json.dumps(
            {
                "output": self.output,
                "label": list(self.label),
                "method": self.method,
                "lambda_nominal": self.lambda_nominal,
                "lambda_eff": self.lambda_eff,
                "target_index": self.target_index,
                "source_index": self.source_index,
                "sample_seed": self.sample_seed,
                "source_box": list(self.source_box) if self.source_box else None,
                "crop": list(self.crop) if self.crop else None,
                "fallback": self.fallback,
            }
        )

    @classmethod
    def from_json(cls, line: str) -> "AugmentedRecord":
        d = json.loads(line)
        return cls(
            output=d["output"],
            label=tuple(d["label"]),
            method=d["method"],
            lambda_nominal=d["lambda_nominal"],
            lambda_eff=d["lambda_eff"],
            target_index=d["target_index"],
            source_index=d["source_index"],
            sample_seed=d["sample_seed"],
            source_box=tuple(d["source_box"]) if d["source_box"] else None,
            crop=tuple(d["crop"]) if d["crop"] else None,
            fallback=d["fallback"],
        )


def read_image(path: str | Path) -> np.ndarray:
    """Decode an image file to a uint8 HxWx3 RGB array."""
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"), dtype=np.uint8)


def write_png(path: str | Path, image: np.ndarray) -> None:
    Image.fromarray(image, mode="RGB").save(path, format="PNG")


def load_dataset(labels_path: str | Path, images_root: str | Path) -> DatasetIndex:
    """Read a labels file (lines of ``relative/path<TAB>class_index``) and
    decode every referenced image."""
    labels_path = Path(labels_path)
    images_root = Path(images_root)
    try:
        text = labels_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read labels file {labels_path}: {exc}") from exc

    records: list[tuple[str, int]] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DatasetError(f"{labels_path}:{lineno}: expected 'path<TAB>class', got {line!r}")
        rel_path, class_text = parts
        try:
            class_index = int(class_text)
        except ValueError as exc:
            raise DatasetError(f"{labels_path}:{lineno}: class index {class_text!r} is not an integer") from exc
        if class_index < 0:
            raise DatasetError(f"{labels_path}:{lineno}: class index must be >= 0, got {class_index}")
        if rel_path in seen:
            raise DatasetError(f"{labels_path}:{lineno}: duplicate path {rel_path!r}")
        seen.add(rel_path)
        records.append((rel_path, class_index))
    if not records:
        raise DatasetError(f"empty dataset: {labels_path} lists no images")

    images: list[np.ndarray] = []
    for rel_path, _ in records:
        full = images_root / rel_path
        if not full.is_file():
            raise DatasetError(f"missing image file: {full}")
        try:
            images.append(read_image(full))
        except Exception as exc:
            raise DatasetError(f"cannot decode image {full}: {exc}") from exc

    class_count = 1 + max(c for _, c in records)
    return DatasetIndex(tuple(records), class_count, tuple(images))


def draw_lambda(policy: LambdaPolicy, stream: SampleStream) -> float:
    if policy.kind == "fixed":
        return policy.value
    u = stream.next_float()
    if policy.kind == "uniform":
        return u
    from scipy.special import betaincinv  # deferred: scipy import is slow

    return float(betaincinv(policy.value, policy.value, u))


def pair_source(target_index: int, n: int, stream: SampleStream) -> int:
    """Uniform source index over [0, n) excluding the target, by rejection."""
    if n < 2:
        raise ConfigError(f"pairing needs at least 2 images, dataset has {n}")
    while True:
        j = min(int(stream.next_float() * n), n - 1)
        if j != target_index:
            return j


def build_plan(
    target_index: int,
    config: AugmentConfig,
    dataset: DatasetIndex,
    detections: dict[str, DetectionSet],
    stream: SampleStream,
) -> MixPlan:
    """Resolve every random decision for one sample (draw order in the
    module docstring)."""
    method = config.method
    lam = draw_lambda(config.lambda_policy, stream)

    crop = None
    if method in _CROP_METHODS:
        u1 = stream.next_float()
        u2 = stream.next_float()
        crop = crop_box_from_lambda(lam, image_dims(dataset.images[target_index]), (u1, u2))

    source_index = target_index
    if method in TWO_IMAGE_METHODS:
        source_index = pair_source(target_index, len(dataset), stream)

    source_box = None
    fallback = False
    if method == "demix":
        source_key = dataset.records[source_index][0]
        dets = detections.get(source_key)
        u_sel = 0.0
        if config.box_policy.mode == "random-above-threshold":
            u_sel = stream.next_float()
        chosen = None
        if dets is not None:
            chosen = select_box(dets, config.box_policy, u_sel)
        if chosen is None:
            fallback = True
        else:
            # Sidecar dims may disagree with the actual image; re-clip.
            source_box = _clip_to_image(chosen.box, image_dims(dataset.images[source_index]))
            if source_box is None:
                fallback = True

    return MixPlan(
        method=method,
        target_index=target_index,
        source_index=source_index,
        lambda_nominal=lam,
        crop=crop,
        source_box=source_box,
        sample_seed=stream.seed,
        fallback=fallback,
    )


def _clip_to_image(box: PixelBox, dims: ImageDims) -> PixelBox | None:
    x1 = min(box.x0 + box.w, dims.width)
    y1 = min(box.y0 + box.h, dims.height)
    if box.x0 >= x1 or box.y0 >= y1:
        return None
    return PixelBox(box.x0, box.y0, x1 - box.x0, y1 - box.y0)


def _render_sample(
    ordinal: int,
    config: AugmentConfig,
    dataset: DatasetIndex,
    detections: dict[str, DetectionSet],
    out_dir: Path,
) -> AugmentedRecord:
    target_index = ordinal // config.outputs_per_image
    seed = derive_sample_seed(config.master_seed, ordinal)
    stream = SampleStream(seed)
    plan = build_plan(target_index, config, dataset, detections, stream)

    x_a = dataset.images[target_index]
    y_a = dataset.one_hot(target_index)
    if plan.method in TWO_IMAGE_METHODS:
        sample = apply_plan(plan, x_a, y_a, dataset.images[plan.source_index], dataset.one_hot(plan.source_index))
    else:
        sample = apply_plan(plan, x_a, y_a)

    name = f"aug_{ordinal:06d}.png"
    write_png(out_dir / name, sample.image)
    return AugmentedRecord(
        output=name,
        label=tuple(float(v) for v in sample.label),
        method=plan.method,
        lambda_nominal=plan.lambda_nominal,
        lambda_eff=sample.lambda_eff,
        target_index=plan.target_index,
        source_index=plan.source_index,
        sample_seed=plan.sample_seed,
        source_box=plan.source_box.as_tuple() if plan.source_box else None,
        crop=plan.crop.as_tuple() if plan.crop else None,
        fallback=plan.fallback,
    )


# Worker-process state, installed once per worker by the pool initializer.
_WORKER: dict = {}


def _init_worker(config, dataset, detections, out_dir) -> None:
    _WORKER["args"] = (config, dataset, detections, Path(out_dir))


def _worker_render(ordinal: int) -> AugmentedRecord:
    config, dataset, detections, out_dir = _WORKER["args"]
    return _render_sample(ordinal, config, dataset, detections, out_dir)


def run(
    config: AugmentConfig,
    dataset: DatasetIndex,
    detections: dict[str, DetectionSet] | None = None,
    out_dir: str | Path = "out",
) -> list[AugmentedRecord]:
    """Materialize the augmented dataset and its manifest.

    Returns the manifest records in ordinal order. Raises PipelineError
    (listing completed ordinals) if any sample fails.
    """
    detections = detections or {}
    if config.method in TWO_IMAGE_METHODS and len(dataset) < 2:
        raise ConfigError(f"method {config.method!r} needs at least 2 images, dataset has {len(dataset)}")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    total = len(dataset) * config.outputs_per_image
    ordinals = range(total)
    workers = config.workers or os.cpu_count() or 1

    records: list[AugmentedRecord | None] = [None] * total
    completed: list[int] = []
    try:
        if workers == 1 or total == 1:
            for o in ordinals:
                records[o] = _render_sample(o, config, dataset, detections, out_dir)
                completed.append(o)
        else:
            with ProcessPoolExecutor(
                max_workers=workers,
                initializer=_init_worker,
                initargs=(config, dataset, detections, str(out_dir)),
            ) as pool:
                chunk = max(1, total // (workers * 4))
                for o, record in zip(ordinals, pool.map(_worker_render, ordinals, chunksize=chunk)):
                    records[o] = record
                    completed.append(o)
    except Exception as exc:
        raise PipelineError(f"sample rendering failed: {exc}", completed) from exc

    manifest_path = out_dir / MANIFEST_NAME
    try:
        with open(manifest_path, "w", encoding="utf-8") as fh:
            for record in records:
                assert record is not None
                fh.write(record.to_json() + "\n")
    except OSError as exc:
        raise PipelineError(f"cannot write manifest {manifest_path}: {exc}", completed) from exc
    return records  # type: ignore[return-value]


def read_manifest(path: str | Path) -> list[AugmentedRecord]:
    with open(path, encoding="utf-8") as fh:
        return [AugmentedRecord.from_json(line) for line in fh if line.strip()]
