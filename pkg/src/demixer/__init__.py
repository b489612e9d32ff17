"""Deterministic batch data augmentation with detection-guided CutMix.

Five strategies over image pairs with soft-label mixing: demix (a crop
of the target is filled with a resized object region of the source,
located by precomputed detections), plus cutmix, mixup, cutout, and
saliencymix baselines. A run is a pure function of its inputs and the
master seed; outputs are byte-identical under any worker count.
"""

from .detections import (
    BoxSelectPolicy,
    DetectionSet,
    ScoredBox,
    SidecarError,
    SidecarParseError,
    SidecarValidationError,
    parse_sidecar,
    select_box,
    serialize_sidecar,
)
from .geometry import (
    ImageDims,
    PixelBox,
    box_area_ratio,
    crop_box_from_lambda,
    effective_lambda,
    mask_from_box,
)
from .mixers import (
    METHODS,
    MixPlan,
    MixedSample,
    apply_plan,
    cutmix,
    cutout,
    demix,
    mix_labels,
    mixup,
    resize_patch,
    saliency_map,
    saliencymix,
)
from .pipeline import (
    AugmentConfig,
    AugmentedRecord,
    ConfigError,
    DatasetError,
    DatasetIndex,
    LambdaPolicy,
    PipelineError,
    build_plan,
    load_dataset,
    pair_source,
    read_manifest,
    run,
)
from .rng import SampleStream, derive_sample_seed

__version__ = "0.1.0"

__all__ = [
    "AugmentConfig",
    "AugmentedRecord",
    "BoxSelectPolicy",
    "ConfigError",
    "DatasetError",
    "DatasetIndex",
    "DetectionSet",
    "ImageDims",
    "LambdaPolicy",
    "METHODS",
    "MixPlan",
    "MixedSample",
    "PipelineError",
    "PixelBox",
    "SampleStream",
    "ScoredBox",
    "SidecarError",
    "SidecarParseError",
    "SidecarValidationError",
    "apply_plan",
    "box_area_ratio",
    "build_plan",
    "crop_box_from_lambda",
    "cutmix",
    "cutout",
    "demix",
    "derive_sample_seed",
    "effective_lambda",
    "load_dataset",
    "mask_from_box",
    "mix_labels",
    "mixup",
    "pair_source",
    "parse_sidecar",
    "read_manifest",
    "resize_patch",
    "run",
    "saliency_map",
    "saliencymix",
    "select_box",
    "serialize_sidecar",
]
