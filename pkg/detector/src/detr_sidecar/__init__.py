"""Detection sidecar generator for the demixer augmentation engine."""

from .backend import DEFAULT_WEIGHTS, DetrBackend, WeightsUnavailableError
from .sidecar import (
    IMAGE_SUFFIXES,
    RawDetection,
    SidecarJob,
    detect_directory,
    list_images,
    pixel_box,
)

__all__ = [
    "DEFAULT_WEIGHTS",
    "DetrBackend",
    "IMAGE_SUFFIXES",
    "RawDetection",
    "SidecarJob",
    "WeightsUnavailableError",
    "detect_directory",
    "list_images",
    "pixel_box",
]
