"""Detection-transformer inference behind the sidecar's Detector protocol.

The heavy imports (torch, transformers) happen inside the backend so that
the sidecar module and CLI parsing stay importable on machines without the
inference stack, and so a missing-weights failure surfaces as one typed
error instead of an import-time crash.
"""

from __future__ import annotations

from PIL import Image

from .sidecar import RawDetection

DEFAULT_WEIGHTS = "facebook/detr-resnet-50"


class WeightsUnavailableError(RuntimeError):
    """The inference stack or the pretrained checkpoint cannot be loaded."""


class DetrBackend:
    """Pretrained end-to-end detection transformer.

    ``weights`` is either a hub model id or a local checkout directory.
    With ``local_only=True`` no network access is attempted; loading fails
    immediately unless the checkpoint is already on disk.
    """

    def __init__(self, weights: str = DEFAULT_WEIGHTS, local_only: bool = False):
        try:
            from transformers import DetrForObjectDetection, DetrImageProcessor
        except ImportError as exc:
            raise WeightsUnavailableError(f"inference stack unavailable: {exc}") from exc
        try:
            self.processor = DetrImageProcessor.from_pretrained(weights, local_files_only=local_only)
            self.model = DetrForObjectDetection.from_pretrained(weights, local_files_only=local_only)
        except Exception as exc:
            raise WeightsUnavailableError(f"cannot load detector weights {weights!r}: {exc}") from exc
        self.model.eval()

    def detect(self, image: Image.Image) -> list[RawDetection]:
        """All query-slot detections for one image, sorted by descending score.

        No confidence pruning happens here; the sidecar emission floor is
        the single place low-score boxes are dropped.
        """
        import torch

        inputs = self.processor(images=image, return_tensors="pt")
        with torch.no_grad():
            outputs = self.model(**inputs)
        target_sizes = torch.tensor([[image.height, image.width]])
        result = self.processor.post_process_object_detection(
            outputs, threshold=0.0, target_sizes=target_sizes
        )[0]
        id2label = self.model.config.id2label
        detections = []
        for score, label_id, box in zip(result["scores"], result["labels"], result["boxes"]):
            x0, y0, x1, y1 = (float(v) for v in box)
            label = id2label.get(int(label_id), str(int(label_id)))
            detections.append(RawDetection(x0, y0, x1, y1, float(score), label))
        detections.sort(key=lambda d: -d.score)
        return detections
