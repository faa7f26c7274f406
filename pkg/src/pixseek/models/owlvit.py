"""Zero-shot text-conditioned detection through a local OWL-ViT checkpoint.

The descriptor's file path is a directory holding a HuggingFace-format
OWL-ViT model (config, processor files, safetensors weights). transformers
and torch are imported lazily; the scripted detector covers every test path
that must run without them.
"""

from __future__ import annotations

import json
from pathlib import Path

from PIL import Image

from ..catalog import DecodedImage
from ..errors import GraphSignatureMismatch, InferenceFailure
from .handles import DetectorHandle
from .types import Detection, ModelDescriptor


def looks_like_owlvit_dir(path: Path) -> bool:
    config = Path(path) / "config.json"
    if not config.is_file():
        return False
    try:
        model_type = json.loads(config.read_text(encoding="utf-8")).get("model_type", "")
    except (json.JSONDecodeError, UnicodeDecodeError):
        return False
    return "owlvit" in model_type


class OwlVitDetector(DetectorHandle):
    """Open-vocabulary detector; returns every candidate box for the prompt."""

    def __init__(self, descriptor: ModelDescriptor):
        super().__init__(descriptor)
        try:
            import torch
            from transformers import OwlViTForObjectDetection, OwlViTProcessor
        except ImportError as exc:  # pragma: no cover - env without transformers
            raise InferenceFailure(f"owlvit backend unavailable: {exc}") from exc

        path = str(descriptor.file_path)
        if not looks_like_owlvit_dir(descriptor.file_path):
            raise GraphSignatureMismatch(f"{path} is not an OWL-ViT checkpoint directory")
        try:
            self._processor = OwlViTProcessor.from_pretrained(path, local_files_only=True)
            self._model = OwlViTForObjectDetection.from_pretrained(
                path, local_files_only=True
            ).eval()
        except (OSError, ValueError) as exc:
            raise GraphSignatureMismatch(f"cannot load OWL-ViT checkpoint: {exc}") from exc
        self._torch = torch

    def _detect(self, image: DecodedImage, prompt: str) -> list[Detection]:
        torch = self._torch
        pil = Image.fromarray(image.pixels)
        inputs = self._processor(text=[[prompt]], images=pil, return_tensors="pt")
        try:
            with torch.no_grad():
                outputs = self._model(**inputs)
        except RuntimeError as exc:
            raise InferenceFailure(f"detector forward pass failed: {exc}") from exc

        # One image, one prompt: logits (1, num_queries, 1), boxes normalized cxcywh.
        scores = torch.sigmoid(outputs.logits[0, :, 0])
        boxes = outputs.pred_boxes[0]
        w, h = image.width, image.height
        detections = []
        for score, (cx, cy, bw, bh) in zip(scores.tolist(), boxes.tolist()):
            detections.append(
                Detection(
                    bbox=(
                        (cx - bw / 2) * w,
                        (cy - bh / 2) * h,
                        (cx + bw / 2) * w,
                        (cy + bh / 2) * h,
                    ),
                    score=score,
                    label_index=0,
                )
            )
        return detections
