"""Deterministic file-backed stub backend.

Lets the whole pipeline run and be tested with no neural-network files
present: a tiny hand-computable extractor plus a detector scripted by a
fixture table keyed on image content.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..catalog import DecodedImage
from ..errors import GraphSignatureMismatch
from .handles import DetectorHandle, ExtractorHandle, normalize_prompt
from .types import Detection, ModelDescriptor

QUADRANT_MEAN_KIND = "quadrant_mean"
SCRIPTED_KIND = "scripted_detections"
QUADRANT_FEATURE_DIM = 12


class QuadrantMeanExtractor(ExtractorHandle):
    """Embeds an image as the mean RGB of its four quadrants, flattened.

    Quadrant order is top-left, top-right, bottom-left, bottom-right, three
    channels each, pixel values scaled to [0, 1]. The 12-dim result is small
    enough to verify by hand yet still clusters images by dominant color.
    """

    def __init__(self, descriptor: ModelDescriptor):
        if descriptor.feature_dim != QUADRANT_FEATURE_DIM:
            raise GraphSignatureMismatch(
                f"quadrant-mean extractor is {QUADRANT_FEATURE_DIM}-dim, "
                f"manifest declares {descriptor.feature_dim}"
            )
        super().__init__(descriptor)

    def _raw_features(self, image: DecodedImage) -> np.ndarray:
        arr = image.pixels.astype(np.float64) / 255.0
        h, w = arr.shape[:2]
        # Halves overlap by one row/column for odd sizes so none is empty.
        y_split_hi, y_split_lo = (h + 1) // 2, h // 2
        x_split_hi, x_split_lo = (w + 1) // 2, w // 2
        quadrants = (
            arr[:y_split_hi, :x_split_hi],
            arr[:y_split_hi, x_split_lo:],
            arr[y_split_lo:, :x_split_hi],
            arr[y_split_lo:, x_split_lo:],
        )
        return np.concatenate([q.mean(axis=(0, 1)) for q in quadrants])


class ScriptedDetector(DetectorHandle):
    """Replays detections from a fixture table keyed by image digest.

    The table maps ``image digest -> prompt -> [(x0, y0, x1, y1, score)]``;
    unknown images or prompts yield no detections. Prompts are matched after
    trimming and case-folding.
    """

    def __init__(
        self,
        descriptor: ModelDescriptor,
        table: dict[str, dict[str, list[list[float]]]],
    ):
        super().__init__(descriptor)
        self._table = {
            digest: {normalize_prompt(p): boxes for p, boxes in prompts.items()}
            for digest, prompts in table.items()
        }

    def _detect(self, image: DecodedImage, prompt: str) -> list[Detection]:
        rows = self._table.get(image.digest(), {}).get(normalize_prompt(prompt), [])
        return [
            Detection(bbox=(r[0], r[1], r[2], r[3]), score=r[4], label_index=0)
            for r in rows
        ]


def load_stub_model(descriptor: ModelDescriptor) -> ExtractorHandle | DetectorHandle:
    """Instantiate a stub handle from its JSON model file."""
    try:
        payload = json.loads(Path(descriptor.file_path).read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise GraphSignatureMismatch(f"not a stub model file: {exc}") from exc
    kind = payload.get("kind")
    if kind == QUADRANT_MEAN_KIND:
        if descriptor.role != "extractor":
            raise GraphSignatureMismatch("quadrant-mean model is an extractor")
        return QuadrantMeanExtractor(descriptor)
    if kind == SCRIPTED_KIND:
        if descriptor.role != "detector":
            raise GraphSignatureMismatch("scripted-detections model is a detector")
        return ScriptedDetector(descriptor, payload.get("detections", {}))
    raise GraphSignatureMismatch(f"unknown stub model kind {kind!r}")


def write_scripted_fixture(
    path: Path, table: dict[str, dict[str, list[list[float]]]]
) -> None:
    """Write a scripted-detector fixture file."""
    payload = {"kind": SCRIPTED_KIND, "detections": table}
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True), encoding="utf-8")


def write_quadrant_fixture(path: Path) -> None:
    """Write the quadrant-mean extractor's (trivial) model file."""
    Path(path).write_text(json.dumps({"kind": QUADRANT_MEAN_KIND}), encoding="utf-8")
