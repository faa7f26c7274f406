"""Test construction helpers: synthetic images, stub model handles."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image

from pixseek.catalog import DecodedImage
from pixseek.models.stub import (
    QUADRANT_FEATURE_DIM,
    QuadrantMeanExtractor,
    ScriptedDetector,
)
from pixseek.models.types import DETECTOR, EXTRACTOR, ModelDescriptor, PreprocessSpec

REPO_DATA = Path(__file__).resolve().parent.parent / "data"


def solid_png(path: Path, color: tuple[int, int, int], size: tuple[int, int] = (16, 12)) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.new("RGB", size, color).save(path, format="PNG")


def make_catalog(root: Path, files: dict[str, tuple[int, int, int]]) -> Path:
    """Write one solid-color PNG per mapping entry (keys may contain subdirs)."""
    for name, color in files.items():
        solid_png(Path(root) / name, color)
    return Path(root)


def solid_image(color: tuple[int, int, int], width: int = 16, height: int = 12) -> DecodedImage:
    pixels = np.zeros((height, width, 3), dtype=np.uint8)
    pixels[:, :] = color
    return DecodedImage(pixels)


def quadrant_image(
    tl: tuple[int, int, int],
    tr: tuple[int, int, int],
    bl: tuple[int, int, int],
    br: tuple[int, int, int],
    size: int = 4,
) -> DecodedImage:
    half = size // 2
    pixels = np.zeros((size, size, 3), dtype=np.uint8)
    pixels[:half, :half] = tl
    pixels[:half, half:] = tr
    pixels[half:, :half] = bl
    pixels[half:, half:] = br
    return DecodedImage(pixels)


def stub_extractor(
    tmp_path: Path, model_id: str = "quadrant-mean", revision: str = "stub-rev-1"
) -> QuadrantMeanExtractor:
    """A quadrant-mean extractor backed by a real fixture file."""
    fixture = Path(tmp_path) / f"{model_id}.json"
    fixture.parent.mkdir(parents=True, exist_ok=True)
    fixture.write_text(json.dumps({"kind": "quadrant_mean"}), encoding="utf-8")
    descriptor = ModelDescriptor(
        model_id=model_id,
        role=EXTRACTOR,
        file_path=fixture,
        preprocess=PreprocessSpec(),
        feature_dim=QUADRANT_FEATURE_DIM,
        revision=revision,
    )
    return QuadrantMeanExtractor(descriptor)


def scripted_detector(
    tmp_path: Path,
    table: dict[str, dict[str, list[list[float]]]],
    model_id: str = "scripted",
) -> ScriptedDetector:
    """A scripted detector keyed by image digest (see table_for)."""
    fixture = Path(tmp_path) / f"{model_id}.json"
    fixture.parent.mkdir(parents=True, exist_ok=True)
    fixture.write_text(
        json.dumps({"kind": "scripted_detections", "detections": table}), encoding="utf-8"
    )
    descriptor = ModelDescriptor(
        model_id=model_id,
        role=DETECTOR,
        file_path=fixture,
        preprocess=PreprocessSpec(),
        revision="stub-rev-1",
    )
    return ScriptedDetector(descriptor, table)


def table_for(
    images: dict[str, DecodedImage],
    mapping: dict[str, dict[str, list[list[float]]]],
) -> dict[str, dict[str, list[list[float]]]]:
    """Convert a name-keyed detection mapping to the digest-keyed fixture form."""
    return {images[name].digest(): prompts for name, prompts in mapping.items()}


def full_frame_box(image: DecodedImage, score: float) -> list[float]:
    return [0.0, 0.0, float(image.width), float(image.height), score]


class CountingDetector:
    """Wraps a detector, counting calls; used for termination bounds."""

    def __init__(self, inner):
        self.inner = inner
        self.calls = 0

    @property
    def descriptor(self):
        return self.inner.descriptor

    @property
    def model_id(self):
        return self.inner.model_id

    @property
    def revision(self):
        return self.inner.revision

    def detect(self, image, prompt):
        self.calls += 1
        return self.inner.detect(image, prompt)
