"""Model descriptors and the value types produced by inference."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import InferenceFailure

EXTRACTOR = "extractor"
DETECTOR = "detector"


@dataclass(frozen=True)
class PreprocessSpec:
    """How raw RGB pixels become the model's input tensor."""

    target_width: int = 224
    target_height: int = 224
    channel_order: str = "RGB"  # "RGB" or "BGR"
    scale: float = 1.0 / 255.0
    mean: tuple[float, float, float] = (0.0, 0.0, 0.0)
    std: tuple[float, float, float] = (1.0, 1.0, 1.0)
    resize_mode: str = "stretch"  # "stretch" or "shorter-side-then-center-crop"

    def __post_init__(self) -> None:
        if self.target_width < 1 or self.target_height < 1:
            raise ValueError("target dimensions must be >= 1")
        if self.channel_order not in ("RGB", "BGR"):
            raise ValueError(f"unknown channel order {self.channel_order!r}")
        if self.resize_mode not in ("stretch", "shorter-side-then-center-crop"):
            raise ValueError(f"unknown resize mode {self.resize_mode!r}")
        if any(s == 0 for s in self.std):
            raise ValueError("std components must be nonzero")


@dataclass(frozen=True)
class ModelDescriptor:
    """Identity, location, and preprocessing of one registered model."""

    model_id: str
    role: str  # EXTRACTOR or DETECTOR
    file_path: Path
    preprocess: PreprocessSpec
    feature_dim: int | None = None  # set iff role == EXTRACTOR
    revision: str = ""  # content hash of the model file

    def __post_init__(self) -> None:
        if self.role not in (EXTRACTOR, DETECTOR):
            raise ValueError(f"unknown role {self.role!r}")
        if (self.role == EXTRACTOR) != (self.feature_dim is not None):
            raise ValueError("feature_dim must be set exactly for extractors")
        if self.feature_dim is not None and self.feature_dim < 1:
            raise ValueError("feature_dim must be positive")


@dataclass(frozen=True)
class Detection:
    """One candidate box from the zero-shot detector, in source pixel coords."""

    bbox: tuple[float, float, float, float]  # x_min, y_min, x_max, y_max
    score: float
    label_index: int = 0

    def clamped(self, width: int, height: int) -> "Detection":
        """Clamp the box to the image bounds and the score to [0, 1]."""
        x0, y0, x1, y1 = self.bbox
        x0, x1 = max(0.0, min(float(x0), width)), max(0.0, min(float(x1), width))
        y0, y1 = max(0.0, min(float(y0), height)), max(0.0, min(float(y1), height))
        score = min(1.0, max(0.0, float(self.score)))
        return Detection(bbox=(x0, y0, x1, y1), score=score, label_index=self.label_index)

    def is_degenerate(self) -> bool:
        x0, y0, x1, y1 = self.bbox
        return not (x0 < x1 and y0 < y1)


NORM_TOLERANCE = 1e-5


@dataclass
class FeatureVector:
    """L2-normalized float32 embedding of one image."""

    values: np.ndarray
    model_id: str

    def __post_init__(self) -> None:
        self.values = np.ascontiguousarray(self.values, dtype=np.float32)
        if self.values.ndim != 1:
            raise ValueError("feature vector must be one-dimensional")

    def __len__(self) -> int:
        return int(self.values.shape[0])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values.astype(np.float64)))


def normalized_feature(raw: np.ndarray, model_id: str) -> FeatureVector:
    """Build a unit-norm FeatureVector from raw activations.

    A (near-)zero activation vector cannot be normalized and is reported as an
    inference failure, which callers treat as a skippable per-image error.
    """
    raw64 = np.asarray(raw, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(raw64)):
        raise InferenceFailure("model produced non-finite activations")
    norm = float(np.linalg.norm(raw64))
    if norm < 1e-12:
        raise InferenceFailure("model produced a zero feature vector")
    return FeatureVector(values=(raw64 / norm).astype(np.float32), model_id=model_id)
