"""Inference handle contracts shared by every backend.

A handle wraps one loaded model. Extractors turn an image into a unit-norm
feature vector; detectors turn (image, prompt) into candidate boxes. The base
classes own the parts of the contract that must hold regardless of engine:
prompt validation, box clamping, and feature normalization.
"""

from __future__ import annotations

import threading
from abc import ABC, abstractmethod

import numpy as np

from ..catalog import DecodedImage
from ..errors import EmptyPrompt
from .types import Detection, FeatureVector, ModelDescriptor, normalized_feature


class ExtractorHandle(ABC):
    """A loaded feature-extraction model."""

    def __init__(self, descriptor: ModelDescriptor):
        self.descriptor = descriptor
        # Engines are not assumed reentrant; calls are serialized per handle.
        self._lock = threading.Lock()

    @property
    def model_id(self) -> str:
        return self.descriptor.model_id

    @property
    def revision(self) -> str:
        return self.descriptor.revision

    @property
    def feature_dim(self) -> int:
        assert self.descriptor.feature_dim is not None
        return self.descriptor.feature_dim

    @abstractmethod
    def _raw_features(self, image: DecodedImage) -> np.ndarray:
        """Run the model; return the designated feature activations."""

    def extract_features(self, image: DecodedImage) -> FeatureVector:
        """Embed one image; the result is L2-normalized and deterministic."""
        with self._lock:
            raw = self._raw_features(image)
        return normalized_feature(raw, self.model_id)


class DetectorHandle(ABC):
    """A loaded zero-shot text-conditioned detector."""

    def __init__(self, descriptor: ModelDescriptor):
        self.descriptor = descriptor
        self._lock = threading.Lock()

    @property
    def model_id(self) -> str:
        return self.descriptor.model_id

    @property
    def revision(self) -> str:
        return self.descriptor.revision

    @abstractmethod
    def _detect(self, image: DecodedImage, prompt: str) -> list[Detection]:
        """Run the model for one prompt; may return out-of-bounds boxes."""

    def detect(self, image: DecodedImage, prompt: str) -> list[Detection]:
        """All candidate detections for one prompt, unfiltered by threshold.

        Thresholding belongs to the query pipeline's selection step; here the
        boxes are only clamped to the image bounds (degenerate ones dropped)
        and scores clipped to [0, 1].
        """
        if not prompt.strip():
            raise EmptyPrompt("detector prompt is empty")
        with self._lock:
            raw = self._detect(image, prompt)
        clamped = (d.clamped(image.width, image.height) for d in raw)
        return [d for d in clamped if not d.is_degenerate()]


def normalize_prompt(prompt: str) -> str:
    """Canonical prompt form used for fixture lookups."""
    return prompt.strip().casefold()
