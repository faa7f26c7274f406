"""Pretrained-model backends: loading, preprocessing, extraction, detection."""

from .handles import DetectorHandle, ExtractorHandle
from .loader import load_detector, load_extractor, load_model
from .preprocess import crop, preprocess, resize_bilinear
from .registry import ModelRegistry, file_revision, parse_manifest, write_manifest
from .stub import (
    QuadrantMeanExtractor,
    ScriptedDetector,
    write_quadrant_fixture,
    write_scripted_fixture,
)
from .types import (
    DETECTOR,
    EXTRACTOR,
    Detection,
    FeatureVector,
    ModelDescriptor,
    PreprocessSpec,
    normalized_feature,
)

__all__ = [
    "DETECTOR",
    "EXTRACTOR",
    "Detection",
    "DetectorHandle",
    "ExtractorHandle",
    "FeatureVector",
    "ModelDescriptor",
    "ModelRegistry",
    "PreprocessSpec",
    "QuadrantMeanExtractor",
    "ScriptedDetector",
    "crop",
    "file_revision",
    "load_detector",
    "load_extractor",
    "load_model",
    "normalized_feature",
    "parse_manifest",
    "preprocess",
    "resize_bilinear",
    "write_manifest",
    "write_quadrant_fixture",
    "write_scripted_fixture",
]
