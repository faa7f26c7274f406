"""Model loading: dispatch a descriptor to the backend that can run it."""

from __future__ import annotations

from pathlib import Path

from ..errors import GraphSignatureMismatch, ModelFileMissing
from .handles import DetectorHandle, ExtractorHandle
from .owlvit import OwlVitDetector, looks_like_owlvit_dir
from .stub import load_stub_model
from .torch_backbones import TorchBackboneExtractor
from .types import DETECTOR, EXTRACTOR, ModelDescriptor

_handle_cache: dict[tuple[str, str], ExtractorHandle | DetectorHandle] = {}


def load_model(descriptor: ModelDescriptor) -> ExtractorHandle | DetectorHandle:
    """Load one model; repeated loads of the same file revision are cached.

    Raises ModelFileMissing when the file is gone and GraphSignatureMismatch
    when the file's contents do not fit the declared role.
    """
    cache_key = (descriptor.model_id, descriptor.revision)
    cached = _handle_cache.get(cache_key)
    if cached is not None and cached.descriptor == descriptor:
        return cached

    path = Path(descriptor.file_path)
    if not path.exists():
        raise ModelFileMissing(str(path))

    handle: ExtractorHandle | DetectorHandle
    if path.is_dir():
        if not looks_like_owlvit_dir(path):
            raise GraphSignatureMismatch(f"{path} is not a recognized model directory")
        if descriptor.role != DETECTOR:
            raise GraphSignatureMismatch("OWL-ViT checkpoints are detectors")
        handle = OwlVitDetector(descriptor)
    elif path.suffix == ".json":
        handle = load_stub_model(descriptor)
    elif path.suffix == ".safetensors":
        if descriptor.role != EXTRACTOR:
            raise GraphSignatureMismatch(
                "safetensors backbone checkpoints are extractors; "
                f"{descriptor.model_id} declares role {descriptor.role!r}"
            )
        handle = TorchBackboneExtractor(descriptor)
    else:
        raise GraphSignatureMismatch(f"unrecognized model file format: {path.name}")

    _handle_cache[cache_key] = handle
    return handle


def load_extractor(descriptor: ModelDescriptor) -> ExtractorHandle:
    handle = load_model(descriptor)
    if not isinstance(handle, ExtractorHandle):
        raise GraphSignatureMismatch(f"{descriptor.model_id} is not an extractor")
    return handle


def load_detector(descriptor: ModelDescriptor) -> DetectorHandle:
    handle = load_model(descriptor)
    if not isinstance(handle, DetectorHandle):
        raise GraphSignatureMismatch(f"{descriptor.model_id} is not a detector")
    return handle
