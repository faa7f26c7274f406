"""CNN backbone extractors executed with torch from safetensors weight files.

The weight file holds the complete checkpoint of a standard classification
backbone (classifier head included, as distributed); the designated feature
output is the global average pool of the final convolutional activation,
recorded in the file's metadata. torch and torchvision are imported lazily so
the rest of the package works without them.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..catalog import DecodedImage
from ..errors import GraphSignatureMismatch, InferenceFailure
from .handles import ExtractorHandle
from .preprocess import preprocess
from .types import ModelDescriptor

# architecture name -> (feature_dim, torchvision constructor name)
BACKBONES: dict[str, tuple[int, str]] = {
    "vgg16": (512, "vgg16"),
    "resnet50": (2048, "resnet50"),
    "mobilenet_v2": (1280, "mobilenet_v2"),
    "inception_v3": (2048, "inception_v3"),
}


def _build_trunk(architecture: str):
    """Construct the backbone and return (full_model, conv_trunk)."""
    import torch.nn as nn
    import torchvision.models as tvm

    if architecture == "vgg16":
        model = tvm.vgg16(weights=None)
        trunk = model.features
    elif architecture == "resnet50":
        model = tvm.resnet50(weights=None)
        trunk = nn.Sequential(
            model.conv1, model.bn1, model.relu, model.maxpool,
            model.layer1, model.layer2, model.layer3, model.layer4,
        )
    elif architecture == "mobilenet_v2":
        model = tvm.mobilenet_v2(weights=None)
        trunk = model.features
    elif architecture == "inception_v3":
        model = tvm.inception_v3(weights=None, aux_logits=True, init_weights=False)
        keep = [
            name for name, _ in model.named_children()
            if name not in ("AuxLogits", "avgpool", "dropout", "fc")
        ]
        trunk = nn.Sequential(*[getattr(model, name) for name in keep])
    else:
        raise GraphSignatureMismatch(f"unknown backbone architecture {architecture!r}")
    return model, trunk


def read_weight_metadata(path: Path) -> dict[str, str]:
    """Metadata header of a safetensors file (empty dict when absent)."""
    from safetensors import safe_open

    with safe_open(str(path), framework="numpy") as fh:
        return fh.metadata() or {}


class TorchBackboneExtractor(ExtractorHandle):
    """Feature extraction through a torchvision backbone's conv trunk + GAP."""

    def __init__(self, descriptor: ModelDescriptor):
        super().__init__(descriptor)
        try:
            import torch
            from safetensors.torch import load_file
        except ImportError as exc:  # pragma: no cover - env without torch
            raise InferenceFailure(f"torch backend unavailable: {exc}") from exc

        metadata = read_weight_metadata(descriptor.file_path)
        if metadata.get("role", "extractor") != "extractor":
            raise GraphSignatureMismatch(
                f"weight file declares role {metadata.get('role')!r}, not an extractor"
            )
        architecture = metadata.get("architecture", "")
        if architecture not in BACKBONES:
            raise GraphSignatureMismatch(
                f"weight file architecture {architecture!r} is not a known backbone"
            )
        expected_dim = BACKBONES[architecture][0]
        if descriptor.feature_dim != expected_dim:
            raise GraphSignatureMismatch(
                f"{architecture} emits {expected_dim}-dim features, "
                f"manifest declares {descriptor.feature_dim}"
            )

        model, trunk = _build_trunk(architecture)
        state = load_file(str(descriptor.file_path))
        try:
            model.load_state_dict(state, strict=True)
        except RuntimeError as exc:
            raise GraphSignatureMismatch(
                f"weights do not fit a {architecture} checkpoint: {exc}"
            ) from exc
        self.architecture = architecture
        self._torch = torch
        self._trunk = trunk.eval()

    def _raw_features(self, image: DecodedImage) -> np.ndarray:
        torch = self._torch
        tensor = torch.from_numpy(preprocess(image, self.descriptor.preprocess))
        try:
            with torch.no_grad():
                activations = self._trunk(tensor.unsqueeze(0))
                pooled = activations.mean(dim=(2, 3))  # global average pool
        except RuntimeError as exc:
            raise InferenceFailure(f"backbone forward pass failed: {exc}") from exc
        return pooled.squeeze(0).numpy()
