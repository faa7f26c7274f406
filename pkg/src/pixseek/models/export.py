"""Export torchvision backbones to safetensors files plus registry manifests.

Tries to fetch ImageNet weights first; when the weight host is unreachable
the backbone is exported with seeded random initialization instead (file
size and inference cost are architecture properties, so benchmarks stay
meaningful; retrieval quality of course is not that of the trained weights).

Usage: python -m pixseek.models.export --out-dir models [--arch vgg16 ...]
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

from .registry import write_manifest
from .torch_backbones import BACKBONES, _build_trunk
from .types import EXTRACTOR, PreprocessSpec

log = logging.getLogger(__name__)

# torchvision's ImageNet normalization; the backbones all take 224x224 input.
IMAGENET_PREPROCESS = PreprocessSpec(
    target_width=224,
    target_height=224,
    channel_order="RGB",
    scale=1.0 / 255.0,
    mean=(0.485, 0.456, 0.406),
    std=(0.229, 0.224, 0.225),
    resize_mode="stretch",
)


def _try_pretrained(architecture: str):
    """Fetch ImageNet weights if the host is reachable; None otherwise."""
    import torchvision.models as tvm

    constructors = {
        "vgg16": (tvm.vgg16, tvm.VGG16_Weights.IMAGENET1K_V1),
        "resnet50": (tvm.resnet50, tvm.ResNet50_Weights.IMAGENET1K_V2),
        "mobilenet_v2": (tvm.mobilenet_v2, tvm.MobileNet_V2_Weights.IMAGENET1K_V2),
        "inception_v3": (tvm.inception_v3, tvm.Inception_V3_Weights.IMAGENET1K_V1),
    }
    constructor, weights = constructors[architecture]
    try:
        return constructor(weights=weights)
    except Exception as exc:  # noqa: BLE001 - any download failure falls back
        log.warning("pretrained weights unavailable for %s (%s); using random init",
                    architecture, exc)
        return None


def export_backbone(
    architecture: str,
    out_dir: Path,
    *,
    try_pretrained: bool = True,
    seed: int = 0,
) -> Path:
    """Write ``<architecture>.safetensors`` + ``<architecture>.model``.

    Returns the weight file path. The manifest registers the backbone under
    its architecture name.
    """
    import torch
    from safetensors.torch import save_file

    if architecture not in BACKBONES:
        raise ValueError(f"unknown architecture {architecture!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    model = _try_pretrained(architecture) if try_pretrained else None
    weights_origin = "imagenet"
    if model is None:
        weights_origin = f"random(seed={seed})"
        torch.manual_seed(seed)
        model, _ = _build_trunk(architecture)

    feature_dim = BACKBONES[architecture][0]
    weight_path = out_dir / f"{architecture}.safetensors"
    save_file(
        model.state_dict(),
        str(weight_path),
        metadata={
            "architecture": architecture,
            "role": EXTRACTOR,
            "feature_dim": str(feature_dim),
            "feature_source": "global_average_pool(final_conv)",
            "weights": weights_origin,
        },
    )
    write_manifest(
        out_dir / f"{architecture}.model",
        model_id=architecture,
        role=EXTRACTOR,
        file=weight_path.name,
        preprocess=IMAGENET_PREPROCESS,
        feature_dim=feature_dim,
    )
    log.info("exported %s (%s, %.1f MB)", architecture, weights_origin,
             weight_path.stat().st_size / 2**20)
    return weight_path


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=Path, required=True)
    parser.add_argument(
        "--arch", action="append", choices=sorted(BACKBONES), default=None,
        help="architecture to export (repeatable; default: all)",
    )
    parser.add_argument("--no-pretrained", action="store_true",
                        help="skip the weight download attempt")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(message)s")
    for arch in args.arch or sorted(BACKBONES):
        export_backbone(
            arch, args.out_dir, try_pretrained=not args.no_pretrained, seed=args.seed
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
