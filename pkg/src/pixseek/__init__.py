"""pixseek: local text-to-image search over a photo directory.

Index every image with a pretrained feature extractor, select a query crop
via zero-shot text-conditioned detection on randomly sampled catalog images,
and rank the catalog by cosine similarity.
"""

from .catalog import (
    CatalogEntry,
    CatalogSnapshot,
    ChangeSet,
    DecodedImage,
    diff_catalog,
    load_image,
    scan_directory,
)
from .config import AppConfig, load_config
from .evaluation import (
    DatasetManifest,
    EvalReport,
    accuracy,
    benchmark_inference,
    load_dataset_manifest,
    model_size,
    render_report,
    run_prompt_eval,
)
from .index import (
    FeatureIndex,
    QueryProvenance,
    RankedResults,
    build_index,
    cosine_similarity,
    load_index,
    rank,
    save_index,
    update_index,
)
from .models import (
    Detection,
    FeatureVector,
    ModelDescriptor,
    ModelRegistry,
    PreprocessSpec,
    crop,
    load_detector,
    load_extractor,
    load_model,
    preprocess,
)
from .query import QueryCrop, QuerySpec, best_detection, search, select_query_image

__version__ = "0.1.0"

__all__ = [
    "AppConfig",
    "CatalogEntry",
    "CatalogSnapshot",
    "ChangeSet",
    "DatasetManifest",
    "DecodedImage",
    "Detection",
    "EvalReport",
    "FeatureIndex",
    "FeatureVector",
    "ModelDescriptor",
    "ModelRegistry",
    "PreprocessSpec",
    "QueryCrop",
    "QueryProvenance",
    "QuerySpec",
    "RankedResults",
    "accuracy",
    "benchmark_inference",
    "best_detection",
    "build_index",
    "cosine_similarity",
    "crop",
    "diff_catalog",
    "load_config",
    "load_dataset_manifest",
    "load_detector",
    "load_extractor",
    "load_image",
    "load_index",
    "load_model",
    "model_size",
    "preprocess",
    "rank",
    "render_report",
    "run_prompt_eval",
    "save_index",
    "scan_directory",
    "search",
    "select_query_image",
    "update_index",
]
