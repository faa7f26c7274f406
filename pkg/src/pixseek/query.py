"""The end-to-end search: sample catalog images, detect the prompt, crop,
embed, rank.

The query image is drawn at random (the detector decides whether it actually
contains the prompt), so a fixed seed makes an entire search replayable.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from pathlib import Path

from .catalog import CatalogSnapshot, DecodedImage, diff_catalog, load_image, scan_directory
from .errors import DecodeError, EmptyCatalog, ModelMismatch, PromptNotFound, StaleIndex
from .index import FeatureIndex, QueryProvenance, RankedResults, rank
from .models.handles import DetectorHandle, ExtractorHandle
from .models.preprocess import crop
from .models.types import Detection

DEFAULT_THRESHOLD = 0.1
DEFAULT_K = 10


@dataclass
class QuerySpec:
    """User inputs for one search."""

    prompt: str
    threshold: float = DEFAULT_THRESHOLD
    k: int = DEFAULT_K
    seed: int | None = None  # None: entropy-seeded, reported in provenance
    max_attempts: int | None = None  # None: the whole catalog
    pad_fraction: float = 0.0

    def __post_init__(self) -> None:
        if not self.prompt.strip():
            raise ValueError("prompt must be nonempty")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must be within [0, 1]")
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.max_attempts is not None and self.max_attempts < 1:
            raise ValueError("max_attempts must be positive")


@dataclass
class QueryCrop:
    """The detector-selected sub-image that becomes the retrieval query."""

    source_path: str
    bbox: tuple[float, float, float, float]
    detector_score: float
    image: DecodedImage
    source_size: tuple[int, int] = (0, 0)  # width, height of the source image


def best_detection(detections: list[Detection], threshold: float) -> Detection | None:
    """Highest-scoring detection strictly above the threshold, if any.

    Score ties keep the earliest detection in the detector's output order.
    """
    best: Detection | None = None
    for det in detections:
        if det.score > threshold and (best is None or det.score > best.score):
            best = det
    return best


@dataclass
class SelectionTrace:
    """Visited paths and detector-call count, for diagnostics and tests."""

    attempts: int = 0
    detector_calls: int = 0
    visited: list[str] = field(default_factory=list)


def select_query_image(
    snapshot: CatalogSnapshot,
    detector: DetectorHandle,
    spec: QuerySpec,
    rng: random.Random,
    trace: SelectionTrace | None = None,
) -> QueryCrop:
    """Draw catalog images uniformly without replacement until one contains
    the prompt above the threshold; crop the best box.

    Sampling without replacement (bounded by ``max_attempts``) guarantees
    termination; exhaustion raises PromptNotFound.
    """
    if not snapshot.entries:
        raise EmptyCatalog(str(snapshot.root))
    trace = trace if trace is not None else SelectionTrace()

    order = rng.sample(snapshot.entries, len(snapshot.entries))
    limit = len(order) if spec.max_attempts is None else min(spec.max_attempts, len(order))
    for entry in order[:limit]:
        trace.attempts += 1
        trace.visited.append(entry.relative_path)
        try:
            image = load_image(snapshot.root, entry)
        except DecodeError:
            continue
        trace.detector_calls += 1
        detections = detector.detect(image, spec.prompt)
        chosen = best_detection(detections, spec.threshold)
        if chosen is None:
            continue
        return QueryCrop(
            source_path=entry.relative_path,
            bbox=chosen.bbox,
            detector_score=chosen.score,
            image=crop(image, chosen.bbox, spec.pad_fraction),
            source_size=(image.width, image.height),
        )
    raise PromptNotFound(spec.prompt, attempts=trace.attempts, detector_calls=trace.detector_calls)


def check_index_fresh(root: Path, index: FeatureIndex, snapshot: CatalogSnapshot) -> None:
    """Raise StaleIndex when the catalog has drifted from the index.

    Paths missing from the index that cannot be decoded are not staleness:
    index builds skip them by contract, so they can never become rows.
    """
    changes = diff_catalog(index.as_snapshot(Path(root)), snapshot)
    if changes.removed or changes.modified:
        raise StaleIndex(
            f"catalog changed since the index was built "
            f"(-{len(changes.removed)} ~{len(changes.modified)})"
        )
    indexable_added = []
    for entry in changes.added:
        try:
            load_image(Path(root), entry)
        except DecodeError:
            continue
        indexable_added.append(entry.relative_path)
    if indexable_added:
        raise StaleIndex(
            f"catalog changed since the index was built (+{len(indexable_added)})"
        )


def search(
    root: Path | str,
    spec: QuerySpec,
    extractor: ExtractorHandle,
    detector: DetectorHandle,
    index: FeatureIndex,
) -> RankedResults:
    """Full text-to-image search against a prebuilt index.

    Verifies the index matches both the current catalog state and the
    extractor revision, then runs select -> crop -> embed -> rank. Fully
    reproducible for a fixed seed, catalog, and models.
    """
    root = Path(root)
    if extractor.model_id != index.model_id or extractor.revision != index.model_revision:
        raise ModelMismatch(
            f"index built with {index.model_id}@{index.model_revision[:12]}, "
            f"extractor is {extractor.model_id}@{extractor.revision[:12]}"
        )
    snapshot = scan_directory(root)
    check_index_fresh(root, index, snapshot)

    seed = spec.seed if spec.seed is not None else random.SystemRandom().getrandbits(32)
    rng = random.Random(seed)

    t0 = time.perf_counter()
    query_crop = select_query_image(snapshot, detector, spec, rng)
    t1 = time.perf_counter()
    query_feature = extractor.extract_features(query_crop.image)
    t2 = time.perf_counter()
    results = rank(index, query_feature, spec.k)
    t3 = time.perf_counter()

    results.provenance = QueryProvenance(
        source_path=query_crop.source_path,
        bbox=query_crop.bbox,
        detector_score=query_crop.detector_score,
        prompt=spec.prompt,
        seed=seed,
        source_size=query_crop.source_size,
    )
    results.timings_ms = {
        "detect_ms": (t1 - t0) * 1000.0,
        "extract_ms": (t2 - t1) * 1000.0,
        "rank_ms": (t3 - t2) * 1000.0,
    }
    return results
