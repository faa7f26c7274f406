"""Per-model feature matrices for a catalog, with cosine top-k queries.

Features are extracted once and persisted (a raw float32 matrix plus a text
manifest) so a search never has to re-run the extractor over the catalog;
ranking is an exhaustive linear scan, exact by construction.
"""

from __future__ import annotations

import hashlib
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .catalog import CatalogEntry, CatalogSnapshot, ChangeSet, load_image
from .errors import (
    ChecksumMismatch,
    DecodeError,
    DimensionMismatch,
    IndexInconsistent,
    InferenceFailure,
    ModelMismatch,
    RevisionMismatch,
    SchemaUnsupported,
    ZeroVector,
)
from .models.handles import ExtractorHandle
from .models.types import FeatureVector

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
MANIFEST_NAME = "manifest"
MATRIX_NAME = "features.bin"

NORM_ATOL = 1e-4  # float32 storage of unit vectors stays well inside this

SkipCallback = Callable[[CatalogEntry, str], None]
ProgressCallback = Callable[[int, int], None]


@dataclass
class FeatureIndex:
    """Immutable pairing of catalog entries with their feature matrix rows."""

    model_id: str
    model_revision: str
    feature_dim: int
    entries: list[CatalogEntry]
    matrix: np.ndarray  # float32, shape (len(entries), feature_dim)
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self) -> None:
        self.matrix = np.ascontiguousarray(self.matrix, dtype=np.float32)
        if self.matrix.shape != (len(self.entries), self.feature_dim):
            raise IndexInconsistent(
                f"matrix shape {self.matrix.shape} does not match "
                f"{len(self.entries)} rows x {self.feature_dim} dims"
            )
        paths = [e.relative_path for e in self.entries]
        if any(a >= b for a, b in zip(paths, paths[1:])):
            raise IndexInconsistent("rows must be strictly sorted by relative path")
        if len(self.entries):
            norms = np.linalg.norm(self.matrix.astype(np.float64), axis=1)
            if not np.allclose(norms, 1.0, atol=NORM_ATOL):
                raise IndexInconsistent("feature rows must be unit-norm")

    def __len__(self) -> int:
        return len(self.entries)

    def paths(self) -> list[str]:
        return [e.relative_path for e in self.entries]

    def row(self, i: int) -> tuple[CatalogEntry, FeatureVector]:
        return self.entries[i], FeatureVector(self.matrix[i].copy(), self.model_id)

    def as_snapshot(self, root: Path) -> CatalogSnapshot:
        """The catalog state this index was built from, for staleness diffs."""
        return CatalogSnapshot(root=Path(root), entries=list(self.entries), taken_at=0.0)


@dataclass
class QueryProvenance:
    """Where the query crop came from, enough to replay the search."""

    source_path: str
    bbox: tuple[float, float, float, float]
    detector_score: float
    prompt: str
    seed: int
    source_size: tuple[int, int] = (0, 0)  # width, height of the source image


@dataclass
class RankedResults:
    """Top-k catalog paths with scores descending, ties by ascending path."""

    items: list[tuple[str, float]]
    provenance: QueryProvenance | None = None
    timings_ms: dict[str, float] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.items)


def cosine_similarity(a: FeatureVector | np.ndarray, b: FeatureVector | np.ndarray) -> float:
    """Cosine similarity: dot(a, b) / (|a| * |b|), accumulated in float64."""
    va = np.asarray(a.values if isinstance(a, FeatureVector) else a, dtype=np.float64).reshape(-1)
    vb = np.asarray(b.values if isinstance(b, FeatureVector) else b, dtype=np.float64).reshape(-1)
    if va.shape != vb.shape:
        raise DimensionMismatch(f"{va.shape[0]} vs {vb.shape[0]}")
    norm_a = float(np.linalg.norm(va))
    norm_b = float(np.linalg.norm(vb))
    if norm_a < 1e-12 or norm_b < 1e-12:
        raise ZeroVector("cosine similarity is undefined for zero vectors")
    return float(np.dot(va, vb) / (norm_a * norm_b))


def _extract_rows(
    root: Path,
    entries: Iterable[CatalogEntry],
    extractor: ExtractorHandle,
    on_skip: SkipCallback | None,
    on_progress: ProgressCallback | None,
    total: int,
    done_offset: int = 0,
) -> list[tuple[CatalogEntry, np.ndarray]]:
    rows: list[tuple[CatalogEntry, np.ndarray]] = []
    for i, entry in enumerate(entries):
        try:
            image = load_image(root, entry)
            vector = extractor.extract_features(image)
            rows.append((entry, vector.values))
        except (DecodeError, InferenceFailure) as exc:
            log.warning("skipping %s: %s", entry.relative_path, exc)
            if on_skip:
                on_skip(entry, str(exc))
        if on_progress:
            on_progress(done_offset + i + 1, total)
    return rows


def build_index(
    snapshot: CatalogSnapshot,
    extractor: ExtractorHandle,
    *,
    on_skip: SkipCallback | None = None,
    on_progress: ProgressCallback | None = None,
) -> FeatureIndex:
    """Extract features for every decodable entry, in snapshot order.

    Per-row decode or inference failures are skipped and reported through
    ``on_skip`` (and the log) without aborting the build.
    """
    rows = _extract_rows(
        snapshot.root, snapshot.entries, extractor, on_skip, on_progress,
        total=len(snapshot.entries),
    )
    matrix = (
        np.stack([r[1] for r in rows])
        if rows
        else np.empty((0, extractor.feature_dim), dtype=np.float32)
    )
    return FeatureIndex(
        model_id=extractor.model_id,
        model_revision=extractor.revision,
        feature_dim=extractor.feature_dim,
        entries=[r[0] for r in rows],
        matrix=matrix,
    )


def update_index(
    index: FeatureIndex,
    root: Path,
    changes: ChangeSet,
    extractor: ExtractorHandle,
    *,
    on_skip: SkipCallback | None = None,
    on_progress: ProgressCallback | None = None,
) -> FeatureIndex:
    """Apply a catalog diff: drop removed rows, (re)extract added/modified.

    Unchanged rows are carried over bit-identically; the extractor must be
    the same file revision the index was built with.
    """
    if extractor.revision != index.model_revision:
        raise RevisionMismatch(
            f"index was built with {index.model_id}@{index.model_revision[:12]}, "
            f"extractor is @{extractor.revision[:12]}; full rebuild required"
        )
    stale = {p for p in changes.removed}
    stale.update(e.relative_path for e in changes.modified)

    kept = [
        (entry, index.matrix[i])
        for i, entry in enumerate(index.entries)
        if entry.relative_path not in stale
    ]
    fresh_entries = sorted(
        changes.added + changes.modified, key=lambda e: e.relative_path
    )
    fresh = _extract_rows(
        root, fresh_entries, extractor, on_skip, on_progress,
        total=len(fresh_entries),
    )
    rows = sorted(kept + fresh, key=lambda r: r[0].relative_path)
    matrix = (
        np.stack([r[1] for r in rows])
        if rows
        else np.empty((0, index.feature_dim), dtype=np.float32)
    )
    return FeatureIndex(
        model_id=index.model_id,
        model_revision=index.model_revision,
        feature_dim=index.feature_dim,
        entries=[r[0] for r in rows],
        matrix=matrix,
    )


def save_index(index: FeatureIndex, directory: Path | str) -> None:
    """Persist the index as ``features.bin`` + ``manifest`` (atomic replace)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    matrix_bytes = np.ascontiguousarray(index.matrix, dtype="<f4").tobytes()
    checksum = hashlib.sha256(matrix_bytes).hexdigest()

    header = [
        f"schema_version\t{index.schema_version}",
        f"model_id\t{index.model_id}",
        f"model_revision\t{index.model_revision}",
        f"feature_dim\t{index.feature_dim}",
        f"row_count\t{len(index.entries)}",
        f"features_sha256\t{checksum}",
    ]
    rows = [
        f"{e.relative_path}\t{e.content_hash}\t{e.byte_size}\t{e.modified_time}\t{i}"
        for i, e in enumerate(index.entries)
    ]

    matrix_tmp = directory / (MATRIX_NAME + ".tmp")
    manifest_tmp = directory / (MANIFEST_NAME + ".tmp")
    matrix_tmp.write_bytes(matrix_bytes)
    manifest_tmp.write_text("\n".join(header + rows) + "\n", encoding="utf-8")
    os.replace(matrix_tmp, directory / MATRIX_NAME)
    os.replace(manifest_tmp, directory / MANIFEST_NAME)


def _parse_header_line(line: str, expected_key: str) -> str:
    key, _, value = line.partition("\t")
    if key != expected_key:
        raise IndexInconsistent(f"manifest: expected {expected_key!r}, found {key!r}")
    return value


def load_index(directory: Path | str) -> FeatureIndex:
    """Load a persisted index, verifying schema, shape, and checksum."""
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    matrix_path = directory / MATRIX_NAME
    if not manifest_path.is_file() or not matrix_path.is_file():
        raise IndexInconsistent(f"missing index files in {directory}")

    lines = manifest_path.read_text(encoding="utf-8").splitlines()
    if len(lines) < 6:
        raise IndexInconsistent("manifest header is truncated")
    try:
        schema_version = int(_parse_header_line(lines[0], "schema_version"))
    except ValueError as exc:
        raise IndexInconsistent("bad schema_version") from exc
    if schema_version != SCHEMA_VERSION:
        raise SchemaUnsupported(f"schema_version {schema_version} (supported: {SCHEMA_VERSION})")

    model_id = _parse_header_line(lines[1], "model_id")
    model_revision = _parse_header_line(lines[2], "model_revision")
    try:
        feature_dim = int(_parse_header_line(lines[3], "feature_dim"))
        row_count = int(_parse_header_line(lines[4], "row_count"))
    except ValueError as exc:
        raise IndexInconsistent("bad feature_dim/row_count") from exc
    checksum = _parse_header_line(lines[5], "features_sha256")

    row_lines = [ln for ln in lines[6:] if ln]
    if len(row_lines) != row_count:
        raise IndexInconsistent(
            f"manifest declares {row_count} rows but lists {len(row_lines)}"
        )
    entries: list[CatalogEntry] = []
    for ordinal, line in enumerate(row_lines):
        parts = line.split("\t")
        if len(parts) != 5:
            raise IndexInconsistent(f"malformed row line {ordinal}")
        path, content_hash, byte_size, modified_time, stored_ordinal = parts
        try:
            if int(stored_ordinal) != ordinal:
                raise IndexInconsistent(f"row ordinal mismatch at {ordinal}")
            entries.append(
                CatalogEntry(
                    relative_path=path,
                    content_hash=content_hash,
                    byte_size=int(byte_size),
                    modified_time=int(modified_time),
                )
            )
        except ValueError as exc:
            raise IndexInconsistent(f"malformed row line {ordinal}") from exc

    matrix_bytes = matrix_path.read_bytes()
    expected_size = row_count * feature_dim * 4
    if len(matrix_bytes) != expected_size:
        raise IndexInconsistent(
            f"features.bin holds {len(matrix_bytes)} bytes, manifest implies {expected_size}"
        )
    if hashlib.sha256(matrix_bytes).hexdigest() != checksum:
        raise ChecksumMismatch("features.bin does not match the manifest checksum")

    matrix = np.frombuffer(matrix_bytes, dtype="<f4").reshape(row_count, feature_dim)
    return FeatureIndex(
        model_id=model_id,
        model_revision=model_revision,
        feature_dim=feature_dim,
        entries=entries,
        matrix=matrix.copy(),
        schema_version=schema_version,
    )


def rank(index: FeatureIndex, query: FeatureVector, k: int) -> RankedResults:
    """The min(k, rows) highest-cosine rows, descending; ties by ascending path.

    An exhaustive linear scan over the matrix, accumulated in float64.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if query.model_id != index.model_id:
        raise ModelMismatch(f"query from {query.model_id!r}, index from {index.model_id!r}")
    if len(query) != index.feature_dim:
        raise DimensionMismatch(f"query dim {len(query)} vs index dim {index.feature_dim}")
    if not len(index):
        return RankedResults(items=[])

    rows = index.matrix.astype(np.float64)
    q = query.values.astype(np.float64)
    q_norm = float(np.linalg.norm(q))
    if q_norm < 1e-12:
        raise ZeroVector("query vector has zero norm")
    scores = (rows @ q) / (np.linalg.norm(rows, axis=1) * q_norm)

    paths = index.paths()
    order = sorted(range(len(paths)), key=lambda i: (-scores[i], paths[i]))[:k]
    return RankedResults(items=[(paths[i], float(scores[i])) for i in order])
