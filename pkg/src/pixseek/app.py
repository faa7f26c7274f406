"""Shared application engine behind the CLI and the HTTP service.

Owns the model registry, the per-(catalog, model) index store with atomic
in-memory swap, incremental index maintenance, thumbnails, and the one
search-response shape both frontends emit.
"""

from __future__ import annotations

import hashlib
import io
import threading
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import quote

from PIL import Image

from .catalog import ChangeSet, diff_catalog, scan_directory
from .config import AppConfig
from .errors import (
    DecodeError,
    IndexInconsistent,
    ModelFileMissing,
    PixseekError,
    SchemaUnsupported,
)
from .index import FeatureIndex, RankedResults, build_index, load_index, save_index, update_index
from .models.handles import DetectorHandle, ExtractorHandle
from .models.loader import load_detector, load_extractor
from .models.registry import ModelRegistry
from .query import QuerySpec, search

THUMBNAIL_DEFAULT_SIZE = 256
THUMBNAIL_MAX_SIZE = 2048


@dataclass
class IndexOutcome:
    """What an ensure_index call did, for progress reporting."""

    index: FeatureIndex
    action: str  # "built" | "updated" | "reused"
    changes: ChangeSet | None = None
    skipped: list[tuple[str, str]] = field(default_factory=list)


class SearchEngine:
    def __init__(self, config: AppConfig):
        self.config = config
        self.registry = ModelRegistry(config.model_registry_dir)
        self._indexes: dict[tuple[str, str], FeatureIndex] = {}
        self._lock = threading.Lock()

    # -- model resolution -----------------------------------------------

    def extractor(self, model_id: str | None = None) -> ExtractorHandle:
        model_id = model_id or self.config.default_model
        if not model_id:
            extractors = self.registry.extractors()
            if len(extractors) == 1:
                return load_extractor(extractors[0])
            raise ModelFileMissing(
                "no extractor selected; set default_model or pass one explicitly"
            )
        return load_extractor(self.registry.get(model_id))

    def detector(self, model_id: str | None = None) -> DetectorHandle:
        model_id = model_id or self.config.default_detector
        if model_id:
            return load_detector(self.registry.get(model_id))
        detectors = self.registry.detectors()
        if len(detectors) == 1:
            return load_detector(detectors[0])
        raise ModelFileMissing(
            "no detector selected; set default_detector or register exactly one"
        )

    # -- index store ------------------------------------------------------

    def index_dir(self, root: Path, model_id: str) -> Path:
        token = hashlib.sha256(str(Path(root).resolve()).encode()).hexdigest()[:12]
        return Path(self.config.index_cache_dir) / f"{token}__{model_id}"

    def get_index(self, root: Path, model_id: str) -> FeatureIndex | None:
        """Current index for (root, model): memory first, then disk."""
        key = (str(Path(root).resolve()), model_id)
        with self._lock:
            cached = self._indexes.get(key)
        if cached is not None:
            return cached
        directory = self.index_dir(root, model_id)
        if not (directory / "manifest").is_file():
            return None
        try:
            index = load_index(directory)
        except (IndexInconsistent, SchemaUnsupported, PixseekError):
            return None
        with self._lock:
            self._indexes.setdefault(key, index)
        return index

    def put_index(self, root: Path, model_id: str, index: FeatureIndex) -> None:
        """Swap the served index atomically, then persist it."""
        key = (str(Path(root).resolve()), model_id)
        with self._lock:
            self._indexes[key] = index
        save_index(index, self.index_dir(root, model_id))

    def ensure_index(
        self,
        root: Path,
        model_id: str | None = None,
        *,
        force: bool = False,
        on_progress=None,
    ) -> IndexOutcome:
        """Build, incrementally update, or reuse the index for (root, model)."""
        extractor = self.extractor(model_id)
        root = Path(root)
        snapshot = scan_directory(root)
        skipped: list[tuple[str, str]] = list(snapshot.skipped)

        def record_skip(entry, reason: str) -> None:
            skipped.append((entry.relative_path, reason))

        existing = None if force else self.get_index(root, extractor.model_id)
        if existing is not None and existing.model_revision != extractor.revision:
            existing = None  # model file changed; incremental update is unsound

        if existing is None:
            index = build_index(
                snapshot, extractor, on_skip=record_skip, on_progress=on_progress
            )
            outcome = IndexOutcome(index=index, action="built", skipped=skipped)
        else:
            changes = diff_catalog(existing.as_snapshot(root), snapshot)
            if changes.is_empty():
                return IndexOutcome(index=existing, action="reused", changes=changes)
            index = update_index(
                existing, root, changes, extractor,
                on_skip=record_skip, on_progress=on_progress,
            )
            outcome = IndexOutcome(index=index, action="updated", changes=changes, skipped=skipped)
        self.put_index(root, extractor.model_id, index)
        return outcome

    # -- search -----------------------------------------------------------

    def run_search(
        self,
        prompt: str,
        *,
        root: Path | None = None,
        threshold: float | None = None,
        k: int | None = None,
        model_id: str | None = None,
        detector_id: str | None = None,
        seed: int | None = None,
    ) -> RankedResults:
        """Search against the currently served index (raises StaleIndex when
        the catalog drifted; callers decide whether to reindex)."""
        root = Path(root) if root is not None else Path(self.config.catalog_root)
        extractor = self.extractor(model_id)
        detector = self.detector(detector_id)
        index = self.get_index(root, extractor.model_id)
        if index is None:
            from .errors import StaleIndex

            raise StaleIndex(f"no index for {extractor.model_id} over {root}; index first")
        spec = QuerySpec(
            prompt=prompt,
            threshold=self.config.default_threshold if threshold is None else threshold,
            k=self.config.default_k if k is None else k,
            seed=seed,
        )
        return search(root, spec, extractor, detector, index)

    # -- thumbnails ---------------------------------------------------------

    def resolve_catalog_path(self, root: Path, relative: str) -> Path:
        """Validate a client-supplied path stays inside the catalog root."""
        if not relative or relative.startswith(("/", "\\")) or "\x00" in relative:
            raise ValueError(f"bad path {relative!r}")
        root = Path(root).resolve()
        candidate = (root / relative).resolve()
        if not candidate.is_relative_to(root):
            raise ValueError(f"path {relative!r} escapes the catalog root")
        if not candidate.is_file():
            raise FileNotFoundError(relative)
        return candidate

    def thumbnail(self, root: Path, relative: str, size: int) -> bytes:
        """JPEG thumbnail, longest side <= size, cached by file stat."""
        size = max(16, min(int(size), THUMBNAIL_MAX_SIZE))
        full = self.resolve_catalog_path(root, relative)
        stat = full.stat()
        cache_key = hashlib.sha256(
            f"{full}|{stat.st_size}|{stat.st_mtime_ns}|{size}".encode()
        ).hexdigest()[:32]
        cache_dir = Path(self.config.index_cache_dir) / "thumbs"
        cache_path = cache_dir / f"{cache_key}.jpg"
        if cache_path.is_file():
            return cache_path.read_bytes()
        try:
            with Image.open(full) as img:
                img = img.convert("RGB")
                img.thumbnail((size, size))
                buf = io.BytesIO()
                img.save(buf, format="JPEG", quality=85)
        except OSError as exc:
            raise DecodeError(f"cannot render thumbnail for {relative}: {exc}") from exc
        data = buf.getvalue()
        cache_dir.mkdir(parents=True, exist_ok=True)
        cache_path.write_bytes(data)
        return data


def search_response_payload(results: RankedResults, thumbnail_size: int = THUMBNAIL_DEFAULT_SIZE) -> dict:
    """The one SearchResponse shape shared by the CLI's --json and the HTTP API."""
    provenance = results.provenance
    return {
        "items": [
            {
                "path": path,
                "score": score,
                "thumbnail_url": f"/api/image?path={quote(path)}&size={thumbnail_size}",
            }
            for path, score in results.items
        ],
        "provenance": (
            {
                "source_path": provenance.source_path,
                "bbox": list(provenance.bbox),
                "detector_score": provenance.detector_score,
                "prompt": provenance.prompt,
                "seed": provenance.seed,
                "source_size": list(provenance.source_size),
            }
            if provenance
            else None
        ),
        "timings_ms": {key: round(value, 3) for key, value in results.timings_ms.items()},
    }
