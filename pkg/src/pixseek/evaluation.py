"""Evaluation harness: top-k accuracy per prompt, inference latency, model size.

Accuracy for one search is the fraction of returned images whose labels
intersect the prompt's relevant categories (precision over the returned set).
Because the query image is drawn at random, cells are averaged over both
thresholds and seeds to wash out the draw.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .catalog import DecodedImage, scan_directory
from .errors import ConfigError, EmptyResults, ModelFileMissing, PromptNotFound
from .index import FeatureIndex, RankedResults, build_index
from .models.handles import DetectorHandle, ExtractorHandle
from .models.loader import load_extractor
from .models.types import ModelDescriptor
from .query import QuerySpec, search

LABELS_FILENAME = "labels.tsv"
PROMPTS_FILENAME = "prompts.tsv"


@dataclass
class DatasetManifest:
    """Hand-labeled image set plus the prompt -> relevant-category map."""

    root: Path
    entries: list[tuple[str, frozenset[str]]]  # (relative_path, labels)
    prompt_map: dict[str, frozenset[str]]

    def categories(self) -> frozenset[str]:
        out: set[str] = set()
        for _, labels in self.entries:
            out |= labels
        return frozenset(out)

    def relevant_paths(self, prompt: str) -> set[str]:
        """Paths whose label set intersects the prompt's categories."""
        wanted = self.prompt_map.get(prompt, frozenset())
        return {path for path, labels in self.entries if labels & wanted}


def _read_tsv_map(path: Path) -> list[tuple[str, frozenset[str]]]:
    rows: list[tuple[str, frozenset[str]]] = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, values = line.partition("\t")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected 'name<TAB>c1,c2'")
        labels = frozenset(v.strip() for v in values.split(",") if v.strip())
        if not labels:
            raise ConfigError(f"{path}:{lineno}: empty label set")
        rows.append((key.strip(), labels))
    return rows


def load_dataset_manifest(
    root: Path | str,
    labels_file: Path | None = None,
    prompts_file: Path | None = None,
) -> DatasetManifest:
    """Read ``labels.tsv`` and ``prompts.tsv`` for a dataset directory.

    Every listed image must exist under the root; every prompt must map to at
    least one category present in the labels.
    """
    root = Path(root)
    labels_file = labels_file or root / LABELS_FILENAME
    prompts_file = prompts_file or root / PROMPTS_FILENAME

    entries = _read_tsv_map(labels_file)
    for path, _ in entries:
        if not (root / path).is_file():
            raise ConfigError(f"{labels_file}: listed image {path!r} missing under {root}")

    prompt_map = dict(_read_tsv_map(prompts_file))
    present = {label for _, labels in entries for label in labels}
    for prompt, categories in prompt_map.items():
        if not categories & present:
            raise ConfigError(
                f"{prompts_file}: prompt {prompt!r} maps to no category present in the dataset"
            )
    return DatasetManifest(root=root, entries=entries, prompt_map=prompt_map)


def accuracy(results: RankedResults, relevant: set[str]) -> float:
    """Fraction of returned paths that are relevant (each result is one
    prediction); order-independent."""
    if not results.items:
        raise EmptyResults("cannot score an empty result list")
    hits = sum(1 for path, _ in results.items if path in relevant)
    return hits / len(results.items)


@dataclass
class EvalCell:
    prompt: str
    model_id: str
    threshold: float
    seed: int
    accuracy: float | None  # None: PromptNotFound for this cell


@dataclass
class TimingStats:
    mean_ms: float
    p50_ms: float
    p95_ms: float
    samples: int


@dataclass
class ModelSummary:
    model_id: str
    mean_accuracy: float | None  # None when every cell was PromptNotFound
    cells: int
    prompt_not_found: int
    timing: TimingStats | None = None
    size_bytes: int | None = None
    error: str | None = None  # set when the model could not run at all


@dataclass
class EvalReport:
    prompts: list[str]
    thresholds: list[float]
    seeds: list[int]
    k: int
    cells: list[EvalCell] = field(default_factory=list)
    models: dict[str, ModelSummary] = field(default_factory=dict)

    def prompt_model_mean(self, prompt: str, model_id: str) -> tuple[float | None, int]:
        """(mean accuracy, PromptNotFound count) for one prompt/model pair."""
        values = [
            c.accuracy
            for c in self.cells
            if c.prompt == prompt and c.model_id == model_id
        ]
        present = [v for v in values if v is not None]
        missing = len(values) - len(present)
        return (statistics.fmean(present) if present else None), missing


def run_prompt_eval(
    manifest: DatasetManifest,
    model_set: list[ModelDescriptor],
    detector: DetectorHandle,
    prompts: list[str],
    thresholds: list[float],
    seeds: list[int],
    k: int,
    index_cache: dict[str, FeatureIndex] | None = None,
) -> EvalReport:
    """Run a search per (prompt, model, threshold, seed) and score each one.

    PromptNotFound outcomes become missing cells: excluded from means,
    counted separately. Indexes are built once per model (or taken from
    ``index_cache``).
    """
    report = EvalReport(prompts=list(prompts), thresholds=list(thresholds),
                        seeds=list(seeds), k=k)
    snapshot = scan_directory(manifest.root)

    for descriptor in model_set:
        extractor = load_extractor(descriptor)
        index = (index_cache or {}).get(descriptor.model_id)
        if index is None or index.model_revision != extractor.revision:
            index = build_index(snapshot, extractor)
            if index_cache is not None:
                index_cache[descriptor.model_id] = index

        not_found = 0
        values: list[float] = []
        for prompt in prompts:
            relevant = manifest.relevant_paths(prompt)
            for threshold in thresholds:
                for seed in seeds:
                    spec = QuerySpec(prompt=prompt, threshold=threshold, k=k, seed=seed)
                    try:
                        results = search(manifest.root, spec, extractor, detector, index)
                        cell_value: float | None = accuracy(results, relevant)
                        values.append(cell_value)
                    except PromptNotFound:
                        cell_value = None
                        not_found += 1
                    report.cells.append(
                        EvalCell(prompt=prompt, model_id=descriptor.model_id,
                                 threshold=threshold, seed=seed, accuracy=cell_value)
                    )
        report.models[descriptor.model_id] = ModelSummary(
            model_id=descriptor.model_id,
            mean_accuracy=statistics.fmean(values) if values else None,
            cells=len(prompts) * len(thresholds) * len(seeds),
            prompt_not_found=not_found,
        )
    return report


def benchmark_inference(
    extractor: ExtractorHandle,
    images: list[DecodedImage],
    warmup: int = 2,
    repeats: int = 3,
) -> TimingStats:
    """Wall-clock per single-image feature extraction, after warmup.

    Runs strictly serially; one sample per (repeat, image) pair.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    if not images:
        raise ValueError("need at least one image")
    for i in range(warmup):
        extractor.extract_features(images[i % len(images)])
    samples_ms: list[float] = []
    for _ in range(repeats):
        for image in images:
            start = time.perf_counter()
            extractor.extract_features(image)
            samples_ms.append((time.perf_counter() - start) * 1000.0)
    return TimingStats(
        mean_ms=float(np.mean(samples_ms)),
        p50_ms=float(np.percentile(samples_ms, 50)),
        p95_ms=float(np.percentile(samples_ms, 95)),
        samples=len(samples_ms),
    )


def model_size(descriptor: ModelDescriptor) -> int:
    """Byte size of the model file (sum over files for directory checkpoints)."""
    path = Path(descriptor.file_path)
    if not path.exists():
        raise ModelFileMissing(str(path))
    if path.is_dir():
        return sum(p.stat().st_size for p in path.rglob("*") if p.is_file())
    return path.stat().st_size


def _format_accuracy(value: float | None) -> str:
    return "—" if value is None else f"{value:.3f}"


def render_report(report: EvalReport) -> tuple[str, dict]:
    """Human-readable tables plus a machine-readable structure.

    Table 1: per-prompt mean accuracy by model. Table 2: model, avg accuracy,
    ms per inference (CPU), size — in that column order. Missing cells render
    as an em dash with a footnoted PromptNotFound count.
    """
    lines: list[str] = []
    total_missing = sum(s.prompt_not_found for s in report.models.values())

    lines.append("Prompt results (mean accuracy over thresholds x seeds)")
    lines.append(f"{'Prompt':<14} {'Model':<16} {'Accuracy':>8}")
    per_prompt: dict[str, dict] = {}
    for prompt in report.prompts:
        per_prompt[prompt] = {}
        for model_id in report.models:
            mean, missing = report.prompt_model_mean(prompt, model_id)
            per_prompt[prompt][model_id] = mean
            lines.append(f"{prompt:<14} {model_id:<16} {_format_accuracy(mean):>8}")
    lines.append("")

    lines.append("Model comparison")
    lines.append(f"{'Model':<16} {'Avg accuracy':>12} {'ms/inference (CPU)':>19} {'Size (MB)':>10}")
    for model_id, summary in report.models.items():
        if summary.error:
            lines.append(f"{model_id:<16} failed: {summary.error}")
            continue
        ms = f"{summary.timing.mean_ms:.1f}" if summary.timing else "—"
        size = f"{summary.size_bytes / 2**20:.1f}" if summary.size_bytes is not None else "—"
        lines.append(
            f"{model_id:<16} {_format_accuracy(summary.mean_accuracy):>12} {ms:>19} {size:>10}"
        )
    if total_missing:
        lines.append("")
        lines.append(f"[*] {total_missing} cell(s) missing: prompt not found above threshold")

    payload = {
        "k": report.k,
        "prompts": report.prompts,
        "thresholds": report.thresholds,
        "seeds": report.seeds,
        "cells": [
            {
                "prompt": c.prompt,
                "model": c.model_id,
                "threshold": c.threshold,
                "seed": c.seed,
                "accuracy": c.accuracy,
            }
            for c in report.cells
        ],
        "prompt_means": per_prompt,
        "models": {
            model_id: {
                "mean_accuracy": s.mean_accuracy,
                "cells": s.cells,
                "prompt_not_found": s.prompt_not_found,
                "time_per_inference_ms": (
                    {
                        "mean": s.timing.mean_ms,
                        "p50": s.timing.p50_ms,
                        "p95": s.timing.p95_ms,
                        "samples": s.timing.samples,
                    }
                    if s.timing
                    else None
                ),
                "size_bytes": s.size_bytes,
                "error": s.error,
            }
            for model_id, s in report.models.items()
        },
    }
    return "\n".join(lines) + "\n", payload
