"""Model registry: one UTF-8 key-value manifest per model.

A registry directory holds ``<model_id>.model`` manifests; each names the
weight file (relative paths resolve against the manifest's directory) and the
preprocessing numbers, so any compatible backbone is a drop-in without code
changes.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

from ..errors import ConfigError, ModelFileMissing
from .types import DETECTOR, EXTRACTOR, ModelDescriptor, PreprocessSpec

MANIFEST_SUFFIX = ".model"

_revision_cache: dict[tuple[str, int, int], str] = {}


def file_revision(path: Path) -> str:
    """Content hash of a model file (or directory of files), memoized by stat."""
    path = Path(path)
    stat = path.stat()
    key = (str(path), int(stat.st_mtime_ns), stat.st_size if path.is_file() else -1)
    cached = _revision_cache.get(key)
    if cached is not None:
        return cached
    digest = hashlib.sha256()
    if path.is_dir():
        for child in sorted(p for p in path.rglob("*") if p.is_file()):
            digest.update(child.relative_to(path).as_posix().encode())
            digest.update(child.read_bytes())
    else:
        with open(path, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 20), b""):
                digest.update(chunk)
    revision = digest.hexdigest()
    _revision_cache[key] = revision
    return revision


def _parse_floats(value: str, count: int, key: str) -> tuple[float, ...]:
    parts = [p.strip() for p in value.split(",")]
    if len(parts) != count:
        raise ConfigError(f"{key} needs {count} comma-separated values, got {value!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"bad float in {key}: {value!r}") from exc


def parse_manifest(path: Path) -> ModelDescriptor:
    """Read one model manifest file into a descriptor."""
    path = Path(path)
    fields: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        fields[key.strip()] = value.strip()

    try:
        model_id = fields["model_id"]
        role = fields["role"]
        file_field = fields["file"]
    except KeyError as exc:
        raise ConfigError(f"{path}: missing required key {exc}") from exc
    if role not in (EXTRACTOR, DETECTOR):
        raise ConfigError(f"{path}: unknown role {role!r}")

    file_path = Path(file_field)
    if not file_path.is_absolute():
        file_path = path.parent / file_path
    if not file_path.exists():
        raise ModelFileMissing(f"{model_id}: model file {file_path} does not exist")

    try:
        spec = PreprocessSpec(
            target_width=int(fields.get("preprocess.width", 224)),
            target_height=int(fields.get("preprocess.height", 224)),
            channel_order=fields.get("preprocess.order", "RGB"),
            scale=float(fields.get("preprocess.scale", 1.0 / 255.0)),
            mean=_parse_floats(fields.get("preprocess.mean", "0,0,0"), 3, "preprocess.mean"),
            std=_parse_floats(fields.get("preprocess.std", "1,1,1"), 3, "preprocess.std"),
            resize_mode=fields.get("preprocess.resize", "stretch"),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    feature_dim = None
    if role == EXTRACTOR:
        try:
            feature_dim = int(fields["feature_dim"])
        except KeyError:
            raise ConfigError(f"{path}: extractors need feature_dim") from None
        except ValueError as exc:
            raise ConfigError(f"{path}: bad feature_dim") from exc

    return ModelDescriptor(
        model_id=model_id,
        role=role,
        file_path=file_path,
        preprocess=spec,
        feature_dim=feature_dim,
        revision=file_revision(file_path),
    )


def write_manifest(
    path: Path,
    *,
    model_id: str,
    role: str,
    file: str,
    preprocess: PreprocessSpec,
    feature_dim: int | None = None,
) -> None:
    """Write a model manifest; ``file`` is stored as given (usually relative)."""
    lines = [
        f"model_id = {model_id}",
        f"role = {role}",
        f"file = {file}",
    ]
    if feature_dim is not None:
        lines.append(f"feature_dim = {feature_dim}")
    lines += [
        f"preprocess.width = {preprocess.target_width}",
        f"preprocess.height = {preprocess.target_height}",
        f"preprocess.scale = {preprocess.scale!r}",
        "preprocess.mean = " + ",".join(repr(v) for v in preprocess.mean),
        "preprocess.std = " + ",".join(repr(v) for v in preprocess.std),
        f"preprocess.order = {preprocess.channel_order}",
        f"preprocess.resize = {preprocess.resize_mode}",
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


class ModelRegistry:
    """All model manifests under one directory."""

    def __init__(self, directory: Path | str):
        self.directory = Path(directory)

    def list(self) -> list[ModelDescriptor]:
        if not self.directory.is_dir():
            return []
        descriptors = [
            parse_manifest(p) for p in sorted(self.directory.glob(f"*{MANIFEST_SUFFIX}"))
        ]
        return descriptors

    def get(self, model_id: str) -> ModelDescriptor:
        manifest = self.directory / f"{model_id}{MANIFEST_SUFFIX}"
        if not manifest.is_file():
            raise ModelFileMissing(f"model {model_id!r} is not registered in {self.directory}")
        return parse_manifest(manifest)

    def detectors(self) -> list[ModelDescriptor]:
        return [d for d in self.list() if d.role == DETECTOR]

    def extractors(self) -> list[ModelDescriptor]:
        return [d for d in self.list() if d.role == EXTRACTOR]
