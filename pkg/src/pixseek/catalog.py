"""Enumerate, decode, fingerprint, and diff the images in a user directory.

A catalog snapshot is the ground truth the feature index is built from; the
diff between two snapshots drives incremental re-extraction.
"""

from __future__ import annotations

import hashlib
import os
import time
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, RootMismatch, RootNotADirectory, RootNotFound

DEFAULT_EXTENSIONS = frozenset({"jpg", "jpeg", "png", "bmp", "webp"})

_HASH_CHUNK = 1 << 16


@dataclass(frozen=True)
class CatalogEntry:
    """One image file, addressed relative to the catalog root."""

    relative_path: str  # forward slashes, never escapes the root
    content_hash: str  # sha256 hex digest of the file bytes
    byte_size: int
    modified_time: int  # whole seconds since epoch


@dataclass
class CatalogSnapshot:
    """The catalog state at one point in time; immutable once built."""

    root: Path
    entries: list[CatalogEntry]
    taken_at: float
    skipped: list[tuple[str, str]] = field(default_factory=list)  # (path, reason)

    def paths(self) -> list[str]:
        return [e.relative_path for e in self.entries]

    def by_path(self) -> dict[str, CatalogEntry]:
        return {e.relative_path: e for e in self.entries}

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class DecodedImage:
    """An RGB image, 8 bits per channel, row-major."""

    pixels: np.ndarray  # shape (height, width, 3), uint8

    def __post_init__(self) -> None:
        self.pixels = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise ValueError(f"expected (h, w, 3) pixel array, got {self.pixels.shape}")
        if self.height < 1 or self.width < 1:
            raise ValueError("image must be at least 1x1")

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    def digest(self) -> str:
        """sha256 of the raw pixel bytes plus dimensions; content-addresses the image."""
        h = hashlib.sha256()
        h.update(f"{self.width}x{self.height}:".encode())
        h.update(self.pixels.tobytes())
        return h.hexdigest()


@dataclass
class ChangeSet:
    """Paths added/removed/modified between two snapshots; pairwise disjoint."""

    added: list[CatalogEntry]
    removed: list[str]
    modified: list[CatalogEntry]

    def is_empty(self) -> bool:
        return not (self.added or self.removed or self.modified)


def hash_file(path: Path) -> str:
    """sha256 hex digest of a file's bytes, read in chunks."""
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(_HASH_CHUNK), b""):
            digest.update(chunk)
    return digest.hexdigest()


def scan_directory(
    root: Path | str,
    extensions: frozenset[str] | set[str] = DEFAULT_EXTENSIONS,
) -> CatalogSnapshot:
    """Recursively list every image file under ``root``.

    Hidden files and directories (dot-prefixed) are skipped, symlinks are not
    followed, and unreadable files are skipped and recorded on the snapshot.
    Entries are sorted ascending by relative path, so the scan is
    deterministic for a fixed directory state.
    """
    root = Path(root)
    if not root.exists():
        raise RootNotFound(str(root))
    if not root.is_dir():
        raise RootNotADirectory(str(root))

    wanted = {ext.lower().lstrip(".") for ext in extensions}
    entries: list[CatalogEntry] = []
    skipped: list[tuple[str, str]] = []

    for dirpath, dirnames, filenames in os.walk(root, followlinks=False):
        dirnames[:] = sorted(
            d for d in dirnames
            if not d.startswith(".") and not os.path.islink(os.path.join(dirpath, d))
        )
        for name in filenames:
            if name.startswith("."):
                continue
            ext = os.path.splitext(name)[1].lower().lstrip(".")
            if ext not in wanted:
                continue
            full = Path(dirpath) / name
            if full.is_symlink() or not full.is_file():
                continue
            rel = PurePosixPath(full.relative_to(root).as_posix())
            try:
                stat = full.stat()
                entries.append(
                    CatalogEntry(
                        relative_path=str(rel),
                        content_hash=hash_file(full),
                        byte_size=stat.st_size,
                        modified_time=int(stat.st_mtime),
                    )
                )
            except OSError as exc:
                skipped.append((str(rel), f"unreadable: {exc}"))

    entries.sort(key=lambda e: e.relative_path)
    return CatalogSnapshot(root=root, entries=entries, taken_at=time.time(), skipped=skipped)


def decode_bytes(data: bytes | Path) -> DecodedImage:
    """Decode an image file (or raw bytes) to RGB.

    Grayscale is promoted to three channels; any alpha channel is dropped by
    compositing over white.
    """
    import io

    src = io.BytesIO(data) if isinstance(data, bytes) else data
    try:
        with Image.open(src) as img:
            img.load()
            if img.mode == "P":
                img = img.convert("RGBA" if "transparency" in img.info else "RGB")
            if img.mode in ("RGBA", "LA"):
                rgba = img.convert("RGBA")
                background = Image.new("RGB", rgba.size, (255, 255, 255))
                background.paste(rgba, mask=rgba.getchannel("A"))
                img = background
            elif img.mode != "RGB":
                img = img.convert("RGB")
            return DecodedImage(np.asarray(img, dtype=np.uint8))
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"cannot decode image: {exc}") from exc


def load_image(root: Path | str, entry: CatalogEntry) -> DecodedImage:
    """Decode one catalog entry to an RGB image."""
    path = Path(root) / entry.relative_path
    if not path.is_file():
        raise DecodeError(f"file missing: {entry.relative_path}")
    return decode_bytes(path)


def diff_catalog(old: CatalogSnapshot, new: CatalogSnapshot) -> ChangeSet:
    """Compute added / removed / modified entries between two snapshots.

    Modification is judged by content hash, not timestamps, so touched or
    copied files do not force re-extraction.
    """
    if Path(old.root) != Path(new.root):
        raise RootMismatch(f"{old.root} != {new.root}")
    old_by_path = old.by_path()
    new_by_path = new.by_path()

    added = [e for p, e in new_by_path.items() if p not in old_by_path]
    removed = [p for p in old_by_path if p not in new_by_path]
    modified = [
        e
        for p, e in new_by_path.items()
        if p in old_by_path and old_by_path[p].content_hash != e.content_hash
    ]
    added.sort(key=lambda e: e.relative_path)
    removed.sort()
    modified.sort(key=lambda e: e.relative_path)
    return ChangeSet(added=added, removed=removed, modified=modified)
