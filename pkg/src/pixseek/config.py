"""Application configuration: defaults, config file, environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import ConfigError

ENV_PREFIX = "PIXSEEK_"


def default_pictures_dir() -> Path:
    """The platform's standard Pictures directory."""
    return Path.home() / "Pictures"


def default_data_dir() -> Path:
    return Path.home() / ".pixseek"


@dataclass
class AppConfig:
    catalog_root: Path
    model_registry_dir: Path
    index_cache_dir: Path
    default_model: str = ""
    default_detector: str = ""
    default_threshold: float = 0.1
    default_k: int = 10
    bind_address: str = "127.0.0.1:8765"
    ui_dir: Path | None = None  # built web assets; a fallback page is served without

    def __post_init__(self) -> None:
        if self.default_k < 1:
            raise ConfigError("default_k must be >= 1")
        if not 0.0 <= self.default_threshold <= 1.0:
            raise ConfigError("default_threshold must be within [0, 1]")
        if ":" not in self.bind_address:
            raise ConfigError("bind_address must be host:port")

    @property
    def host(self) -> str:
        return self.bind_address.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        try:
            return int(self.bind_address.rsplit(":", 1)[1])
        except ValueError as exc:
            raise ConfigError(f"bad port in bind_address {self.bind_address!r}") from exc


def _defaults() -> AppConfig:
    data = default_data_dir()
    return AppConfig(
        catalog_root=default_pictures_dir(),
        model_registry_dir=data / "models",
        index_cache_dir=data / "cache",
    )


_FIELD_PARSERS = {
    "catalog_root": Path,
    "model_registry_dir": Path,
    "index_cache_dir": Path,
    "default_model": str,
    "default_detector": str,
    "default_threshold": float,
    "default_k": int,
    "bind_address": str,
    "ui_dir": Path,
}


def _apply(config: AppConfig, key: str, raw: str, origin: str) -> AppConfig:
    parser = _FIELD_PARSERS.get(key)
    if parser is None:
        raise ConfigError(f"{origin}: unknown config key {key!r}")
    try:
        return replace(config, **{key: parser(raw)})
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"{origin}: bad value for {key}: {raw!r} ({exc})") from exc
    # dataclass __post_init__ re-validates on every replace


def load_config(
    path: Path | str | None = None,
    env: dict[str, str] | None = None,
) -> AppConfig:
    """Defaults, overlaid with a key-value config file, overlaid with
    PIXSEEK_* environment variables (environment wins)."""
    config = _defaults()
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file {path} not found")
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            config = _apply(config, key.strip(), value.strip(), f"{path}:{lineno}")

    env = os.environ if env is None else env
    for key in _FIELD_PARSERS:
        raw = env.get(ENV_PREFIX + key.upper())
        if raw is not None:
            config = _apply(config, key, raw, f"${ENV_PREFIX + key.upper()}")
    return config
