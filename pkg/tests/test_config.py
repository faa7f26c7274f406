"""Config defaults, file parsing, environment overrides."""

from __future__ import annotations

from pathlib import Path

import pytest

from pixseek.config import AppConfig, load_config
from pixseek.errors import ConfigError


class TestDefaults:
    def test_defaults(self):
        config = load_config(env={})
        assert config.catalog_root == Path.home() / "Pictures"
        assert config.default_k == 10
        assert config.default_threshold == 0.1
        assert config.bind_address.startswith("127.0.0.1:")

    def test_host_port_split(self):
        config = load_config(env={"PIXSEEK_BIND_ADDRESS": "0.0.0.0:9001"})
        assert config.host == "0.0.0.0"
        assert config.port == 9001


class TestConfigFile:
    def test_file_values_applied(self, tmp_path):
        cfg = tmp_path / "pixseek.conf"
        cfg.write_text(
            "# comment\n"
            "catalog_root = /tmp/photos\n"
            "default_model = vgg16\n"
            "default_threshold = 0.25\n"
            "default_k = 5\n"
        )
        config = load_config(cfg, env={})
        assert config.catalog_root == Path("/tmp/photos")
        assert config.default_model == "vgg16"
        assert config.default_threshold == 0.25
        assert config.default_k == 5

    def test_env_overrides_file(self, tmp_path):
        cfg = tmp_path / "pixseek.conf"
        cfg.write_text("default_k = 5\n")
        config = load_config(cfg, env={"PIXSEEK_DEFAULT_K": "7"})
        assert config.default_k == 7

    def test_every_field_has_env_override(self, tmp_path):
        env = {
            "PIXSEEK_CATALOG_ROOT": str(tmp_path / "photos"),
            "PIXSEEK_MODEL_REGISTRY_DIR": str(tmp_path / "models"),
            "PIXSEEK_INDEX_CACHE_DIR": str(tmp_path / "cache"),
            "PIXSEEK_DEFAULT_MODEL": "resnet50",
            "PIXSEEK_DEFAULT_DETECTOR": "scripted",
            "PIXSEEK_DEFAULT_THRESHOLD": "0.2",
            "PIXSEEK_DEFAULT_K": "3",
            "PIXSEEK_BIND_ADDRESS": "127.0.0.1:9999",
            "PIXSEEK_UI_DIR": str(tmp_path / "ui"),
        }
        config = load_config(env=env)
        assert config.catalog_root == tmp_path / "photos"
        assert config.model_registry_dir == tmp_path / "models"
        assert config.index_cache_dir == tmp_path / "cache"
        assert config.default_model == "resnet50"
        assert config.default_detector == "scripted"
        assert config.default_threshold == 0.2
        assert config.default_k == 3
        assert config.bind_address == "127.0.0.1:9999"
        assert config.ui_dir == tmp_path / "ui"

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "pixseek.conf"
        cfg.write_text("no_such_key = 1\n")
        with pytest.raises(ConfigError):
            load_config(cfg, env={})

    def test_bad_value_rejected(self):
        with pytest.raises(ConfigError):
            load_config(env={"PIXSEEK_DEFAULT_K": "many"})

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.conf", env={})


class TestValidation:
    def test_k_must_be_positive(self, tmp_path):
        with pytest.raises(ConfigError):
            AppConfig(
                catalog_root=tmp_path, model_registry_dir=tmp_path,
                index_cache_dir=tmp_path, default_k=0,
            )

    def test_threshold_range(self, tmp_path):
        with pytest.raises(ConfigError):
            AppConfig(
                catalog_root=tmp_path, model_registry_dir=tmp_path,
                index_cache_dir=tmp_path, default_threshold=1.5,
            )
