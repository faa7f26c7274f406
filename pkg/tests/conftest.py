"""Shared fixtures: tmp catalogs, stub model handles, repo data paths."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

sys.path.insert(0, str(Path(__file__).parent))

from helpers import (  # noqa: E402
    REPO_DATA,
    make_catalog,
    scripted_detector,
    solid_png,
    stub_extractor,
)


@pytest.fixture
def extractor(tmp_path):
    return stub_extractor(tmp_path)


@pytest.fixture
def desk_dataset_dir() -> Path:
    path = REPO_DATA / "desk_dataset"
    assert path.is_dir(), "bundled dataset missing; run python -m pixseek.sampledata"
    return path


@pytest.fixture
def stub_registry_dir() -> Path:
    path = REPO_DATA / "stub_registry"
    assert path.is_dir(), "stub registry missing; run python -m pixseek.sampledata"
    return path


@pytest.fixture
def two_cluster_catalog(tmp_path) -> Path:
    """Three red-ish and three blue-ish images."""
    root = tmp_path / "clusters"
    make_catalog(
        root,
        {
            "red_a.png": (250, 10, 10),
            "red_b.png": (240, 30, 20),
            "red_c.png": (230, 20, 30),
            "blue_a.png": (10, 20, 250),
            "blue_b.png": (20, 10, 240),
            "blue_c.png": (30, 30, 230),
        },
    )
    return root


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "desk: desk-scale acceptance runs with real backbone architectures"
    )
    config.addinivalue_line(
        "markers", "acceptance(name): marks a test as one acceptance criterion"
    )


_acceptance_outcomes: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and report.when == "call":
        _acceptance_outcomes[marker.args[0]] = "PASS" if report.passed else "FAIL"
    elif marker and report.when == "setup" and report.skipped:
        _acceptance_outcomes[marker.args[0]] = "SKIP"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _acceptance_outcomes.items():
        terminalreporter.write_line(f"[{outcome}] {name}")
