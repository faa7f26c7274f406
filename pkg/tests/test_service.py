"""HTTP service: endpoints, error codes, traversal safety, atomic swap."""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from pixseek.app import SearchEngine
from pixseek.config import AppConfig
from pixseek.service import create_app

from helpers import REPO_DATA, solid_png


@pytest.fixture
def service(tmp_path):
    config = AppConfig(
        catalog_root=REPO_DATA / "desk_dataset",
        model_registry_dir=REPO_DATA / "stub_registry",
        index_cache_dir=tmp_path / "cache",
        default_model="quadrant-mean",
        default_detector="scripted-detector",
    )
    engine = SearchEngine(config)
    app = create_app(config, engine)
    return app, engine, config


def wait_for_job(client: TestClient, job_id: str, timeout: float = 30.0) -> dict:
    deadline = time.time() + timeout
    while time.time() < deadline:
        payload = client.get(f"/api/index/status?job_id={job_id}").json()
        if payload["state"] in ("done", "failed"):
            return payload
        time.sleep(0.02)
    raise TimeoutError(f"job {job_id} did not finish")


def build_index_via_api(client: TestClient, force: bool = False) -> dict:
    response = client.post("/api/index", json={"model": "quadrant-mean", "force": force})
    assert response.status_code == 200, response.text
    return wait_for_job(client, response.json()["job_id"])


class TestModelsEndpoint:
    def test_lists_models(self, service):
        app, _, _ = service
        with TestClient(app) as client:
            payload = client.get("/api/models").json()
        ids = {m["model_id"] for m in payload["models"]}
        assert {"quadrant-mean", "scripted-detector"} <= ids
        assert payload["default_model"] == "quadrant-mean"


class TestSearchEndpoint:
    def test_empty_prompt_400(self, service):
        app, _, _ = service
        with TestClient(app) as client:
            response = client.post("/api/search", json={"prompt": "   "})
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "EMPTY_PROMPT"

    def test_search_without_index_is_stale(self, service):
        app, _, _ = service
        with TestClient(app) as client:
            response = client.post("/api/search", json={"prompt": "cat"})
        assert response.status_code == 409
        assert response.json()["error"]["code"] == "STALE_INDEX"

    def test_search_descending_scores(self, service):
        app, _, _ = service
        with TestClient(app) as client:
            build_index_via_api(client)
            response = client.post("/api/search", json={"prompt": "cat", "seed": 11, "k": 8})
            assert response.status_code == 200
            payload = response.json()
        scores = [item["score"] for item in payload["items"]]
        assert scores == sorted(scores, reverse=True)
        assert len(payload["items"]) == 8
        assert payload["provenance"]["seed"] == 11
        assert set(payload["timings_ms"]) == {"detect_ms", "extract_ms", "rank_ms"}

    def test_prompt_not_found_code(self, service):
        app, _, _ = service
        with TestClient(app) as client:
            build_index_via_api(client)
            response = client.post("/api/search", json={"prompt": "unicorn", "seed": 1})
        assert response.status_code == 404
        body = response.json()["error"]
        assert body["code"] == "PROMPT_NOT_FOUND"
        assert body["attempts"] > 0

    def test_unknown_model_404(self, service):
        app, _, _ = service
        with TestClient(app) as client:
            build_index_via_api(client)
            response = client.post("/api/search", json={"prompt": "cat", "model": "nope"})
        assert response.status_code == 404
        assert response.json()["error"]["code"] == "MODEL_MISSING"

    def test_search_deterministic_with_seed(self, service):
        app, _, _ = service
        with TestClient(app) as client:
            build_index_via_api(client)
            first = client.post("/api/search", json={"prompt": "road", "seed": 3}).json()
            second = client.post("/api/search", json={"prompt": "road", "seed": 3}).json()
        assert first["items"] == second["items"]
        assert first["provenance"] == second["provenance"]

    def test_cli_json_matches_http_schema(self, service, tmp_path):
        from click.testing import CliRunner

        from pixseek.cli import main

        app, _, config = service
        with TestClient(app) as client:
            build_index_via_api(client)
            http_payload = client.post(
                "/api/search", json={"prompt": "cat", "seed": 42, "k": 5}
            ).json()

        env = {
            "PIXSEEK_CATALOG_ROOT": str(config.catalog_root),
            "PIXSEEK_MODEL_REGISTRY_DIR": str(config.model_registry_dir),
            "PIXSEEK_INDEX_CACHE_DIR": str(config.index_cache_dir),
            "PIXSEEK_DEFAULT_MODEL": "quadrant-mean",
            "PIXSEEK_DEFAULT_DETECTOR": "scripted-detector",
        }
        result = CliRunner().invoke(
            main, ["search", "--prompt", "cat", "--seed", "42", "--k", "5", "--json"],
            env=env, catch_exceptions=False,
        )
        assert result.exit_code == 0
        cli_payload = json.loads(result.output[result.output.index("{"):])

        def shape(value):
            if isinstance(value, dict):
                return {k: shape(v) for k, v in sorted(value.items())}
            if isinstance(value, list):
                return [shape(value[0])] if value else []
            return type(value).__name__

        assert shape(cli_payload) == shape(http_payload)
        # same seed, same catalog: identical result content too
        assert cli_payload["items"] == http_payload["items"]


class TestImageEndpoint:
    def test_serves_thumbnail(self, service):
        app, _, _ = service
        with TestClient(app) as client:
            response = client.get("/api/image?path=animals_00.png&size=64")
        assert response.status_code == 200
        assert response.headers["content-type"] == "image/jpeg"
        assert len(response.content) > 100

    def test_traversal_rejected(self, service):
        app, _, _ = service
        with TestClient(app) as client:
            response = client.get("/api/image?path=../etc/passwd")
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "BAD_PATH"

    def test_absolute_path_rejected(self, service):
        app, _, _ = service
        with TestClient(app) as client:
            response = client.get("/api/image", params={"path": "/etc/passwd"})
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "BAD_PATH"

    def test_missing_file_rejected(self, service):
        app, _, _ = service
        with TestClient(app) as client:
            response = client.get("/api/image?path=nope.png")
        assert response.status_code == 400


class TestIndexJobs:
    def test_job_lifecycle(self, service):
        app, _, _ = service
        with TestClient(app) as client:
            response = client.post("/api/index", json={"model": "quadrant-mean"})
            assert response.status_code == 200
            body = response.json()
            assert body["created"] is True
            final = wait_for_job(client, body["job_id"])
            assert final["state"] == "done"
            assert final["done"] == final["total"] > 0

    def test_double_start_joins_existing_job(self, service):
        app, _, _ = service
        with TestClient(app) as client:
            first = client.post("/api/index", json={"model": "quadrant-mean", "force": True}).json()
            second = client.post("/api/index", json={"model": "quadrant-mean", "force": True}).json()
            # either the job is still active (joined) or it finished too fast
            if second["created"]:
                wait_for_job(client, second["job_id"])
            else:
                assert second["job_id"] == first["job_id"]
            wait_for_job(client, first["job_id"])

    def test_unknown_model_404(self, service):
        app, _, _ = service
        with TestClient(app) as client:
            response = client.post("/api/index", json={"model": "ghost"})
        assert response.status_code == 404

    def test_bad_dir_400(self, service):
        app, _, _ = service
        with TestClient(app) as client:
            response = client.post("/api/index", json={"model": "quadrant-mean", "dir": "/no/such/dir"})
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "BAD_PATH"

    def test_unknown_job_404(self, service):
        app, _, _ = service
        with TestClient(app) as client:
            response = client.get("/api/index/status?job_id=zzz")
        assert response.status_code == 404


class TestAtomicSwapUnderLoad:
    def test_no_5xx_during_swap_stress(self, service):
        app, _, _ = service
        with TestClient(app) as client:
            build_index_via_api(client)

            job = client.post(
                "/api/index", json={"model": "quadrant-mean", "force": True}
            ).json()

            def one_search(i: int) -> int:
                with TestClient(app) as worker:
                    response = worker.post(
                        "/api/search", json={"prompt": "cat", "seed": i, "k": 5}
                    )
                    return response.status_code

            with ThreadPoolExecutor(max_workers=8) as pool:
                statuses = list(pool.map(one_search, range(100)))

            assert all(code < 500 for code in statuses), statuses
            assert statuses.count(200) == 100  # catalog unchanged: all succeed
            wait_for_job(client, job["job_id"])

    def test_search_never_mutates_index(self, service):
        app, engine, config = service
        with TestClient(app) as client:
            build_index_via_api(client)
            index_before = engine.get_index(Path(config.catalog_root), "quadrant-mean")
            matrix_before = index_before.matrix.tobytes()
            for seed in range(5):
                client.post("/api/search", json={"prompt": "food", "seed": seed})
            index_after = engine.get_index(Path(config.catalog_root), "quadrant-mean")
            assert index_after is index_before
            assert index_after.matrix.tobytes() == matrix_before


class TestStaticUI:
    def test_fallback_page_without_ui_build(self, service):
        app, _, _ = service
        with TestClient(app) as client:
            response = client.get("/")
        assert response.status_code == 200
        assert "pixseek" in response.text

    def test_built_ui_served_when_present(self, tmp_path):
        ui = tmp_path / "dist"
        ui.mkdir()
        (ui / "index.html").write_text("<html><body id='app'>ui</body></html>")
        config = AppConfig(
            catalog_root=REPO_DATA / "desk_dataset",
            model_registry_dir=REPO_DATA / "stub_registry",
            index_cache_dir=tmp_path / "cache",
            ui_dir=ui,
        )
        app = create_app(config)
        with TestClient(app) as client:
            response = client.get("/")
        assert "id='app'" in response.text
