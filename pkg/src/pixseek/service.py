"""Local HTTP service: JSON API consumed by the web UI (and anything else).

Binds to loopback by default; this is a personal tool, not a public server.
Index jobs run asynchronously and swap the served index atomically, so
searches keep working (against the previous index) while a rebuild runs.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import HTMLResponse, JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .app import THUMBNAIL_DEFAULT_SIZE, SearchEngine, search_response_payload
from .config import AppConfig
from .errors import (
    DecodeError,
    EmptyCatalog,
    EmptyPrompt,
    ModelFileMissing,
    ModelMismatch,
    PixseekError,
    PromptNotFound,
    RootNotADirectory,
    RootNotFound,
    StaleIndex,
)
from .evaluation import model_size

_ERROR_STATUS = {
    PromptNotFound: (404, "PROMPT_NOT_FOUND"),
    StaleIndex: (409, "STALE_INDEX"),
    ModelFileMissing: (404, "MODEL_MISSING"),
    ModelMismatch: (409, "MODEL_MISMATCH"),
    EmptyCatalog: (409, "EMPTY_CATALOG"),
    EmptyPrompt: (400, "EMPTY_PROMPT"),
    RootNotFound: (400, "BAD_PATH"),
    RootNotADirectory: (400, "BAD_PATH"),
    DecodeError: (404, "BAD_IMAGE"),
}


def _error_response(status: int, code: str, message: str, **extra) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "message": message, **extra}}
    )


def _map_error(exc: PixseekError) -> JSONResponse:
    for cls, (status, code) in _ERROR_STATUS.items():
        if isinstance(exc, cls):
            extra = {}
            if isinstance(exc, PromptNotFound):
                extra = {"attempts": exc.attempts, "detector_calls": exc.detector_calls}
            return _error_response(status, code, str(exc), **extra)
    return _error_response(400, exc.__class__.__name__.upper(), str(exc))


@dataclass
class IndexJob:
    job_id: str
    root: str
    model_id: str
    state: str = "queued"  # queued | running | done | failed
    done: int = 0
    total: int = 0
    action: str = ""
    message: str = ""
    started_at: float = field(default_factory=time.time)
    finished_at: float | None = None

    def payload(self) -> dict:
        return {
            "job_id": self.job_id,
            "root": self.root,
            "model": self.model_id,
            "state": self.state,
            "done": self.done,
            "total": self.total,
            "action": self.action,
            "message": self.message,
        }


class JobManager:
    """At most one active index job per (root, model); others join it."""

    def __init__(self, engine: SearchEngine):
        self._engine = engine
        self._jobs: dict[str, IndexJob] = {}
        self._active: dict[tuple[str, str], str] = {}
        self._lock = threading.Lock()

    def get(self, job_id: str) -> IndexJob | None:
        with self._lock:
            return self._jobs.get(job_id)

    def all_jobs(self) -> list[IndexJob]:
        with self._lock:
            return sorted(self._jobs.values(), key=lambda j: j.started_at, reverse=True)

    def start(self, root: Path, model_id: str, force: bool) -> tuple[IndexJob, bool]:
        key = (str(Path(root).resolve()), model_id)
        with self._lock:
            active_id = self._active.get(key)
            if active_id is not None:
                active = self._jobs[active_id]
                if active.state in ("queued", "running"):
                    return active, False
            job = IndexJob(job_id=uuid.uuid4().hex[:12], root=str(root), model_id=model_id)
            self._jobs[job.job_id] = job
            self._active[key] = job.job_id

        def progress(done: int, total: int) -> None:
            job.done, job.total = done, total

        def run() -> None:
            job.state = "running"
            try:
                outcome = self._engine.ensure_index(
                    Path(root), model_id, force=force, on_progress=progress
                )
                job.action = outcome.action
                job.done = job.total = len(outcome.index)
                job.message = f"{outcome.action}: {len(outcome.index)} images indexed"
                if outcome.skipped:
                    job.message += f", {len(outcome.skipped)} skipped"
                job.state = "done"
            except PixseekError as exc:
                job.state = "failed"
                job.message = str(exc)
            finally:
                job.finished_at = time.time()

        threading.Thread(target=run, name=f"index-{job.job_id}", daemon=True).start()
        return job, True


class SearchRequest(BaseModel):
    prompt: str
    threshold: float | None = None
    k: int | None = None
    model: str | None = None
    seed: int | None = None


class IndexRequest(BaseModel):
    dir: str | None = None
    model: str | None = None
    force: bool = False


_FALLBACK_PAGE = """<!doctype html>
<html><head><title>pixseek</title></head>
<body><h1>pixseek service is running</h1>
<p>The web UI is not built. Build it with <code>npm run build</code> in
<code>frontend/</code> and point <code>ui_dir</code> at
<code>frontend/dist</code>, or use the JSON API under <code>/api/</code>.</p>
</body></html>"""


def create_app(config: AppConfig, engine: SearchEngine | None = None) -> FastAPI:
    engine = engine or SearchEngine(config)
    app = FastAPI(title="pixseek", docs_url=None, redoc_url=None)
    jobs = JobManager(engine)
    app.state.engine = engine
    app.state.jobs = jobs

    @app.exception_handler(PixseekError)
    async def handle_pixseek_error(request: Request, exc: PixseekError):
        return _map_error(exc)

    @app.get("/api/models")
    def list_models():
        models = []
        for descriptor in engine.registry.list():
            models.append(
                {
                    "model_id": descriptor.model_id,
                    "role": descriptor.role,
                    "feature_dim": descriptor.feature_dim,
                    "revision": descriptor.revision[:12],
                    "size_bytes": model_size(descriptor),
                }
            )
        return {
            "models": models,
            "default_model": config.default_model,
            "default_detector": config.default_detector,
        }

    @app.post("/api/index")
    def start_index(request: IndexRequest):
        root = Path(request.dir) if request.dir else Path(config.catalog_root)
        if not root.is_dir():
            return _error_response(400, "BAD_PATH", f"{root} is not a directory")
        extractor = engine.extractor(request.model)  # MODEL_MISSING mapped on failure
        job, created = jobs.start(root, extractor.model_id, request.force)
        return {"job_id": job.job_id, "created": created, "status": job.payload()}

    @app.get("/api/index/status")
    def index_status(job_id: str | None = None):
        if job_id is None:
            return {"jobs": [job.payload() for job in jobs.all_jobs()]}
        job = jobs.get(job_id)
        if job is None:
            return _error_response(404, "JOB_NOT_FOUND", f"no job {job_id!r}")
        return job.payload()

    @app.post("/api/search")
    def run_search(request: SearchRequest):
        if not request.prompt.strip():
            return _error_response(400, "EMPTY_PROMPT", "prompt must be nonempty")
        results = engine.run_search(
            request.prompt,
            threshold=request.threshold,
            k=request.k,
            model_id=request.model,
            seed=request.seed,
        )
        return search_response_payload(results)

    @app.get("/api/image")
    def serve_image(path: str, size: int = Query(default=THUMBNAIL_DEFAULT_SIZE)):
        try:
            data = engine.thumbnail(Path(config.catalog_root), path, size)
        except (ValueError, FileNotFoundError) as exc:
            return _error_response(400, "BAD_PATH", str(exc))
        return Response(content=data, media_type="image/jpeg")

    ui_dir = Path(config.ui_dir) if config.ui_dir else None
    if ui_dir and (ui_dir / "index.html").is_file():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        def home():
            return _FALLBACK_PAGE

    return app


def serve(config: AppConfig) -> None:
    """Run the service until interrupted."""
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="info")
