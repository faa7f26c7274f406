"""Command-line interface: index, search, bench, serve.

Exit codes: 0 success, 2 prompt not found, 1 anything else.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .app import SearchEngine, search_response_payload
from .catalog import load_image, scan_directory
from .config import AppConfig, load_config
from .errors import PixseekError, PromptNotFound
from .evaluation import (
    EvalReport,
    ModelSummary,
    benchmark_inference,
    load_dataset_manifest,
    model_size,
    render_report,
    run_prompt_eval,
)
from .models.loader import load_extractor

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PROMPT_NOT_FOUND = 2


@click.group()
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
              help="Config file (key = value); PIXSEEK_* env vars override.")
@click.pass_context
def main(ctx: click.Context, config_path: Path | None) -> None:
    """Local text-to-image search over your photo directory."""
    try:
        ctx.obj = load_config(config_path)
    except PixseekError as exc:
        raise click.ClickException(str(exc)) from exc


def _fail(exc: PixseekError) -> None:
    click.echo(f"error: {exc}", err=True)
    code = EXIT_PROMPT_NOT_FOUND if isinstance(exc, PromptNotFound) else EXIT_ERROR
    sys.exit(code)


@main.command("index")
@click.option("--dir", "directory", type=click.Path(path_type=Path), default=None,
              help="Catalog directory (default: configured catalog_root).")
@click.option("--model", default=None, help="Extractor model id.")
@click.option("--force", is_flag=True, help="Full rebuild regardless of the diff.")
@click.pass_obj
def cmd_index(config: AppConfig, directory: Path | None, model: str | None, force: bool) -> None:
    """Build or incrementally update the feature index."""
    engine = SearchEngine(config)
    root = directory or config.catalog_root

    def progress(done: int, total: int) -> None:
        if total and (done % 25 == 0 or done == total):
            click.echo(f"  extracting {done}/{total}", err=True)

    try:
        outcome = engine.ensure_index(root, model, force=force, on_progress=progress)
    except PixseekError as exc:
        _fail(exc)
        return
    if outcome.action == "reused":
        click.echo("0 changed, index reused")
    elif outcome.action == "built":
        click.echo(f"indexed {len(outcome.index)} images")
    else:
        changes = outcome.changes
        assert changes is not None
        unchanged = len(outcome.index) - len(changes.added) - len(changes.modified)
        click.echo(
            f"updated index: {len(changes.added)} added, {len(changes.removed)} removed, "
            f"{len(changes.modified)} modified, {unchanged} unchanged"
        )
    for path, reason in outcome.skipped:
        click.echo(f"  skipped {path}: {reason}", err=True)


@main.command("search")
@click.option("--dir", "directory", type=click.Path(path_type=Path), default=None)
@click.option("--prompt", required=True)
@click.option("--threshold", type=float, default=None,
              help="Detector confidence threshold in [0, 1].")
@click.option("--k", type=int, default=None, help="Number of results.")
@click.option("--model", default=None, help="Extractor model id.")
@click.option("--detector", default=None, help="Detector model id.")
@click.option("--seed", type=int, default=None, help="Replay seed for the random query draw.")
@click.option("--json", "as_json", is_flag=True, help="Emit the SearchResponse JSON.")
@click.pass_obj
def cmd_search(
    config: AppConfig,
    directory: Path | None,
    prompt: str,
    threshold: float | None,
    k: int | None,
    model: str | None,
    detector: str | None,
    seed: int | None,
    as_json: bool,
) -> None:
    """Search the catalog for images matching a text prompt."""
    engine = SearchEngine(config)
    root = Path(directory) if directory else Path(config.catalog_root)
    try:
        outcome = engine.ensure_index(root, model)  # auto-build/update, announced
        if outcome.action != "reused":
            click.echo(f"index {outcome.action}: {len(outcome.index)} images", err=True)
        results = engine.run_search(
            prompt, root=root, threshold=threshold, k=k,
            model_id=model, detector_id=detector, seed=seed,
        )
    except PixseekError as exc:
        _fail(exc)
        return

    if as_json:
        click.echo(json.dumps(search_response_payload(results), indent=2))
        return
    provenance = results.provenance
    assert provenance is not None
    click.echo(
        f"query: {provenance.prompt!r} from {provenance.source_path} "
        f"(detector score {provenance.detector_score:.3f}, seed {provenance.seed})"
    )
    for rank_pos, (path, score) in enumerate(results.items, 1):
        click.echo(f"{rank_pos:>3}. {score:.4f}  {path}")


@main.command("bench")
@click.option("--manifest", "dataset_dir", type=click.Path(path_type=Path), required=True,
              help="Dataset directory containing labels.tsv and prompts.tsv.")
@click.option("--models", "model_ids", multiple=True,
              help="Extractor model ids (default: every registered extractor).")
@click.option("--detector", default=None, help="Detector model id.")
@click.option("--prompts", "prompt_list", multiple=True,
              help="Prompts to evaluate (default: all in prompts.tsv).")
@click.option("--thresholds", multiple=True, type=float, default=(0.05, 0.1, 0.2, 0.3),
              show_default=True)
@click.option("--seeds", multiple=True, type=int, default=(1, 2), show_default=True)
@click.option("--k", type=int, default=10, show_default=True)
@click.option("--bench-images", type=int, default=4, show_default=True,
              help="Images per model in the latency benchmark.")
@click.option("--warmup", type=int, default=2, show_default=True)
@click.option("--repeats", type=int, default=3, show_default=True)
@click.option("--no-timing", is_flag=True,
              help="Skip the latency benchmark (deterministic report output).")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), default=None,
              help="Directory for report.txt / report.json.")
@click.pass_obj
def cmd_bench(
    config: AppConfig,
    dataset_dir: Path,
    model_ids: tuple[str, ...],
    detector: str | None,
    prompt_list: tuple[str, ...],
    thresholds: tuple[float, ...],
    seeds: tuple[int, ...],
    k: int,
    bench_images: int,
    warmup: int,
    repeats: int,
    no_timing: bool,
    out_dir: Path | None,
) -> None:
    """Evaluate accuracy, inference latency, and size across models."""
    engine = SearchEngine(config)
    try:
        manifest = load_dataset_manifest(dataset_dir)
        detector_handle = engine.detector(detector)
    except PixseekError as exc:
        _fail(exc)
        return

    ids = list(model_ids) or [d.model_id for d in engine.registry.extractors()]
    if not ids:
        _fail(PixseekError("no extractor models registered"))
        return
    prompts = list(prompt_list) or sorted(manifest.prompt_map)

    report = EvalReport(prompts=prompts, thresholds=list(thresholds),
                        seeds=list(seeds), k=k)
    failures = 0
    for model_id in ids:
        try:
            descriptor = engine.registry.get(model_id)
            sub = run_prompt_eval(
                manifest, [descriptor], detector_handle, prompts,
                list(thresholds), list(seeds), k,
            )
            report.cells.extend(sub.cells)
            summary = sub.models[model_id]
            summary.size_bytes = model_size(descriptor)
            if not no_timing:
                extractor = load_extractor(descriptor)
                snapshot = scan_directory(manifest.root)
                images = [
                    load_image(manifest.root, e)
                    for e in snapshot.entries[: max(1, bench_images)]
                ]
                summary.timing = benchmark_inference(
                    extractor, images, warmup=warmup, repeats=repeats
                )
            report.models[model_id] = summary
        except PixseekError as exc:
            failures += 1
            click.echo(f"model {model_id} failed: {exc}", err=True)
            report.models[model_id] = ModelSummary(
                model_id=model_id, mean_accuracy=None, cells=0,
                prompt_not_found=0, error=str(exc),
            )

    text, payload = render_report(report)
    click.echo(text, nl=False)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.txt").write_text(text, encoding="utf-8")
        (out_dir / "report.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        click.echo(f"wrote {out_dir / 'report.txt'} and {out_dir / 'report.json'}", err=True)
    if failures == len(ids):
        sys.exit(EXIT_ERROR)


@main.command("models")
@click.pass_obj
def cmd_models(config: AppConfig) -> None:
    """List registered models."""
    engine = SearchEngine(config)
    descriptors = engine.registry.list()
    if not descriptors:
        click.echo(f"no models registered under {config.model_registry_dir}")
        return
    for d in descriptors:
        dim = f" dim={d.feature_dim}" if d.feature_dim else ""
        click.echo(f"{d.model_id:<20} {d.role:<10}{dim}  {d.file_path.name}")


@main.command("serve")
@click.option("--host", default=None, help="Bind host (default from config).")
@click.option("--port", type=int, default=None, help="Bind port (default from config).")
@click.pass_obj
def cmd_serve(config: AppConfig, host: str | None, port: int | None) -> None:
    """Run the local HTTP service and web UI."""
    from dataclasses import replace

    from .service import serve

    if host or port:
        config = replace(
            config, bind_address=f"{host or config.host}:{port or config.port}"
        )
    if config.ui_dir is None and Path("frontend/dist/index.html").is_file():
        config = replace(config, ui_dir=Path("frontend/dist"))
    if config.ui_dir:
        click.echo(f"serving UI from {config.ui_dir}")
    click.echo(f"serving on http://{config.bind_address}")
    serve(config)


if __name__ == "__main__":
    main()
