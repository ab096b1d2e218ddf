"""Command-line project administration."""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import click

from . import __version__
from .agreement import AgreementReport, agreement_matrix
from .errors import DomainError
from .export import export_coco, export_token_table, write_token_table
from .pdf import run_external_processor
from .store import PREDICTIONS, ProjectStore

MEASURE_CSV_COLUMNS = (
    "annotator_gt",
    "annotator_pred",
    "textual_accuracy",
    "freeform_ap",
    "tokens_compared",
    "boxes_compared",
)


def _domain_errors(fn):
    """Turn domain failures into clean exit-code-1 messages."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DomainError as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


@click.group()
@click.version_option(__version__)
@click.option(
    "--project",
    "project_root",
    type=click.Path(path_type=Path, file_okay=False),
    envvar="PAWLS_ROOT",
    required=True,
    help="Project root directory (env: PAWLS_ROOT).",
)
@click.pass_context
def main(ctx: click.Context, project_root: Path) -> None:
    """Manage a PDF annotation project."""
    ctx.obj = project_root


def _store(ctx: click.Context) -> ProjectStore:
    return ProjectStore(ctx.obj)


@main.command()
@click.argument("pdfs", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--processor",
    default=None,
    help="External token extractor; a command template with {pdf} and optionally {out}.",
)
@click.pass_context
@_domain_errors
def preprocess(ctx: click.Context, pdfs: Sequence[Path], processor: Optional[str]) -> None:
    """Register PDFs and extract their token layouts."""
    store = _store(ctx)
    for pdf in pdfs:
        data = pdf.read_bytes()
        layouts = run_external_processor(processor, pdf) if processor else None
        doc = store.add_document(data, layouts=layouts)
        structure = store.load_structure(doc)
        token_count = sum(len(layout.tokens) for layout in structure)
        click.echo(f"{doc}  {pdf.name}  ({len(structure)} pages, {token_count} tokens)")


@main.command()
@click.argument("annotator")
@click.argument("docs", nargs=-1)
@click.option("--all", "assign_all", is_flag=True, help="Assign every registered document.")
@click.pass_context
@_domain_errors
def assign(ctx: click.Context, annotator: str, docs: Sequence[str], assign_all: bool) -> None:
    """Assign documents (by hash) to an annotator."""
    store = _store(ctx)
    wanted = store.list_documents() if assign_all else list(docs)
    if not wanted:
        raise click.UsageError("list document hashes or pass --all")
    assigned = store.assign(annotator, wanted)
    click.echo(f"{annotator} is assigned {len(assigned)} document(s)")


@main.command()
@click.pass_context
@_domain_errors
def status(ctx: click.Context) -> None:
    """Show per-annotator progress."""
    store = _store(ctx)
    progress = store.progress()
    if not progress:
        click.echo("no assignments yet")
        return
    header = f"{'annotator':<24} {'assigned':>8} {'in progress':>12} {'finished':>9} {'junk':>5}"
    click.echo(header)
    click.echo("-" * len(header))
    for name in sorted(progress):
        counts = progress[name]
        click.echo(
            f"{name:<24} {counts['assigned']:>8} {counts['in_progress']:>12} "
            f"{counts['finished']:>9} {counts['junk']:>5}"
        )


def _format_cell(report: Optional[AgreementReport]) -> str:
    if report is None:
        return "n/a"
    return f"{report.textual_accuracy:.2f} / {report.freeform_ap:.3f}"


@main.command()
@click.option(
    "--include-predictions",
    is_flag=True,
    help="Also compare annotators against pre-populated predictions.",
)
@click.option(
    "--out",
    "csv_path",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write the pairwise results as CSV.",
)
@click.pass_context
@_domain_errors
def measure(ctx: click.Context, include_predictions: bool, csv_path: Optional[Path]) -> None:
    """Inter-annotator agreement for every annotator pair.

    Each cell reads "token accuracy / box average precision" with the row
    annotator as ground truth.
    """
    store = _store(ctx)
    annotators = [
        name
        for name in store.annotators(include_predictions=include_predictions)
        if store.saved_documents(name)
    ]
    if len(annotators) < 2:
        raise click.ClickException("need at least two annotators with saved annotations")
    matrix = agreement_matrix(store, annotators)

    rows = [
        ["-" if gt == pred else _format_cell(matrix[(gt, pred)]) for pred in annotators]
        for gt in annotators
    ]
    cells = [c for row in rows for c in row]
    width = max(len(text) for text in [*annotators, *cells]) + 2
    click.echo("rows are ground truth; cells: token accuracy / box AP")
    click.echo(" " * width + "".join(f"{a:>{width}}" for a in annotators))
    for gt, row in zip(annotators, rows):
        click.echo(f"{gt:>{width}}" + "".join(f"{c:>{width}}" for c in row))

    if csv_path is not None:
        import csv as csv_mod

        csv_path.parent.mkdir(parents=True, exist_ok=True)
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv_mod.writer(fh, lineterminator="\n")
            writer.writerow(MEASURE_CSV_COLUMNS)
            for gt in annotators:
                for pred in annotators:
                    if gt == pred:
                        continue
                    report = matrix[(gt, pred)]
                    if report is None:
                        writer.writerow([gt, pred, "", "", 0, 0])
                    else:
                        writer.writerow(
                            [
                                gt,
                                pred,
                                repr(report.textual_accuracy),
                                repr(report.freeform_ap),
                                report.tokens_compared,
                                report.boxes_compared,
                            ]
                        )
        click.echo(f"wrote {csv_path}")


@main.group()
def export() -> None:
    """Export stored annotations."""


@export.command("coco")
@click.option("--annotator", "-a", "annotators", multiple=True, help="Annotators to export (default: all with saves).")
@click.option("--categories", default=None, help="Comma-separated category filter.")
@click.option("--scale", default=1.0, show_default=True, help="Points-to-pixels scale factor.")
@click.option(
    "--out",
    "out_path",
    type=click.Path(dir_okay=False, path_type=Path),
    default=Path("coco.json"),
    show_default=True,
)
@click.option("--rasterizer", default=None, help="Command template with {pdf} {page} {out} (and optional {scale}).")
@click.option(
    "--raster-dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Where rasterized page images go (required with --rasterizer).",
)
@click.pass_context
@_domain_errors
def export_coco_cmd(
    ctx: click.Context,
    annotators: Sequence[str],
    categories: Optional[str],
    scale: float,
    out_path: Path,
    rasterizer: Optional[str],
    raster_dir: Optional[Path],
) -> None:
    """Write a COCO detection dataset (plus a page-image manifest)."""
    store = _store(ctx)
    names = list(annotators) or [a for a in store.annotators() if store.saved_documents(a)]
    category_filter = [c.strip() for c in categories.split(",") if c.strip()] if categories else None
    try:
        result = export_coco(
            store,
            names,
            category_filter=category_filter,
            scale=scale,
            rasterizer=rasterizer,
            raster_dir=raster_dir,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(json.dumps(result.dataset, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    manifest_path = out_path.with_name(out_path.stem + ".manifest.json")
    manifest_path.write_text(json.dumps(result.manifest, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    for warning in result.warnings:
        click.echo(f"warning: {warning}", err=True)
    click.echo(
        f"wrote {out_path} ({len(result.dataset['images'])} images, "
        f"{len(result.dataset['annotations'])} annotations) and {manifest_path}"
    )


@export.command("tokens")
@click.option("--annotator", "-a", "annotators", multiple=True, help="Annotators to export (default: all with saves).")
@click.option("--out", "out_file", type=click.File("w", encoding="utf-8"), default="-")
@click.pass_context
@_domain_errors
def export_tokens_cmd(ctx: click.Context, annotators: Sequence[str], out_file) -> None:
    """Write the per-token label table as CSV."""
    store = _store(ctx)
    names = list(annotators) or [a for a in store.annotators() if store.saved_documents(a)]
    rows = export_token_table(store, names)
    write_token_table(rows, out_file)
    if out_file is not sys.stdout:
        click.echo(f"wrote {len(rows)} rows", err=True)


@main.command()
@click.argument("predictions_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.pass_context
@_domain_errors
def prepopulate(ctx: click.Context, predictions_file: Path) -> None:
    """Pre-populate documents with model predictions.

    The file maps document hashes to annotation sets; bounds-only textual
    predictions are snapped onto tokens.  Documents that fail validation are
    reported and skipped.
    """
    store = _store(ctx)
    try:
        payload = json.loads(predictions_file.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise click.ClickException(f"{predictions_file}: not valid JSON: {exc}") from exc
    result = store.prepopulate(payload)
    for doc, message in result.failures:
        click.echo(f"failed {doc}: {message}", err=True)
    click.echo(f"prepopulated {len(result.applied)} document(s), {len(result.failures)} failure(s)")
    if result.failures and not result.applied:
        raise click.exceptions.Exit(1)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", envvar="PAWLS_PORT", default=8000, show_default=True, help="Port (env: PAWLS_PORT).")
@click.option("--identity-header", default="X-Annotator", show_default=True)
@click.option(
    "--production",
    is_flag=True,
    help="Require the identity header instead of assuming a development user.",
)
@click.option("--default-identity", default="development_user", show_default=True)
@click.option(
    "--static",
    "static_dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Directory with the built browser UI to serve at /.",
)
@click.pass_context
@_domain_errors
def serve(
    ctx: click.Context,
    host: str,
    port: int,
    identity_header: str,
    production: bool,
    default_identity: str,
    static_dir: Optional[Path],
) -> None:
    """Run the annotation HTTP service."""
    import uvicorn

    from .service import create_app

    app = create_app(
        ctx.obj,
        header_name=identity_header,
        default_identity=None if production else default_identity,
        static_dir=static_dir,
    )
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
