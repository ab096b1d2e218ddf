"""Dataset exporters: COCO-style detection data and a token-label table.

Both exporters are deterministic: the same project state always serializes
to the same bytes, so exports can be diffed and cached by content hash.
"""

from __future__ import annotations

import csv
import logging
import subprocess
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, IO, List, Optional, Sequence, Tuple

from .agreement import token_claims
from .errors import InvalidDimensions, ProcessorFailed, UnknownCategory, UnknownAnnotator
from .store import PREDICTIONS, ProjectStore

log = logging.getLogger("pdfannot.export")

TOKEN_TABLE_COLUMNS = (
    "document",
    "page",
    "token",
    "text",
    "label",
    "annotation_id",
    "annotator",
)
UNLABELED = "O"


@dataclass
class CocoExport:
    dataset: dict
    manifest: List[dict]
    warnings: List[str] = field(default_factory=list)


def _check_annotators(store: ProjectStore, annotators: Sequence[str]) -> List[str]:
    if not annotators:
        raise UnknownAnnotator("no annotators requested")
    known = set(store.annotators(include_predictions=True))
    out = []
    for name in annotators:
        if name not in known:
            raise UnknownAnnotator(f"unknown annotator {name!r}")
        if name not in out:
            out.append(name)
    return sorted(out)


def export_coco(
    store: ProjectStore,
    annotators: Sequence[str],
    category_filter: Optional[Sequence[str]] = None,
    scale: float = 1.0,
    rasterizer: Optional[str] = None,
    raster_dir: Optional[Path] = None,
) -> CocoExport:
    """Collect the saved annotations of ``annotators`` into a COCO dataset.

    One image per (document, page) that carries at least one exported
    annotation; category ids follow the project schema order.  ``scale``
    converts from PDF points to raster pixels.
    """
    if not isinstance(scale, (int, float)) or isinstance(scale, bool) or scale <= 0:
        raise InvalidDimensions(f"scale must be positive, got {scale!r}")
    scale = float(scale)
    annotators = _check_annotators(store, annotators)

    schema_names = store.schema.label_names()
    if category_filter is not None:
        wanted = set(category_filter)
        unknown = wanted - set(schema_names)
        if unknown:
            raise UnknownCategory(f"unknown categories: {', '.join(sorted(unknown))}")
        categories = [name for name in schema_names if name in wanted]
    else:
        categories = list(schema_names)
    category_ids = {name: i + 1 for i, name in enumerate(categories)}

    # Gather exportable annotations grouped by (document, page).
    per_image: Dict[Tuple[str, int], List[Tuple[str, object]]] = {}
    for annotator in annotators:
        for doc in sorted(store.saved_documents(annotator)):
            anns, _ = store.load_saved(annotator, doc)
            for ann in anns:
                if ann.label in category_ids:
                    per_image.setdefault((doc, ann.page), []).append((annotator, ann))

    warnings: List[str] = []
    images = []
    annotations = []
    manifest = []
    image_ids: Dict[Tuple[str, int], int] = {}
    page_sizes: Dict[str, List[Tuple[float, float]]] = {}

    for key in sorted(per_image):
        doc, page = key
        if doc not in page_sizes:
            page_sizes[doc] = [(l.page.width, l.page.height) for l in store.load_structure(doc)]
        sizes = page_sizes[doc]
        if not (0 <= page < len(sizes)):
            warnings.append(f"skipping annotations on missing page {page} of {doc[:12]}")
            continue
        width, height = sizes[page]
        image_id = len(images) + 1
        image_ids[key] = image_id
        file_name = f"{doc}_{page}.jpg"
        images.append(
            {
                "id": image_id,
                "file_name": file_name,
                "width": int(round(width * scale)),
                "height": int(round(height * scale)),
            }
        )
        manifest.append({"file_name": file_name, "document": doc, "page": page, "scale": scale})

    next_id = 1
    for key in sorted(image_ids):
        doc, page = key
        for annotator, ann in per_image[key]:
            b = ann.bounds
            bbox = [b.left * scale, b.top * scale, b.width * scale, b.height * scale]
            annotations.append(
                {
                    "id": next_id,
                    "image_id": image_ids[key],
                    "category_id": category_ids[ann.label],
                    "bbox": bbox,
                    "area": bbox[2] * bbox[3],
                    "iscrowd": 0,
                    "annotator": annotator,
                }
            )
            next_id += 1

    dataset = {
        "info": {"description": "PDF annotation export", "version": "1.0"},
        "images": images,
        "annotations": annotations,
        "categories": [
            {"id": category_ids[name], "name": name, "supercategory": "annotation"}
            for name in categories
        ],
    }
    if not annotations:
        warnings.append("export contains no annotations")
    if rasterizer:
        _rasterize(store, manifest, rasterizer, raster_dir)
    else:
        warnings.append("no rasterizer configured; page images were not generated")
    for message in warnings:
        log.warning("%s", message)
    return CocoExport(dataset=dataset, manifest=manifest, warnings=warnings)


def _rasterize(
    store: ProjectStore,
    manifest: Sequence[dict],
    template: str,
    raster_dir: Optional[Path],
) -> None:
    """Render each manifest page via the external command template.

    The template must mention ``{pdf}``, ``{page}`` (0-based) and ``{out}``;
    ``{scale}`` is substituted when present.
    """
    for placeholder in ("{pdf}", "{page}", "{out}"):
        if placeholder not in template:
            raise ValueError(f"rasterizer command must contain a {placeholder} placeholder")
    if raster_dir is None:
        raise ValueError("raster output directory is required when a rasterizer is configured")
    raster_dir = Path(raster_dir)
    raster_dir.mkdir(parents=True, exist_ok=True)
    import shlex

    for entry in manifest:
        values = {
            "pdf": str(store.root / entry["document"] / "document.pdf"),
            "page": str(entry["page"]),
            "out": str(raster_dir / entry["file_name"]),
            "scale": str(entry["scale"]),
        }
        argv = [_fill(arg, values) for arg in shlex.split(template)]
        try:
            proc = subprocess.run(argv, capture_output=True, check=False)
        except OSError as exc:
            raise ProcessorFailed(f"could not run rasterizer {argv[0]!r}: {exc}", returncode=-1) from exc
        if proc.returncode != 0:
            stderr = proc.stderr.decode("utf-8", "replace").strip()[:2000]
            raise ProcessorFailed(
                f"rasterizer failed on {entry['file_name']}: {stderr or proc.returncode}",
                returncode=proc.returncode,
                stderr=stderr,
            )


def _fill(arg: str, values: dict) -> str:
    for key, value in values.items():
        arg = arg.replace("{" + key + "}", value)
    return arg


# ----------------------------------------------------------------------
# token-label table

def export_token_table(store: ProjectStore, annotators: Sequence[str]) -> List[dict]:
    """One row per (document, page, token, annotator) with the winning label.

    Tokens outside every annotation get the ``O`` sentinel; the winning
    label per token is resolved exactly as the agreement metrics do.
    """
    if not annotators:
        return []
    annotators = _check_annotators(store, annotators)
    docs = sorted(set().union(*(store.saved_documents(a) for a in annotators)))
    rows: List[dict] = []
    for doc in docs:
        layouts = store.load_structure(doc)
        claims_by_annotator = {}
        for annotator in annotators:
            anns, _ = store.load_saved(annotator, doc)
            claims_by_annotator[annotator] = token_claims(anns, layouts, document=doc)
        for layout in layouts:
            page = layout.page.index
            for token_index, token in enumerate(layout.tokens):
                for annotator in annotators:
                    claim = claims_by_annotator[annotator].get((doc, page, token_index))
                    rows.append(
                        {
                            "document": doc,
                            "page": page,
                            "token": token_index,
                            "text": token.text,
                            "label": claim[1] if claim else UNLABELED,
                            "annotation_id": claim[0] if claim else "",
                            "annotator": annotator,
                        }
                    )
    return rows


def write_token_table(rows: Sequence[dict], fh: IO[str]) -> None:
    writer = csv.DictWriter(fh, fieldnames=list(TOKEN_TABLE_COLUMNS), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
