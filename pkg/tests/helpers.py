"""Shared builders for the test suite: layouts, annotation sets, projects."""

from __future__ import annotations

import random
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from pdfannot import Bounds, Label, LabelSchema, PageInfo, PageTokenLayout, Token
from pdfannot.annotations import Annotation, RelationGroup, TokenRef, snap_bounds
from pdfannot.pdf import SyntheticPage, TextPlacement, build_pdf
from pdfannot.store import ProjectStore

DEFAULT_LABELS = (
    ("Title", "#e6194b"),
    ("Body", "#3cb44b"),
    ("Figure", "#4363d8"),
)


def make_schema(
    labels: Sequence[Tuple[str, str]] = DEFAULT_LABELS,
    relations: Sequence[str] = ("Linked",),
    freeform: Sequence[str] = ("Figure",),
) -> LabelSchema:
    return LabelSchema(
        labels=[Label(text=t, color=c, freeform=t in freeform) for t, c in labels],
        relations=list(relations),
    )


def make_grid_layout(
    rows: int = 4,
    cols: int = 5,
    *,
    page_index: int = 0,
    width: float = 612.0,
    height: float = 792.0,
    origin: Tuple[float, float] = (50.0, 60.0),
    cell: Tuple[float, float] = (70.0, 30.0),
    token_size: Tuple[float, float] = (50.0, 12.0),
    rng: Optional[random.Random] = None,
    jitter: float = 0.0,
) -> PageTokenLayout:
    """A rows x cols token grid.  Gaps stay at ``cell - token_size`` minus any
    jitter, so callers control whether snap padding can reach a neighbor."""
    ox, oy = origin
    tokens = []
    for r in range(rows):
        for c in range(cols):
            dw = rng.uniform(-jitter, jitter) if rng and jitter else 0.0
            dh = rng.uniform(-jitter, jitter) if rng and jitter else 0.0
            left = ox + c * cell[0]
            top = oy + r * cell[1]
            tokens.append(
                Token(
                    text=f"t{r}x{c}",
                    bounds=Bounds(left, top, left + token_size[0] + dw, top + token_size[1] + dh),
                )
            )
    return PageTokenLayout(page=PageInfo(index=page_index, width=width, height=height), tokens=tokens)


def textual_annotation(
    layout: PageTokenLayout,
    token_indices: Sequence[int],
    *,
    ann_id: str,
    label: str,
    padding: float = 3.0,
    clamp_to_page: bool = True,
) -> Annotation:
    """A valid token-backed annotation with canonical (snapped) bounds."""
    tokens = [layout.tokens[i] for i in token_indices]
    bounds = snap_bounds(tokens, padding, layout.page if clamp_to_page else None)
    return Annotation(
        id=ann_id,
        page=layout.page.index,
        label=label,
        bounds=bounds,
        tokens=tuple(TokenRef(layout.page.index, i) for i in token_indices),
    )


def freeform_annotation(
    *,
    ann_id: str,
    page: int,
    label: str,
    bounds: Tuple[float, float, float, float],
) -> Annotation:
    return Annotation(id=ann_id, page=page, label=label, bounds=Bounds(*bounds), tokens=None)


def classic_pdf(
    bodies: Dict[int, bytes],
    root: int,
    *,
    header: bytes = b"%PDF-1.4\n",
    trailer_extra: bytes = b"",
    updates: Optional[List[Dict[int, bytes]]] = None,
) -> bytes:
    """Assemble numbered objects into a classic-xref PDF (plus optional
    incremental-update sections).  Lower-level than ``build_pdf``: callers
    control every object, so malformed or exotic files can be produced."""
    out = bytearray(header)
    offsets: Dict[int, int] = {}

    def write_section(section: Dict[int, bytes], prev: Optional[int]) -> int:
        for num in sorted(section):
            offsets[num] = len(out)
            out.extend(b"%d 0 obj\n" % num)
            out.extend(section[num])
            out.extend(b"\nendobj\n")
        xref_at = len(out)
        out.extend(b"xref\n")
        size = max(offsets) + 1
        if prev is None:
            out.extend(b"0 %d\n" % size)
            out.extend(b"0000000000 65535 f \n")
            for num in range(1, size):
                if num in offsets:
                    out.extend(b"%010d 00000 n \n" % offsets[num])
                else:
                    out.extend(b"0000000000 65535 f \n")
        else:
            out.extend(b"0 1\n0000000000 65535 f \n")
            for num in sorted(section):
                out.extend(b"%d 1\n%010d 00000 n \n" % (num, offsets[num]))
        out.extend(b"trailer\n<< /Size %d /Root %d 0 R " % (size, root))
        if prev is not None:
            out.extend(b"/Prev %d " % prev)
        out.extend(trailer_extra)
        out.extend(b">>\nstartxref\n%d\n%%%%EOF\n" % xref_at)
        return xref_at

    xref_at = write_section(bodies, None)
    for update in updates or []:
        xref_at = write_section(update, xref_at)
    return bytes(out)


def minimal_bodies(media: bytes = b"[0 0 612 792]", content: bytes = b"") -> Dict[int, bytes]:
    """Object set for a one-page document around ``classic_pdf``."""
    stream = b"<< /Length %d >>\nstream\n%s\nendstream" % (len(content), content)
    return {
        1: b"<< /Type /Catalog /Pages 2 0 R >>",
        2: b"<< /Type /Pages /Kids [3 0 R] /Count 1 >>",
        3: b"<< /Type /Page /Parent 2 0 R /MediaBox %s /Contents 4 0 R >>" % media,
        4: stream,
    }


def hello_world_pdf(**kwargs) -> bytes:
    page = SyntheticPage(
        placements=[TextPlacement(x=72.0, y=700.0, text="Hello World")],
    )
    return build_pdf([page], **kwargs)


def make_project(
    root: Path,
    *,
    schema: Optional[LabelSchema] = None,
    documents: Sequence[bytes] = (),
) -> Tuple[ProjectStore, List[str]]:
    store = ProjectStore(root)
    store.save_schema(schema or make_schema())
    hashes = [store.add_document(pdf) for pdf in documents]
    return store, hashes


# ----------------------------------------------------------------------
# the designed three-annotator fixture: one 20-token document where the
# pairwise token accuracies come out to exactly 90.0, 80.0 and 70.0.

AGREEMENT_EXPECTED = {("ann-a", "ann-b"): 90.0, ("ann-a", "ann-c"): 80.0, ("ann-b", "ann-c"): 70.0}


def agreement_fixture_pdf() -> bytes:
    """A synthetic page holding 4 lines x 5 words = 20 tokens."""
    lines = [
        "alpha beta gamma delta epsilon",
        "zeta eta theta iota kappa",
        "lam mu nu xi omicron",
        "pi rho sigma tau upsilon",
    ]
    placements = [
        TextPlacement(x=72.0, y=700.0 - 20.0 * i, text=line) for i, line in enumerate(lines)
    ]
    return build_pdf([SyntheticPage(placements=placements)])


def _grouped(layout: PageTokenLayout, assignment: Dict[int, str]) -> List[Annotation]:
    """One annotation per contiguous same-label run of token indices."""
    annotations: List[Annotation] = []
    run: List[int] = []
    run_label = None
    ordered = sorted(assignment)

    def flush():
        if run:
            annotations.append(
                textual_annotation(
                    layout, list(run), ann_id=f"a{len(annotations)}", label=run_label
                )
            )

    for idx in ordered:
        label = assignment[idx]
        if run and (label != run_label or idx != run[-1] + 1):
            flush()
            run = []
        run.append(idx)
        run_label = label
    flush()
    return annotations


def agreement_fixture_sets(layout: PageTokenLayout) -> Dict[str, List[Annotation]]:
    """Token-label assignments engineered for the 90/80/70 pairwise grid."""
    n = len(layout.tokens)
    assert n == 20, f"fixture expects 20 tokens, extractor produced {n}"
    a = {i: "Body" for i in range(20)}
    b = {i: ("Title" if i >= 18 else "Body") for i in range(20)}
    c = {i: ("Title" if 14 <= i <= 17 else "Body") for i in range(20)}
    return {
        "ann-a": _grouped(layout, a),
        "ann-b": _grouped(layout, b),
        "ann-c": _grouped(layout, c),
    }
