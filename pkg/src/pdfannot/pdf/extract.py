"""Token extraction: glyph runs are segmented into word-level tokens and
normalized into the top-left viewing frame of each page."""

from __future__ import annotations

import logging
from typing import List, Optional, Sequence, Tuple

from ..geometry import Bounds
from ..tokens import PAGE_EDGE_SLACK, PageInfo, PageTokenLayout, Token
from .content import Break, ContentInterpreter, Emitted, Glyph
from .document import Page, PdfDocument

log = logging.getLogger("pdfannot.pdf")

# A new token starts when the baseline shifts by more than this fraction of
# the font size, or when the horizontal gap exceeds this fraction (forward
# or backward).
BASELINE_JUMP_RATIO = 0.20
GAP_RATIO = 0.25

_MIN_SIZE = 1e-9
_ROUND = 3


def extract_token_layout(data: bytes) -> List[PageTokenLayout]:
    """Extract per-page word tokens with bounding boxes from a PDF.

    Coordinates are in PDF points with the origin at the top-left corner of
    each page as displayed (page rotation is already applied).
    """
    doc = PdfDocument(data)
    layouts = []
    for page in doc.pages():
        emitted = ContentInterpreter(doc, page).run()
        raw_tokens = _segment(emitted)
        layouts.append(_normalize_page(page, raw_tokens))
    return layouts


# ----------------------------------------------------------------------
# segmentation

_RawToken = Tuple[str, float, float, float, float]  # text + PDF-space box


def _segment(emitted: Sequence[Emitted]) -> List[_RawToken]:
    out: List[_RawToken] = []
    chars: List[str] = []
    boxes: List[Tuple[float, float, float, float]] = []
    prev: Optional[Glyph] = None

    def flush() -> None:
        if chars:
            x0 = min(b[0] for b in boxes)
            y0 = min(b[1] for b in boxes)
            x1 = max(b[2] for b in boxes)
            y1 = max(b[3] for b in boxes)
            out.append(("".join(chars), x0, y0, x1, y1))
        chars.clear()
        boxes.clear()

    for item in emitted:
        if isinstance(item, Break):
            flush()
            prev = None
            continue
        g = item
        if g.size <= _MIN_SIZE:
            flush()
            prev = None
            continue
        if chars and prev is not None and _boundary(prev, g):
            flush()
        for ch in g.text:
            if ch.isspace():
                flush()
            else:
                chars.append(ch)
                boxes.append((g.x0, g.y0, g.x1, g.y1))
        prev = g
    flush()
    return out


def _boundary(prev: Glyph, g: Glyph) -> bool:
    dx, dy = g.direction
    if prev.direction[0] * dx + prev.direction[1] * dy < 0.99:
        return True
    ox, oy = g.origin
    ex, ey = prev.end
    gap = (ox - ex) * dx + (oy - ey) * dy
    perp = abs((ox - ex) * dy - (oy - ey) * dx)
    limit = g.size
    return perp > BASELINE_JUMP_RATIO * limit or abs(gap) > GAP_RATIO * limit


# ----------------------------------------------------------------------
# page normalization

def _normalize_page(page: Page, raw_tokens: Sequence[_RawToken]) -> PageTokenLayout:
    bx0, by0, bx1, by1 = page.effective_box
    width = bx1 - bx0
    height = by1 - by0
    if page.rotate in (90, 270):
        view_w, view_h = round(height, _ROUND), round(width, _ROUND)
    else:
        view_w, view_h = round(width, _ROUND), round(height, _ROUND)

    tokens: List[Token] = []
    dropped = 0
    for text, x0, y0, x1, y1 in raw_tokens:
        x0, x1 = x0 - bx0, x1 - bx0
        y0, y1 = y0 - by0, y1 - by0
        if x1 <= 0 or x0 >= width or y1 <= 0 or y0 >= height:
            dropped += 1
            continue
        u0, v0, u1, v1 = _rotate_box(page.rotate, x0, y0, x1, y1, width, height)
        u0 = min(max(u0, -PAGE_EDGE_SLACK), view_w + PAGE_EDGE_SLACK)
        u1 = min(max(u1, -PAGE_EDGE_SLACK), view_w + PAGE_EDGE_SLACK)
        v0 = min(max(v0, -PAGE_EDGE_SLACK), view_h + PAGE_EDGE_SLACK)
        v1 = min(max(v1, -PAGE_EDGE_SLACK), view_h + PAGE_EDGE_SLACK)
        tokens.append(
            Token(
                text=text,
                bounds=Bounds(
                    round(u0, _ROUND),
                    round(v0, _ROUND),
                    round(u1, _ROUND),
                    round(v1, _ROUND),
                ),
            )
        )
    if dropped:
        log.warning("page %d: dropped %d token(s) positioned outside the page", page.index, dropped)
    return PageTokenLayout(
        page=PageInfo(index=page.index, width=view_w, height=view_h),
        tokens=tokens,
    )


def _rotate_box(
    rotate: int,
    x0: float,
    y0: float,
    x1: float,
    y1: float,
    width: float,
    height: float,
) -> Tuple[float, float, float, float]:
    """Map a PDF-space box (origin bottom-left) into the displayed page's
    top-left frame, honouring the page's /Rotate value."""
    if rotate == 90:
        return (y0, x0, y1, x1)
    if rotate == 180:
        return (width - x1, y0, width - x0, y1)
    if rotate == 270:
        return (height - y1, width - x1, height - y0, width - x0)
    return (x0, height - y1, x1, height - y0)
