"""Token-layout structures and the structure-file JSON format.

A token layout is the per-page list of word-level tokens extracted from a
PDF, in content-stream emission order. The JSON structure file defined here
is the contract shared by the built-in extractor, external pre-processors
and the HTTP service.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Sequence

from .errors import InvalidLayout
from .geometry import Bounds

# Glyphs may slightly overhang page margins; token boxes are allowed to
# exceed the page rectangle by this many points on every side.
PAGE_EDGE_SLACK = 2.0

# Serialized widths are float differences; tolerate round-trip noise.
_SLACK_EPS = 1e-6


@dataclass(frozen=True)
class PageInfo:
    """Page geometry in PDF points (1/72 inch), viewing orientation."""

    index: int
    width: float
    height: float


@dataclass(frozen=True)
class Token:
    """A word-level unit: whitespace-free text plus its page-frame box."""

    text: str
    bounds: Bounds


@dataclass
class PageTokenLayout:
    page: PageInfo
    tokens: List[Token] = field(default_factory=list)


def layout_to_jsonable(layouts: Sequence[PageTokenLayout]) -> list:
    """Structure-file payload for a whole document."""
    pages = []
    for layout in layouts:
        pages.append(
            {
                "page": {
                    "index": layout.page.index,
                    "width": layout.page.width,
                    "height": layout.page.height,
                },
                "tokens": [
                    {
                        "x": t.bounds.left,
                        "y": t.bounds.top,
                        "width": t.bounds.width,
                        "height": t.bounds.height,
                        "text": t.text,
                    }
                    for t in layout.tokens
                ],
            }
        )
    return pages


def dump_layout(layouts: Sequence[PageTokenLayout]) -> str:
    return json.dumps(layout_to_jsonable(layouts), ensure_ascii=False, indent=2)


def _fail(location: str, message: str):
    raise InvalidLayout(message, location=location)


def _require_number(value, location: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(location, f"expected a number, got {type(value).__name__}")
    return float(value)


def layout_from_jsonable(payload) -> List[PageTokenLayout]:
    """Parse and validate a structure-file payload.

    Raises :class:`InvalidLayout` naming the first offending location, e.g.
    ``pages[0].tokens[3].width``.
    """
    if not isinstance(payload, list):
        _fail("pages", f"expected a list of pages, got {type(payload).__name__}")
    layouts: List[PageTokenLayout] = []
    for i, entry in enumerate(payload):
        loc = f"pages[{i}]"
        if not isinstance(entry, dict):
            _fail(loc, "expected an object")
        page_obj = entry.get("page")
        if not isinstance(page_obj, dict):
            _fail(f"{loc}.page", "missing page object")
        index = page_obj.get("index")
        if isinstance(index, bool) or not isinstance(index, int):
            _fail(f"{loc}.page.index", "expected an integer")
        if index != i:
            _fail(f"{loc}.page.index", f"page indices must be contiguous from 0, got {index}")
        width = _require_number(page_obj.get("width"), f"{loc}.page.width")
        height = _require_number(page_obj.get("height"), f"{loc}.page.height")
        if width <= 0:
            _fail(f"{loc}.page.width", f"page width must be positive, got {width}")
        if height <= 0:
            _fail(f"{loc}.page.height", f"page height must be positive, got {height}")
        page = PageInfo(index=index, width=width, height=height)

        raw_tokens = entry.get("tokens")
        if not isinstance(raw_tokens, list):
            _fail(f"{loc}.tokens", "missing token list")
        tokens: List[Token] = []
        for j, raw in enumerate(raw_tokens):
            tloc = f"{loc}.tokens[{j}]"
            if not isinstance(raw, dict):
                _fail(tloc, "expected an object")
            text = raw.get("text")
            if not isinstance(text, str) or not text:
                _fail(f"{tloc}.text", "token text must be a non-empty string")
            if any(c.isspace() for c in text):
                _fail(f"{tloc}.text", "token text must not contain whitespace")
            x = _require_number(raw.get("x"), f"{tloc}.x")
            y = _require_number(raw.get("y"), f"{tloc}.y")
            w = _require_number(raw.get("width"), f"{tloc}.width")
            h = _require_number(raw.get("height"), f"{tloc}.height")
            if w < 0:
                _fail(f"{tloc}.width", f"token width must be non-negative, got {w}")
            if h < 0:
                _fail(f"{tloc}.height", f"token height must be non-negative, got {h}")
            if x < -PAGE_EDGE_SLACK - _SLACK_EPS or y < -PAGE_EDGE_SLACK - _SLACK_EPS:
                _fail(tloc, "token box lies outside the page (beyond the 2pt slack)")
            if x + w > width + PAGE_EDGE_SLACK + _SLACK_EPS or y + h > height + PAGE_EDGE_SLACK + _SLACK_EPS:
                _fail(tloc, "token box lies outside the page (beyond the 2pt slack)")
            tokens.append(Token(text=text, bounds=Bounds(x, y, x + w, y + h)))
        layouts.append(PageTokenLayout(page=page, tokens=tokens))
    return layouts


def load_layout(text: str) -> List[PageTokenLayout]:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidLayout(f"not valid JSON: {exc}", location="pages") from exc
    return layout_from_jsonable(payload)
