"""Metrics for the fourteen built-in fonts.

Widths cover the printable ASCII range (32..126) in 1/1000 em units;
ascent/descent use the same scale.  Fonts we have no table for (Symbol,
ZapfDingbats) fall back to a fixed 500/em advance.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Optional

FALLBACK_WIDTH = 500
FALLBACK_ASCENT = 800
FALLBACK_DESCENT = -200


@dataclass(frozen=True)
class FontMetrics:
    name: str
    ascent: float
    descent: float
    widths: Optional[Dict[int, int]]

    def char_width(self, codepoint: int) -> float:
        """Advance width for a character, in 1/1000 em."""
        if self.widths is None:
            return FALLBACK_WIDTH
        return self.widths.get(codepoint, FALLBACK_WIDTH)


def _parse(table: str) -> Dict[int, int]:
    values = [int(v) for v in table.split()]
    assert len(values) == 95, f"expected 95 widths, got {len(values)}"
    return {32 + i: w for i, w in enumerate(values)}


_HELVETICA = _parse(
    """
    278 278 355 556 556 889 667 191 333 333 389 584 278 333 278 278
    556 556 556 556 556 556 556 556 556 556
    278 278 584 584 584 556 1015
    667 667 722 722 667 611 778 722 278 500 667 556 833 722 778 667
    778 722 667 611 722 667 944 667 667 611
    278 278 278 469 556 333
    556 556 500 556 556 278 556 556 222 222 500 222 833 556 556 556
    556 333 500 278 556 500 722 500 500 500
    334 260 334 584
    """
)

_HELVETICA_BOLD = _parse(
    """
    278 333 474 556 556 889 722 238 333 333 389 584 278 333 278 278
    556 556 556 556 556 556 556 556 556 556
    333 333 584 584 584 611 975
    722 722 722 722 667 611 778 722 278 556 722 611 833 722 778 667
    778 722 667 611 722 667 944 667 667 611
    333 278 333 584 556 333
    556 611 556 611 556 333 611 611 278 278 556 278 889 611 611 611
    611 389 556 333 611 556 778 556 556 500
    389 280 389 584
    """
)

_TIMES_ROMAN = _parse(
    """
    250 333 408 500 500 833 778 180 333 333 500 564 250 333 250 278
    500 500 500 500 500 500 500 500 500 500
    278 278 564 564 564 444 921
    722 667 667 722 611 556 722 722 333 389 722 611 889 722 722 556
    722 667 556 611 722 722 944 722 722 611
    333 278 333 469 500 333
    444 500 444 500 444 333 500 500 278 278 500 278 778 500 500 500
    500 333 389 278 500 500 722 500 500 444
    480 200 480 541
    """
)

_TIMES_BOLD = _parse(
    """
    250 333 555 500 500 1000 833 278 333 333 500 570 250 333 250 278
    500 500 500 500 500 500 500 500 500 500
    333 333 570 570 570 500 930
    722 667 722 722 667 611 778 778 389 500 778 667 944 722 778 611
    778 722 556 667 722 722 1000 722 722 667
    333 278 333 581 500 333
    500 556 444 556 444 333 500 556 278 333 556 278 833 556 500 556
    556 444 389 333 556 500 722 500 500 444
    394 220 394 520
    """
)

_TIMES_ITALIC = _parse(
    """
    250 333 420 500 500 833 778 214 333 333 500 675 250 333 250 278
    500 500 500 500 500 500 500 500 500 500
    333 333 675 675 675 500 920
    611 611 667 722 611 611 722 722 333 444 667 556 833 667 722 611
    722 611 500 556 722 611 833 611 556 556
    389 278 389 422 500 333
    500 500 444 500 444 278 500 500 278 278 444 278 722 500 500 500
    500 389 389 278 500 444 667 444 444 389
    400 275 400 541
    """
)

_TIMES_BOLD_ITALIC = _parse(
    """
    250 389 555 500 500 833 778 278 333 333 500 570 250 333 250 278
    500 500 500 500 500 500 500 500 500 500
    333 333 570 570 570 500 832
    667 667 667 722 667 667 722 778 389 500 667 611 889 722 722 611
    722 667 556 611 722 667 889 667 611 611
    333 278 333 570 500 333
    500 500 444 500 444 333 500 556 278 278 500 278 778 556 500 500
    500 389 389 278 556 444 667 500 444 389
    348 220 348 570
    """
)

_COURIER = {cp: 600 for cp in range(32, 127)}

STANDARD_14: Dict[str, FontMetrics] = {}
for _name, _widths in (
    ("Helvetica", _HELVETICA),
    ("Helvetica-Bold", _HELVETICA_BOLD),
    ("Helvetica-Oblique", _HELVETICA),
    ("Helvetica-BoldOblique", _HELVETICA_BOLD),
):
    STANDARD_14[_name] = FontMetrics(_name, 718, -207, _widths)
for _name, _widths in (
    ("Times-Roman", _TIMES_ROMAN),
    ("Times-Bold", _TIMES_BOLD),
    ("Times-Italic", _TIMES_ITALIC),
    ("Times-BoldItalic", _TIMES_BOLD_ITALIC),
):
    STANDARD_14[_name] = FontMetrics(_name, 683, -217, _widths)
for _name in ("Courier", "Courier-Bold", "Courier-Oblique", "Courier-BoldOblique"):
    STANDARD_14[_name] = FontMetrics(_name, 629, -157, _COURIER)
for _name in ("Symbol", "ZapfDingbats"):
    STANDARD_14[_name] = FontMetrics(_name, FALLBACK_ASCENT, FALLBACK_DESCENT, None)

_ALIASES = {
    "arial": "Helvetica",
    "arialmt": "Helvetica",
    "helvetica": "Helvetica",
    "timesnewroman": "Times-Roman",
    "timesnewromanps": "Times-Roman",
    "timesnewromanpsmt": "Times-Roman",
    "times": "Times-Roman",
    "couriernew": "Courier",
    "couriernewps": "Courier",
    "couriernewpsmt": "Courier",
    "courier": "Courier",
    "symbol": "Symbol",
    "zapfdingbats": "ZapfDingbats",
}

_SUBSET_PREFIX = re.compile(r"^[A-Z]{6}\+")


def resolve_metrics(base_font: str) -> Optional[FontMetrics]:
    """Look up metrics for a base font name, tolerating common aliases,
    subset prefixes (``ABCDEF+Helvetica``) and style suffixes."""
    if not base_font:
        return None
    name = _SUBSET_PREFIX.sub("", base_font)
    if name in STANDARD_14:
        return STANDARD_14[name]
    lowered = name.lower()
    bold = "bold" in lowered
    italic = "italic" in lowered or "oblique" in lowered
    family = re.split(r"[-,]", lowered, maxsplit=1)[0]
    family = re.sub(r"(mt|ps|psmt)$", "", family)
    base = _ALIASES.get(family)
    if base is None:
        for key, value in _ALIASES.items():
            if lowered.startswith(key):
                base = value
                break
    if base is None:
        return None
    if base == "Helvetica":
        if bold and italic:
            return STANDARD_14["Helvetica-BoldOblique"]
        if bold:
            return STANDARD_14["Helvetica-Bold"]
        if italic:
            return STANDARD_14["Helvetica-Oblique"]
        return STANDARD_14["Helvetica"]
    if base == "Times-Roman":
        if bold and italic:
            return STANDARD_14["Times-BoldItalic"]
        if bold:
            return STANDARD_14["Times-Bold"]
        if italic:
            return STANDARD_14["Times-Italic"]
        return STANDARD_14["Times-Roman"]
    if base == "Courier":
        if bold and italic:
            return STANDARD_14["Courier-BoldOblique"]
        if bold:
            return STANDARD_14["Courier-Bold"]
        if italic:
            return STANDARD_14["Courier-Oblique"]
        return STANDARD_14["Courier"]
    return STANDARD_14.get(base)


def string_width(metrics: FontMetrics, text: str) -> float:
    """Advance width of ``text`` in 1/1000 em units."""
    return float(sum(metrics.char_width(ord(c)) for c in text))
