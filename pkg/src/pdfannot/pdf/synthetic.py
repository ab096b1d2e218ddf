"""A small PDF writer for generating test documents.

Only what the extraction tests need: text placed at absolute positions in
the built-in fonts, optional Flate compression, optional explicit /Widths
arrays, page rotation, and raw content streams for hand-written operator
sequences.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .stdmetrics import STANDARD_14

_HEADER = b"%PDF-1.5\n%\xe2\xe3\xcf\xd3\n"


@dataclass
class TextPlacement:
    """One text run: ``text`` with its baseline origin at ``(x, y)`` in PDF
    coordinates (origin bottom-left, y grows upward)."""

    x: float
    y: float
    text: str
    font: str = "Helvetica"
    size: float = 12.0
    char_spacing: float = 0.0
    word_spacing: float = 0.0


@dataclass
class SyntheticPage:
    width: float = 612.0
    height: float = 792.0
    rotate: int = 0
    placements: List[TextPlacement] = field(default_factory=list)
    # When set, placements are ignored and this operator stream is used
    # verbatim; ``fonts`` maps resource names to base fonts for it.
    raw_content: Optional[bytes] = None
    fonts: Dict[str, str] = field(default_factory=dict)


def _fmt(value: float) -> str:
    if isinstance(value, bool):
        raise TypeError("boolean is not a PDF number")
    if float(value).is_integer():
        return str(int(value))
    return f"{value:.4f}".rstrip("0").rstrip(".")


def escape_string(text: str) -> bytes:
    """Encode ``text`` as a WinAnsi literal string body."""
    try:
        raw = text.encode("cp1252")
    except UnicodeEncodeError as exc:
        raise ValueError(f"text not representable in WinAnsi: {text!r}") from exc
    return raw.replace(b"\\", b"\\\\").replace(b"(", b"\\(").replace(b")", b"\\)")


class _Builder:
    def __init__(self) -> None:
        self.objects: List[bytes] = []

    def add(self, body: bytes) -> int:
        """Reserve the next object number and store its body."""
        self.objects.append(body)
        return len(self.objects)

    def reserve(self) -> int:
        return self.add(b"")

    def set(self, num: int, body: bytes) -> None:
        self.objects[num - 1] = body

    def render(self, root: int) -> bytes:
        out = bytearray(_HEADER)
        offsets = [0]
        for i, body in enumerate(self.objects, start=1):
            offsets.append(len(out))
            out += f"{i} 0 obj\n".encode("ascii")
            out += body
            out += b"\nendobj\n"
        xref_pos = len(out)
        out += f"xref\n0 {len(self.objects) + 1}\n".encode("ascii")
        out += b"0000000000 65535 f \n"
        for off in offsets[1:]:
            out += f"{off:010d} 00000 n \n".encode("ascii")
        out += b"trailer\n"
        out += f"<< /Size {len(self.objects) + 1} /Root {root} 0 R >>\n".encode("ascii")
        out += f"startxref\n{xref_pos}\n".encode("ascii")
        out += b"%%EOF\n"
        return bytes(out)


def _font_object(base_font: str, embed_widths: bool, builder: _Builder) -> bytes:
    parts = [
        b"<< /Type /Font /Subtype /Type1",
        f"/BaseFont /{base_font}".encode("ascii"),
        b"/Encoding /WinAnsiEncoding",
    ]
    metrics = STANDARD_14.get(base_font)
    if embed_widths and metrics is not None and metrics.widths is not None:
        widths = " ".join(str(metrics.widths[cp]) for cp in range(32, 127))
        descriptor = builder.add(
            (
                "<< /Type /FontDescriptor /FontName /{name} /Flags 32 "
                "/FontBBox [-200 -250 1100 900] /ItalicAngle 0 "
                "/Ascent {asc} /Descent {desc} /CapHeight 700 /StemV 80 >>"
            )
            .format(name=base_font, asc=_fmt(metrics.ascent), desc=_fmt(metrics.descent))
            .encode("ascii")
        )
        parts.append(b"/FirstChar 32 /LastChar 126")
        parts.append(f"/Widths [{widths}]".encode("ascii"))
        parts.append(f"/FontDescriptor {descriptor} 0 R".encode("ascii"))
    parts.append(b">>")
    return b" ".join(parts)


def _placement_content(placements: Sequence[TextPlacement], resource_of: Dict[str, str]) -> bytes:
    lines = []
    for p in placements:
        res = resource_of[p.font]
        lines.append(b"BT")
        lines.append(f"/{res} {_fmt(p.size)} Tf".encode("ascii"))
        if p.char_spacing:
            lines.append(f"{_fmt(p.char_spacing)} Tc".encode("ascii"))
        if p.word_spacing:
            lines.append(f"{_fmt(p.word_spacing)} Tw".encode("ascii"))
        lines.append(f"1 0 0 1 {_fmt(p.x)} {_fmt(p.y)} Tm".encode("ascii"))
        lines.append(b"(" + escape_string(p.text) + b") Tj")
        if p.char_spacing:
            lines.append(b"0 Tc")
        if p.word_spacing:
            lines.append(b"0 Tw")
        lines.append(b"ET")
    return b"\n".join(lines)


def build_pdf(
    pages: Sequence[SyntheticPage],
    *,
    compress: bool = False,
    embed_widths: bool = False,
) -> bytes:
    """Serialize ``pages`` into a complete PDF file."""
    if not pages:
        raise ValueError("at least one page is required")
    builder = _Builder()
    catalog = builder.reserve()
    pages_obj = builder.reserve()

    font_objects: Dict[Tuple[str, bool], int] = {}

    def font_ref(base_font: str) -> int:
        key = (base_font, embed_widths)
        if key not in font_objects:
            num = builder.reserve()
            builder.set(num, _font_object(base_font, embed_widths, builder))
            font_objects[key] = num
        return font_objects[key]

    page_numbers = []
    for page in pages:
        if page.raw_content is not None:
            fonts = dict(page.fonts) or {"F1": "Helvetica"}
            resource_entries = {res: font_ref(base) for res, base in sorted(fonts.items())}
            content = page.raw_content
        else:
            resource_of: Dict[str, str] = {}
            for p in page.placements:
                if p.font not in resource_of:
                    resource_of[p.font] = f"F{len(resource_of) + 1}"
            resource_entries = {res: font_ref(base) for base, res in resource_of.items()}
            content = _placement_content(page.placements, resource_of)

        stream_dict = b""
        data = content
        if compress:
            data = zlib.compress(content)
            stream_dict = b"/Filter /FlateDecode "
        content_obj = builder.add(
            b"<< " + stream_dict + f"/Length {len(data)} >>\nstream\n".encode("ascii") + data + b"\nendstream"
        )

        font_res = b" ".join(
            f"/{res} {num} 0 R".encode("ascii") for res, num in sorted(resource_entries.items())
        )
        page_body = (
            "<< /Type /Page /Parent {parent} 0 R /MediaBox [0 0 {w} {h}] "
            "/Rotate {rot} /Resources << /Font << {fonts} >> >> /Contents {content} 0 R >>"
        ).format(
            parent=pages_obj,
            w=_fmt(page.width),
            h=_fmt(page.height),
            rot=int(page.rotate) % 360,
            fonts=font_res.decode("ascii"),
            content=content_obj,
        )
        page_numbers.append(builder.add(page_body.encode("ascii")))

    kids = " ".join(f"{n} 0 R" for n in page_numbers)
    builder.set(
        pages_obj,
        f"<< /Type /Pages /Kids [{kids}] /Count {len(page_numbers)} >>".encode("ascii"),
    )
    builder.set(catalog, f"<< /Type /Catalog /Pages {pages_obj} 0 R >>".encode("ascii"))
    return builder.render(catalog)
