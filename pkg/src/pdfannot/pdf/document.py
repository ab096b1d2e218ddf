"""PDF file structure: cross-reference data, object loading, page tree."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from ..errors import EncryptedPdf, MalformedPdf
from .cos import Lexer, Name, Operator, Parser, PdfEof, Ref, Stream
from .filters import decode_stream

log = logging.getLogger("pdfannot.pdf")

# xref entry kinds: ("n", byte offset) or ("s", container object number, index)
_XrefEntry = Tuple[str, int, int]

_OBJ_RE = re.compile(rb"(?<![0-9])(\d{1,10})\s+(\d{1,5})\s+obj\b")

_INHERITED_PAGE_KEYS = ("Resources", "MediaBox", "CropBox", "Rotate")


@dataclass
class Page:
    """One resolved page: geometry plus everything needed to interpret it."""

    index: int
    media_box: Tuple[float, float, float, float]
    rotate: int
    resources: dict
    contents: bytes
    crop_box: Optional[Tuple[float, float, float, float]] = None

    @property
    def effective_box(self) -> Tuple[float, float, float, float]:
        """The box viewers display: the crop box clipped to the media box."""
        if self.crop_box is None:
            return self.media_box
        mx0, my0, mx1, my1 = self.media_box
        cx0, cy0, cx1, cy1 = self.crop_box
        x0, y0 = max(mx0, cx0), max(my0, cy0)
        x1, y1 = min(mx1, cx1), min(my1, cy1)
        if x1 - x0 <= 0 or y1 - y0 <= 0:
            return self.media_box
        return (x0, y0, x1, y1)


@dataclass
class PdfDocument:
    data: bytes = field(repr=False)
    xref: Dict[int, _XrefEntry] = field(default_factory=dict, repr=False)
    trailer: dict = field(default_factory=dict, repr=False)

    def __init__(self, data: bytes) -> None:
        if not isinstance(data, (bytes, bytearray)):
            raise TypeError("PDF input must be bytes")
        header = bytes(data).find(b"%PDF-")
        if header < 0 or header > 1024:
            raise MalformedPdf("missing %PDF header")
        self.data = bytes(data)[header:]
        self.xref = {}
        self.trailer = {}
        self._cache: Dict[int, Any] = {}
        self._scanned = False
        try:
            self._load_xref_chain()
        except MalformedPdf:
            self._scan_objects()
        if not self.trailer.get("Root"):
            self._recover_trailer()
        if self.trailer.get("Encrypt") is not None:
            raise EncryptedPdf("document is encrypted")

    # ------------------------------------------------------------------
    # cross-reference loading

    def _load_xref_chain(self) -> None:
        tail = self.data[-2048:]
        idx = tail.rfind(b"startxref")
        if idx < 0:
            raise MalformedPdf("missing startxref")
        lexer = Lexer(tail, idx + len(b"startxref"))
        try:
            start = lexer.next_token()
        except PdfEof as exc:
            raise MalformedPdf("missing startxref offset") from exc
        if not isinstance(start, int):
            raise MalformedPdf("bad startxref offset")
        seen = set()
        offset: Optional[int] = start
        while offset is not None:
            if offset in seen or not (0 <= offset < len(self.data)):
                break
            seen.add(offset)
            trailer = self._load_xref_section(offset)
            for key, value in trailer.items():
                self.trailer.setdefault(key, value)
            offset = trailer.get("Prev")
            if offset is not None and not isinstance(offset, int):
                break
            hybrid = trailer.get("XRefStm")
            if isinstance(hybrid, int) and hybrid not in seen and 0 <= hybrid < len(self.data):
                seen.add(hybrid)
                for key, value in self._load_xref_section(hybrid).items():
                    self.trailer.setdefault(key, value)
        if not self.xref:
            raise MalformedPdf("empty cross-reference data")

    def _load_xref_section(self, offset: int) -> dict:
        lexer = Lexer(self.data, offset)
        try:
            tok = lexer.next_token()
        except PdfEof as exc:
            raise MalformedPdf("truncated cross-reference section") from exc
        if isinstance(tok, Operator) and tok == "xref":
            return self._load_xref_table(lexer)
        if isinstance(tok, int):
            # "N G obj" introducing a cross-reference stream.
            lexer.seek(offset)
            num, _gen, obj = self._parse_indirect_at(offset)
            if not isinstance(obj, Stream):
                raise MalformedPdf("cross-reference stream expected")
            return self._load_xref_stream(obj)
        raise MalformedPdf(f"unrecognised cross-reference section at offset {offset}")

    def _load_xref_table(self, lexer: Lexer) -> dict:
        while True:
            try:
                tok = lexer.next_token()
            except PdfEof as exc:
                raise MalformedPdf("truncated cross-reference table") from exc
            if isinstance(tok, Operator) and tok == "trailer":
                trailer = Parser(lexer, self._resolve_shallow).parse_object()
                if not isinstance(trailer, dict):
                    raise MalformedPdf("trailer is not a dictionary")
                return trailer
            if not isinstance(tok, int):
                raise MalformedPdf("bad cross-reference subsection header")
            first = tok
            count = lexer.next_token()
            if not isinstance(count, int) or count < 0:
                raise MalformedPdf("bad cross-reference subsection count")
            for i in range(count):
                pos = lexer.next_token()
                gen = lexer.next_token()
                kind = lexer.next_token()
                if not isinstance(pos, int) or not isinstance(gen, int) or not isinstance(kind, Operator):
                    raise MalformedPdf("bad cross-reference entry")
                num = first + i
                if kind == "n" and num not in self.xref:
                    self.xref[num] = ("n", pos, gen)

    def _load_xref_stream(self, stream: Stream) -> dict:
        d = stream.dict
        data = decode_stream(d, stream.raw, self._resolve_shallow)
        widths = [int(w) for w in self._resolve_shallow(d.get("W", []))]
        if len(widths) != 3:
            raise MalformedPdf("bad /W in cross-reference stream")
        size = self._resolve_shallow(d.get("Size", 0))
        index = self._resolve_shallow(d.get("Index")) or [0, size]
        row_len = sum(widths)
        if row_len <= 0:
            raise MalformedPdf("bad /W in cross-reference stream")
        pos = 0
        for i in range(0, len(index) - 1, 2):
            first, count = int(index[i]), int(index[i + 1])
            for num in range(first, first + count):
                row = data[pos : pos + row_len]
                pos += row_len
                if len(row) < row_len:
                    return {k: v for k, v in d.items() if k not in ("W", "Index", "Filter", "Length")}
                fields = []
                fpos = 0
                for w in widths:
                    fields.append(int.from_bytes(row[fpos : fpos + w], "big") if w else None)
                    fpos += w
                ftype = fields[0] if widths[0] else 1
                if num in self.xref:
                    continue
                if ftype == 1 and fields[1] is not None:
                    self.xref[num] = ("n", fields[1], fields[2] or 0)
                elif ftype == 2 and fields[1] is not None:
                    self.xref[num] = ("s", fields[1], fields[2] or 0)
        return {k: v for k, v in d.items() if k not in ("W", "Index", "Filter", "Length")}

    def _scan_objects(self) -> None:
        """Last-resort recovery: find every ``N G obj`` in the file.

        Later duplicates win, matching the newest incremental update.
        """
        if self._scanned:
            return
        self._scanned = True
        for match in _OBJ_RE.finditer(self.data):
            num = int(match.group(1))
            gen = int(match.group(2))
            self.xref[num] = ("n", match.start(), gen)
        if not self.xref:
            raise MalformedPdf("no objects found")
        idx = self.data.rfind(b"trailer")
        while idx >= 0 and not self.trailer.get("Root"):
            lexer = Lexer(self.data, idx + len(b"trailer"))
            try:
                trailer = Parser(lexer, self._resolve_shallow).parse_object()
                if isinstance(trailer, dict):
                    self.trailer = trailer
                    break
            except (MalformedPdf, PdfEof):
                pass
            idx = self.data.rfind(b"trailer", 0, idx)

    def _recover_trailer(self) -> None:
        self._scan_objects()
        if self.trailer.get("Root"):
            return
        for num in sorted(self.xref):
            try:
                obj = self.get_object(num)
            except MalformedPdf:
                continue
            d = obj.dict if isinstance(obj, Stream) else obj
            if isinstance(d, dict) and d.get("Type") == Name("Catalog"):
                self.trailer["Root"] = Ref(num, 0)
                return
        raise MalformedPdf("no document catalog")

    # ------------------------------------------------------------------
    # object access

    def _parse_indirect_at(self, offset: int) -> Tuple[int, int, Any]:
        lexer = Lexer(self.data, offset)
        try:
            num = lexer.next_token()
            gen = lexer.next_token()
            kw = lexer.next_token()
        except PdfEof as exc:
            raise MalformedPdf(f"truncated object at offset {offset}") from exc
        if not isinstance(num, int) or not isinstance(gen, int) or kw != Operator("obj"):
            raise MalformedPdf(f"expected indirect object at offset {offset}")
        obj = Parser(lexer, self._resolve_shallow).parse_object()
        return num, gen, obj

    def get_object(self, num: int, gen: int = 0) -> Any:
        if num in self._cache:
            return self._cache[num]
        entry = self.xref.get(num)
        if entry is None:
            if not self._scanned:
                try:
                    self._scan_objects()
                except MalformedPdf:
                    pass
                return self.get_object(num, gen)
            return None
        self._cache[num] = None  # break reference cycles while loading
        try:
            if entry[0] == "n":
                got_num, _, obj = self._parse_indirect_at(entry[1])
                if got_num != num:
                    raise MalformedPdf(f"object {num} not at recorded offset")
            else:
                obj = self._load_from_object_stream(entry[1], num)
        except MalformedPdf:
            if not self._scanned:
                del self._cache[num]
                self._scan_objects()
                return self.get_object(num, gen)
            raise
        self._cache[num] = obj
        return obj

    def _load_from_object_stream(self, container: int, wanted: int) -> Any:
        stream = self.get_object(container)
        if not isinstance(stream, Stream):
            raise MalformedPdf(f"object stream {container} missing")
        data = decode_stream(stream.dict, stream.raw, self.resolve)
        count = int(self.resolve(stream.dict.get("N", 0)) or 0)
        first = int(self.resolve(stream.dict.get("First", 0)) or 0)
        header = Lexer(data)
        pairs = []
        for _ in range(count):
            try:
                onum = header.next_token()
                ooff = header.next_token()
            except PdfEof as exc:
                raise MalformedPdf("truncated object stream header") from exc
            if not isinstance(onum, int) or not isinstance(ooff, int):
                raise MalformedPdf("bad object stream header")
            pairs.append((onum, ooff))
        found = None
        for onum, ooff in pairs:
            if onum in self._cache and self._cache[onum] is not None:
                continue
            parser = Parser(Lexer(data, first + ooff), self.resolve)
            obj = parser.parse_object()
            self._cache[onum] = obj
            if onum == wanted:
                found = obj
        if wanted not in self._cache or self._cache[wanted] is None:
            if found is None:
                raise MalformedPdf(f"object {wanted} not in object stream {container}")
        return self._cache.get(wanted, found)

    def resolve(self, obj: Any) -> Any:
        seen = 0
        while isinstance(obj, Ref):
            obj = self.get_object(obj.num, obj.gen)
            seen += 1
            if seen > 64:
                raise MalformedPdf("reference chain too deep")
        return obj

    def _resolve_shallow(self, obj: Any) -> Any:
        # Resolver safe to use while the xref is still being built.
        try:
            return self.resolve(obj)
        except MalformedPdf:
            return None

    def stream_bytes(self, obj: Any) -> bytes:
        obj = self.resolve(obj)
        if isinstance(obj, Stream):
            return decode_stream(obj.dict, obj.raw, self.resolve)
        raise MalformedPdf("expected a stream object")

    # ------------------------------------------------------------------
    # page tree

    def pages(self) -> List[Page]:
        root = self.resolve(self.trailer.get("Root"))
        if not isinstance(root, dict):
            raise MalformedPdf("no document catalog")
        tree = self.resolve(root.get("Pages"))
        if not isinstance(tree, dict):
            raise MalformedPdf("catalog has no page tree")
        leaves: List[dict] = []
        self._walk_pages(tree, {}, leaves, set(), depth=0)
        if not leaves:
            raise MalformedPdf("document has no pages")
        pages = []
        for i, node in enumerate(leaves):
            pages.append(self._build_page(i, node))
        return pages

    def _walk_pages(self, node: dict, inherited: dict, out: List[dict], seen: set, depth: int) -> None:
        if depth > 64:
            raise MalformedPdf("page tree too deep")
        node_id = id(node)
        if node_id in seen:
            log.warning("page tree cycle; ignoring repeated node")
            return
        seen = seen | {node_id}
        attrs = dict(inherited)
        for key in _INHERITED_PAGE_KEYS:
            if key in node:
                attrs[key] = node[key]
        ntype = self.resolve(node.get("Type"))
        kids = self.resolve(node.get("Kids"))
        if ntype == Name("Page") or (kids is None and ntype != Name("Pages")):
            leaf = dict(node)
            for key, value in attrs.items():
                leaf.setdefault(key, value)
            out.append(leaf)
            return
        if not isinstance(kids, list):
            raise MalformedPdf("page tree node without kids")
        for kid in kids:
            kid_obj = self.resolve(kid)
            if isinstance(kid_obj, dict):
                self._walk_pages(kid_obj, attrs, out, seen, depth + 1)

    def _build_page(self, index: int, node: dict) -> Page:
        media = self._resolve_rect(node.get("MediaBox")) or (0.0, 0.0, 612.0, 792.0)
        crop = self._resolve_rect(node.get("CropBox"))
        rotate = self.resolve(node.get("Rotate")) or 0
        if not isinstance(rotate, (int, float)):
            rotate = 0
        rotate = int(rotate) % 360
        if rotate % 90:
            log.warning("page %d: ignoring non-axis rotation %d", index, rotate)
            rotate = 0
        resources = self.resolve(node.get("Resources"))
        if not isinstance(resources, dict):
            resources = {}
        contents = self.resolve(node.get("Contents"))
        parts = contents if isinstance(contents, list) else [contents]
        chunks: List[bytes] = []
        for part in parts:
            part = self.resolve(part)
            if not isinstance(part, Stream):
                continue
            try:
                chunks.append(decode_stream(part.dict, part.raw, self.resolve))
            except Exception:  # noqa: BLE001 - a bad stream degrades one page only
                log.warning("page %d: skipping undecodable content stream", index)
        return Page(
            index=index,
            media_box=media,
            rotate=rotate,
            resources=resources,
            contents=b"\n".join(chunks),
            crop_box=crop,
        )

    def _resolve_rect(self, obj: Any) -> Optional[Tuple[float, float, float, float]]:
        rect = self.resolve(obj)
        if not isinstance(rect, list) or len(rect) != 4:
            return None
        try:
            vals = [float(self.resolve(v)) for v in rect]
        except (TypeError, ValueError):
            return None
        x0, x1 = sorted((vals[0], vals[2]))
        y0, y1 = sorted((vals[1], vals[3]))
        if x1 - x0 <= 0 or y1 - y0 <= 0:
            return None
        return (x0, y0, x1, y1)
