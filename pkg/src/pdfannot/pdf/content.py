"""Content stream interpretation: text state, positioning and showing.

The interpreter walks a page's (decoded) content stream and emits one
:class:`Glyph` per shown character, positioned in PDF user space (origin
bottom-left).  Graphics operators that cannot move text are ignored.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Set, Tuple, Union

from .cos import Name, Stream, parse_content_tokens
from .document import Page, PdfDocument
from .filters import decode_stream
from .fonts import LoadedFont

log = logging.getLogger("pdfannot.pdf")

Matrix = Tuple[float, float, float, float, float, float]
IDENTITY: Matrix = (1.0, 0.0, 0.0, 1.0, 0.0, 0.0)

_MAX_FORM_DEPTH = 12


def mat_mul(m: Matrix, n: Matrix) -> Matrix:
    """Compose transforms: apply ``m`` first, then ``n``."""
    ma, mb, mc, md, me, mf = m
    na, nb, nc, nd, ne, nf = n
    return (
        ma * na + mb * nc,
        ma * nb + mb * nd,
        mc * na + md * nc,
        mc * nb + md * nd,
        me * na + mf * nc + ne,
        me * nb + mf * nd + nf,
    )


def mat_apply(m: Matrix, x: float, y: float) -> Tuple[float, float]:
    a, b, c, d, e, f = m
    return (x * a + y * c + e, x * b + y * d + f)


def translation(tx: float, ty: float) -> Matrix:
    return (1.0, 0.0, 0.0, 1.0, tx, ty)


@dataclass(frozen=True)
class Glyph:
    """A shown character in user space."""

    text: str
    x0: float
    y0: float
    x1: float
    y1: float
    origin: Tuple[float, float]
    end: Tuple[float, float]
    size: float  # effective font size after all transforms
    direction: Tuple[float, float]  # unit baseline direction


class Break:
    """Marks a position where a token must not continue (ET, skipped run)."""

    __slots__ = ()


_BREAK = Break()

Emitted = Union[Glyph, Break]


class _State:
    __slots__ = (
        "ctm",
        "font",
        "size",
        "char_spacing",
        "word_spacing",
        "horiz_scale",
        "leading",
        "rise",
    )

    def __init__(self) -> None:
        self.ctm: Matrix = IDENTITY
        self.font: Optional[LoadedFont] = None
        self.size = 0.0
        self.char_spacing = 0.0
        self.word_spacing = 0.0
        self.horiz_scale = 1.0
        self.leading = 0.0
        self.rise = 0.0

    def copy(self) -> "_State":
        other = _State.__new__(_State)
        for name in _State.__slots__:
            setattr(other, name, getattr(self, name))
        return other


def _number(value: Any, default: float = 0.0) -> float:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    return default


class ContentInterpreter:
    """Runs one page's content and collects emitted glyphs."""

    def __init__(self, doc: PdfDocument, page: Page) -> None:
        self.doc = doc
        self.page = page
        self.output: List[Emitted] = []
        self._font_cache: Dict[int, LoadedFont] = {}
        self._warned_fonts: Set[str] = set()
        self._warned_no_font = False

    def run(self) -> List[Emitted]:
        state = _State()
        self._execute(self.page.contents, self.page.resources, state, frozenset(), 0)
        return self.output

    # ------------------------------------------------------------------

    def _execute(
        self,
        content: bytes,
        resources: dict,
        state: _State,
        active_forms: frozenset,
        depth: int,
    ) -> None:
        stack: List[_State] = []
        tm: Matrix = IDENTITY
        tlm: Matrix = IDENTITY
        in_text = False

        for operands, op in parse_content_tokens(content):
            if op == "q":
                stack.append(state.copy())
            elif op == "Q":
                if stack:
                    state = stack.pop()
            elif op == "cm" and len(operands) >= 6:
                m = tuple(_number(v) for v in operands[:6])
                state.ctm = mat_mul(m, state.ctm)  # type: ignore[arg-type]
            elif op == "BT":
                tm = tlm = IDENTITY
                in_text = True
            elif op == "ET":
                in_text = False
                self._emit_break()
            elif op == "Tc" and operands:
                state.char_spacing = _number(operands[-1])
            elif op == "Tw" and operands:
                state.word_spacing = _number(operands[-1])
            elif op == "Tz" and operands:
                state.horiz_scale = _number(operands[-1], 100.0) / 100.0
            elif op == "TL" and operands:
                state.leading = _number(operands[-1])
            elif op == "Ts" and operands:
                state.rise = _number(operands[-1])
            elif op == "Tf" and len(operands) >= 2:
                state.font = self._lookup_font(resources, operands[-2])
                state.size = _number(operands[-1])
            elif op == "Td" and len(operands) >= 2:
                tlm = mat_mul(translation(_number(operands[-2]), _number(operands[-1])), tlm)
                tm = tlm
            elif op == "TD" and len(operands) >= 2:
                state.leading = -_number(operands[-1])
                tlm = mat_mul(translation(_number(operands[-2]), _number(operands[-1])), tlm)
                tm = tlm
            elif op == "Tm" and len(operands) >= 6:
                tlm = tuple(_number(v) for v in operands[:6])  # type: ignore[assignment]
                tm = tlm
            elif op == "T*":
                tlm = mat_mul(translation(0.0, -state.leading), tlm)
                tm = tlm
            elif op == "Tj" and operands:
                tm = self._show(operands[-1], state, tm)
            elif op == "'" and operands:
                tlm = mat_mul(translation(0.0, -state.leading), tlm)
                tm = tlm
                tm = self._show(operands[-1], state, tm)
            elif op == '"' and len(operands) >= 3:
                state.word_spacing = _number(operands[-3])
                state.char_spacing = _number(operands[-2])
                tlm = mat_mul(translation(0.0, -state.leading), tlm)
                tm = tlm
                tm = self._show(operands[-1], state, tm)
            elif op == "TJ" and operands and isinstance(operands[-1], list):
                for item in operands[-1]:
                    if isinstance(item, bytes):
                        tm = self._show(item, state, tm)
                    elif isinstance(item, (int, float)) and not isinstance(item, bool):
                        tx = -float(item) / 1000.0 * state.size * state.horiz_scale
                        tm = mat_mul(translation(tx, 0.0), tm)
            elif op == "Do" and operands:
                self._run_xobject(operands[-1], resources, state, active_forms, depth)
            # Everything else (paths, colours, marked content, images) is
            # irrelevant to token geometry and silently ignored.
        if in_text:
            self._emit_break()

    # ------------------------------------------------------------------

    def _emit_break(self) -> None:
        if self.output and isinstance(self.output[-1], Glyph):
            self.output.append(_BREAK)

    def _lookup_font(self, resources: dict, name: Any) -> Optional[LoadedFont]:
        fonts = self.doc.resolve(resources.get("Font")) if resources else None
        font_dict = None
        if isinstance(fonts, dict) and isinstance(name, Name):
            font_dict = self.doc.resolve(fonts.get(str(name)))
        if not isinstance(font_dict, dict):
            if isinstance(name, Name):
                label = str(name)
                if label not in self._warned_fonts:
                    self._warned_fonts.add(label)
                    log.warning("page %d: font resource /%s missing", self.page.index, label)
            return None
        key = id(font_dict)
        cached = self._font_cache.get(key)
        if cached is None:
            cached = LoadedFont(self.doc, font_dict, str(name))
            self._font_cache[key] = cached
        return cached

    def _show(self, raw: Any, state: _State, tm: Matrix) -> Matrix:
        if not isinstance(raw, bytes):
            return tm
        font = state.font
        if font is None:
            if not self._warned_no_font:
                self._warned_no_font = True
                log.warning("page %d: text shown before any font was selected", self.page.index)
            return tm
        if font.unsupported_reason is not None:
            if font.label not in self._warned_fonts:
                self._warned_fonts.add(font.label)
                log.warning(
                    "page %d: skipping text in font /%s (%s)",
                    self.page.index,
                    font.label,
                    font.unsupported_reason,
                )
            self._emit_break()
            return tm

        size = state.size
        th = state.horiz_scale
        asc = font.ascent / 1000.0
        desc = font.descent / 1000.0
        for gc in font.decode(raw):
            params: Matrix = (size * th, 0.0, 0.0, size, 0.0, state.rise)
            m = mat_mul(tm, state.ctm)
            trm = mat_mul(params, m)
            w = gc.width / 1000.0
            corners = (
                mat_apply(trm, 0.0, desc),
                mat_apply(trm, w, desc),
                mat_apply(trm, 0.0, asc),
                mat_apply(trm, w, asc),
            )
            xs = [p[0] for p in corners]
            ys = [p[1] for p in corners]
            origin = mat_apply(trm, 0.0, 0.0)
            eff_size = size * math.hypot(m[2], m[3])
            dx, dy = m[0], m[1]
            norm = math.hypot(dx, dy)
            direction = (dx / norm, dy / norm) if norm > 0 else (1.0, 0.0)

            tx = (w * size + state.char_spacing + (state.word_spacing if gc.is_space else 0.0)) * th
            tm = mat_mul(translation(tx, 0.0), tm)
            end = mat_apply(mat_mul(params, mat_mul(tm, state.ctm)), 0.0, 0.0)

            self.output.append(
                Glyph(
                    text=gc.text,
                    x0=min(xs),
                    y0=min(ys),
                    x1=max(xs),
                    y1=max(ys),
                    origin=origin,
                    end=end,
                    size=eff_size,
                    direction=direction,
                )
            )
        return tm

    def _run_xobject(
        self,
        name: Any,
        resources: dict,
        state: _State,
        active_forms: frozenset,
        depth: int,
    ) -> None:
        if depth >= _MAX_FORM_DEPTH or not isinstance(name, Name):
            return
        xobjects = self.doc.resolve(resources.get("XObject")) if resources else None
        if not isinstance(xobjects, dict):
            return
        ref = xobjects.get(str(name))
        xobj = self.doc.resolve(ref)
        if not isinstance(xobj, Stream):
            return
        subtype = self.doc.resolve(xobj.dict.get("Subtype"))
        if subtype != Name("Form"):
            return
        guard = id(xobj)
        if guard in active_forms:
            log.warning("page %d: form XObject cycle via /%s", self.page.index, str(name))
            return
        matrix = self.doc.resolve(xobj.dict.get("Matrix"))
        inner = state.copy()
        if isinstance(matrix, list) and len(matrix) == 6:
            m = tuple(_number(self.doc.resolve(v)) for v in matrix)
            inner.ctm = mat_mul(m, inner.ctm)  # type: ignore[arg-type]
        form_resources = self.doc.resolve(xobj.dict.get("Resources"))
        if not isinstance(form_resources, dict):
            form_resources = resources
        try:
            content = decode_stream(xobj.dict, xobj.raw, self.doc.resolve)
        except Exception:  # noqa: BLE001
            log.warning("page %d: undecodable form XObject /%s", self.page.index, str(name))
            return
        self._emit_break()
        self._execute(content, form_resources, inner, active_forms | {guard}, depth + 1)
        self._emit_break()
