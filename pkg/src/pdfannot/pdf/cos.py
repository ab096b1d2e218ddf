"""Lexer and parser for the PDF object syntax (the COS layer).

Python representations of PDF objects:

* booleans / integers / reals -> ``bool`` / ``int`` / ``float``
* strings -> ``bytes``
* names -> :class:`Name` (a ``str`` subclass, slash stripped)
* arrays -> ``list``
* dictionaries -> ``dict`` keyed by plain ``str``
* null -> ``None``
* indirect references -> :class:`Ref`
* streams -> :class:`Stream`
"""

from __future__ import annotations

from typing import Any, Callable, List, Optional, Tuple

from ..errors import MalformedPdf

WHITESPACE = b"\x00\t\n\x0c\r "
DELIMITERS = b"()<>[]{}/%"
_NUMBER_CHARS = b"0123456789+-."


class Name(str):
    """A PDF name; compares equal to the bare string without the slash."""

    __slots__ = ()

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"/{str.__str__(self)}"


class Operator(str):
    """A bare keyword token: content operators, ``obj``, ``R``, delimiters."""

    __slots__ = ()

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"op<{str.__str__(self)}>"


class Ref:
    """An indirect object reference ``num gen R``."""

    __slots__ = ("num", "gen")

    def __init__(self, num: int, gen: int) -> None:
        self.num = num
        self.gen = gen

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Ref) and (self.num, self.gen) == (other.num, other.gen)

    def __hash__(self) -> int:
        return hash((self.num, self.gen))

    def __repr__(self) -> str:
        return f"Ref({self.num}, {self.gen})"


class Stream:
    """A stream object: its dictionary plus the raw (still encoded) bytes."""

    __slots__ = ("dict", "raw")

    def __init__(self, dictionary: dict, raw: bytes) -> None:
        self.dict = dictionary
        self.raw = raw

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Stream({self.dict!r}, {len(self.raw)} bytes)"


class PdfEof(Exception):
    """Internal: the lexer ran off the end of its buffer."""


_ESCAPES = {
    ord("n"): b"\n",
    ord("r"): b"\r",
    ord("t"): b"\t",
    ord("b"): b"\b",
    ord("f"): b"\x0c",
    ord("("): b"(",
    ord(")"): b")",
    ord("\\"): b"\\",
}


class Lexer:
    """Tokenizer over a byte buffer.  Used for both file objects and
    content streams; composite objects are assembled by :class:`Parser`."""

    def __init__(self, data: bytes, pos: int = 0) -> None:
        self.data = data
        self.pos = pos

    def tell(self) -> int:
        return self.pos

    def seek(self, pos: int) -> None:
        self.pos = pos

    def _skip_whitespace(self) -> None:
        data, n = self.data, len(self.data)
        while self.pos < n:
            c = data[self.pos]
            if c in WHITESPACE:
                self.pos += 1
            elif c == 0x25:  # '%' comment runs to end of line
                while self.pos < n and data[self.pos] not in b"\r\n":
                    self.pos += 1
            else:
                return

    def next_token(self) -> Any:
        """Return the next primitive token, raising :class:`PdfEof` at the end."""
        self._skip_whitespace()
        data, n = self.data, len(self.data)
        if self.pos >= n:
            raise PdfEof()
        c = data[self.pos]
        if c in _NUMBER_CHARS:
            return self._read_number()
        if c == 0x2F:  # '/'
            return self._read_name()
        if c == 0x28:  # '('
            return self._read_literal_string()
        if c == 0x3C:  # '<'
            if self.pos + 1 < n and data[self.pos + 1] == 0x3C:
                self.pos += 2
                return Operator("<<")
            return self._read_hex_string()
        if c == 0x3E:  # '>'
            if self.pos + 1 < n and data[self.pos + 1] == 0x3E:
                self.pos += 2
                return Operator(">>")
            raise MalformedPdf(f"stray '>' at offset {self.pos}")
        if c in b"[]{}":
            self.pos += 1
            return Operator(chr(c))
        if c == 0x29:  # ')'
            raise MalformedPdf(f"stray ')' at offset {self.pos}")
        return self._read_keyword()

    def _read_number(self) -> Any:
        data, n = self.data, len(self.data)
        start = self.pos
        while self.pos < n and data[self.pos] in _NUMBER_CHARS:
            self.pos += 1
        text = data[start : self.pos]
        try:
            if b"." in text:
                return float(text)
            return int(text)
        except ValueError:
            # Oddities like "--3" or a lone "-"; salvage what we can.
            try:
                return float(text.replace(b"-", b"-", 1).lstrip(b"+"))
            except ValueError as exc:
                raise MalformedPdf(f"bad number {text!r} at offset {start}") from exc

    def _read_name(self) -> Name:
        data, n = self.data, len(self.data)
        self.pos += 1  # skip '/'
        out = bytearray()
        while self.pos < n:
            c = data[self.pos]
            if c in WHITESPACE or c in DELIMITERS:
                break
            if c == 0x23 and self.pos + 2 < n:  # '#' hex escape
                try:
                    out.append(int(data[self.pos + 1 : self.pos + 3], 16))
                    self.pos += 3
                    continue
                except ValueError:
                    pass
            out.append(c)
            self.pos += 1
        return Name(out.decode("latin-1"))

    def _read_literal_string(self) -> bytes:
        data, n = self.data, len(self.data)
        self.pos += 1  # skip '('
        out = bytearray()
        depth = 1
        while self.pos < n:
            c = data[self.pos]
            if c == 0x5C:  # backslash
                self.pos += 1
                if self.pos >= n:
                    break
                e = data[self.pos]
                if e in _ESCAPES:
                    out += _ESCAPES[e]
                    self.pos += 1
                elif 0x30 <= e <= 0x37:  # up to three octal digits
                    digits = bytearray()
                    while self.pos < n and len(digits) < 3 and 0x30 <= data[self.pos] <= 0x37:
                        digits.append(data[self.pos])
                        self.pos += 1
                    out.append(int(digits, 8) & 0xFF)
                elif e in b"\r\n":  # line continuation
                    self.pos += 1
                    if e == 0x0D and self.pos < n and data[self.pos] == 0x0A:
                        self.pos += 1
                else:  # unknown escape: keep the char
                    out.append(e)
                    self.pos += 1
            elif c == 0x28:
                depth += 1
                out.append(c)
                self.pos += 1
            elif c == 0x29:
                depth -= 1
                self.pos += 1
                if depth == 0:
                    return bytes(out)
                out.append(c)
            elif c == 0x0D:  # CR or CRLF inside a string reads as LF
                out.append(0x0A)
                self.pos += 1
                if self.pos < n and data[self.pos] == 0x0A:
                    self.pos += 1
            else:
                out.append(c)
                self.pos += 1
        raise MalformedPdf("unterminated literal string")

    def _read_hex_string(self) -> bytes:
        data, n = self.data, len(self.data)
        self.pos += 1  # skip '<'
        digits = bytearray()
        while self.pos < n:
            c = data[self.pos]
            self.pos += 1
            if c == 0x3E:  # '>'
                if len(digits) % 2:
                    digits.append(0x30)
                return bytes.fromhex(digits.decode("ascii"))
            if c in WHITESPACE:
                continue
            if c in b"0123456789abcdefABCDEF":
                digits.append(c)
            else:
                raise MalformedPdf(f"bad hex digit {chr(c)!r} in string at offset {self.pos - 1}")
        raise MalformedPdf("unterminated hex string")

    def _read_keyword(self) -> Any:
        data, n = self.data, len(self.data)
        start = self.pos
        while self.pos < n:
            c = data[self.pos]
            if c in WHITESPACE or c in DELIMITERS:
                break
            self.pos += 1
        word = data[start : self.pos]
        if not word:
            raise MalformedPdf(f"unexpected byte {data[start]!r} at offset {start}")
        if word == b"true":
            return True
        if word == b"false":
            return False
        return Operator(word.decode("latin-1"))


class Parser:
    """Assembles full objects from a :class:`Lexer` token stream.

    ``resolve`` (when given) maps indirect references to direct objects; it
    is needed to honour indirect ``/Length`` entries on streams.
    """

    def __init__(self, lexer: Lexer, resolve: Optional[Callable[[Any], Any]] = None) -> None:
        self.lexer = lexer
        self.resolve = resolve

    def parse_object(self) -> Any:
        return self._from_token(self.lexer.next_token())

    def _from_token(self, tok: Any) -> Any:
        if isinstance(tok, Operator):
            if tok == "[":
                return self._parse_array()
            if tok == "<<":
                return self._parse_dict_or_stream()
            if tok == "null":
                return None
            raise MalformedPdf(f"unexpected keyword {str(tok)!r} at offset {self.lexer.tell()}")
        if isinstance(tok, int) and not isinstance(tok, bool):
            return self._maybe_reference(tok)
        return tok

    def _maybe_reference(self, first: int) -> Any:
        mark = self.lexer.tell()
        try:
            second = self.lexer.next_token()
            if isinstance(second, int) and not isinstance(second, bool):
                third = self.lexer.next_token()
                if isinstance(third, Operator) and third == "R":
                    return Ref(first, second)
        except (PdfEof, MalformedPdf):
            pass
        self.lexer.seek(mark)
        return first

    def _parse_array(self) -> list:
        out: list = []
        while True:
            tok = self.lexer.next_token()
            if isinstance(tok, Operator) and tok == "]":
                return out
            out.append(self._from_token(tok))

    def _parse_dict_or_stream(self) -> Any:
        d: dict = {}
        while True:
            tok = self.lexer.next_token()
            if isinstance(tok, Operator) and tok == ">>":
                break
            if not isinstance(tok, Name):
                raise MalformedPdf(f"dictionary key is not a name at offset {self.lexer.tell()}")
            d[str(tok)] = self.parse_object()
        mark = self.lexer.tell()
        try:
            nxt = self.lexer.next_token()
        except PdfEof:
            return d
        if isinstance(nxt, Operator) and nxt == "stream":
            return self._read_stream(d)
        self.lexer.seek(mark)
        return d

    def _read_stream(self, d: dict) -> Stream:
        data = self.lexer.data
        pos = self.lexer.tell()
        # The keyword is followed by CRLF or LF (a lone CR is tolerated).
        if data[pos : pos + 2] == b"\r\n":
            pos += 2
        elif pos < len(data) and data[pos] in b"\r\n":
            pos += 1
        length = d.get("Length")
        if self.resolve is not None:
            length = self.resolve(length)
        raw: Optional[bytes] = None
        if isinstance(length, int) and length >= 0 and pos + length <= len(data):
            candidate = data[pos : pos + length]
            follow = data[pos + length : pos + length + 20]
            if b"endstream" in follow or follow.lstrip(bytes(WHITESPACE)).startswith(b"endstream"):
                raw = candidate
                pos += length
        if raw is None:
            # Untrustworthy /Length: scan for the nearest endstream keyword.
            end = data.find(b"endstream", pos)
            if end < 0:
                raise MalformedPdf("stream without endstream")
            raw = data[pos:end]
            if raw.endswith(b"\r\n"):
                raw = raw[:-2]
            elif raw and raw[-1:] in (b"\r", b"\n"):
                raw = raw[:-1]
            pos = end
        end_kw = data.find(b"endstream", pos)
        if end_kw < 0:
            raise MalformedPdf("stream without endstream")
        self.lexer.seek(end_kw + len(b"endstream"))
        return Stream(d, raw)


def parse_content_tokens(data: bytes) -> List[Tuple[List[Any], Operator]]:
    """Split a decoded content stream into ``(operands, operator)`` pairs.

    Inline image payloads (``BI .. ID <binary> EI``) are skipped entirely;
    malformed trailing garbage ends the stream rather than failing it.
    """
    lexer = Lexer(data)
    parser = Parser(lexer)
    out: List[Tuple[List[Any], Operator]] = []
    operands: List[Any] = []
    while True:
        try:
            tok = lexer.next_token()
        except PdfEof:
            break
        except MalformedPdf:
            break
        if isinstance(tok, Operator) and tok not in ("[", "<<", "null") and tok not in ("]", ">>"):
            if tok == "BI":
                _skip_inline_image(lexer)
                operands = []
                continue
            out.append((operands, tok))
            operands = []
            continue
        try:
            operands.append(parser._from_token(tok))
        except MalformedPdf:
            operands = []
    return out


def _skip_inline_image(lexer: Lexer) -> None:
    """Advance past an inline image: parameters, ``ID``, binary data, ``EI``."""
    data, n = lexer.data, len(lexer.data)
    # Parameters end at the ID keyword.
    while True:
        try:
            tok = lexer.next_token()
        except (PdfEof, MalformedPdf):
            return
        if isinstance(tok, Operator) and tok == "ID":
            break
    pos = lexer.tell()
    if pos < n and data[pos] in WHITESPACE:
        pos += 1
    # Find EI framed by whitespace (or the ends of the stream).
    while True:
        idx = data.find(b"EI", pos)
        if idx < 0:
            lexer.seek(n)
            return
        before_ok = idx == 0 or data[idx - 1] in WHITESPACE
        after = idx + 2
        after_ok = after >= n or data[after] in WHITESPACE or data[after] in DELIMITERS
        if before_ok and after_ok:
            lexer.seek(after)
            return
        pos = idx + 2
