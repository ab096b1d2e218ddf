"""Stream filter decoders: Flate, LZW, ASCIIHex, ASCII85 and RunLength."""

from __future__ import annotations

import base64
import zlib
from typing import Any, Callable, List, Optional

from ..errors import MalformedPdf, UnsupportedFeature

_IMAGE_ONLY = {"DCTDecode", "DCT", "CCITTFaxDecode", "CCF", "JBIG2Decode", "JPXDecode"}


def decode_stream(dictionary: dict, raw: bytes, resolve: Callable[[Any], Any]) -> bytes:
    """Decode ``raw`` through the stream's filter chain."""
    filters = resolve(dictionary.get("Filter"))
    if filters is None:
        return raw
    if not isinstance(filters, list):
        filters = [filters]
    parms = resolve(dictionary.get("DecodeParms", dictionary.get("DP")))
    if not isinstance(parms, list):
        parms = [parms] * len(filters)
    data = raw
    for fname, parm in zip(filters, parms):
        fname = str(resolve(fname))
        parm = resolve(parm) or {}
        if fname in ("FlateDecode", "Fl"):
            data = _flate(data)
            data = _apply_predictor(data, parm, resolve)
        elif fname in ("LZWDecode", "LZW"):
            data = _lzw(data, int(resolve(parm.get("EarlyChange", 1)) or 0))
            data = _apply_predictor(data, parm, resolve)
        elif fname in ("ASCIIHexDecode", "AHx"):
            data = _ascii_hex(data)
        elif fname in ("ASCII85Decode", "A85"):
            data = _ascii85(data)
        elif fname in ("RunLengthDecode", "RL"):
            data = _run_length(data)
        elif fname in _IMAGE_ONLY:
            raise UnsupportedFeature(f"image filter {fname} on a non-image stream")
        elif fname == "Crypt":
            raise UnsupportedFeature("Crypt stream filter")
        else:
            raise UnsupportedFeature(f"unknown stream filter {fname}")
    return data


def _flate(data: bytes) -> bytes:
    try:
        return zlib.decompress(data)
    except zlib.error:
        # Tolerate truncated or trailing-garbage deflate data.
        try:
            d = zlib.decompressobj()
            return d.decompress(data)
        except zlib.error as exc:
            raise MalformedPdf(f"bad deflate data: {exc}") from exc


def _lzw(data: bytes, early_change: int = 1) -> bytes:
    out = bytearray()
    table: List[bytes] = [bytes([i]) for i in range(256)] + [b"", b""]
    width = 9
    bit_pos = 0
    total_bits = len(data) * 8
    prev: Optional[bytes] = None
    while bit_pos + width <= total_bits:
        byte_pos, offset = divmod(bit_pos, 8)
        chunk = int.from_bytes(data[byte_pos : byte_pos + 3].ljust(3, b"\x00"), "big")
        code = (chunk >> (24 - offset - width)) & ((1 << width) - 1)
        bit_pos += width
        if code == 256:
            table = table[:258]
            width = 9
            prev = None
            continue
        if code == 257:
            break
        if prev is None:
            if code >= len(table):
                raise MalformedPdf("bad LZW start code")
            entry = table[code]
        else:
            if code < len(table):
                entry = table[code]
            elif code == len(table):
                entry = prev + prev[:1]
            else:
                raise MalformedPdf("bad LZW code")
            table.append(prev + entry[:1])
        out += entry
        prev = entry
        if len(table) + early_change - 1 >= (1 << width) and width < 12:
            width += 1
    return bytes(out)


def _ascii_hex(data: bytes) -> bytes:
    end = data.find(b">")
    if end >= 0:
        data = data[:end]
    digits = bytes(c for c in data if c not in b"\x00\t\n\x0c\r ")
    if len(digits) % 2:
        digits += b"0"
    try:
        return bytes.fromhex(digits.decode("ascii"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise MalformedPdf("bad ASCIIHex data") from exc


def _ascii85(data: bytes) -> bytes:
    text = bytes(c for c in data if c not in b"\x00\t\n\x0c\r ")
    if text.startswith(b"<~"):
        text = text[2:]
    if text.endswith(b"~>"):
        text = text[:-2]
    try:
        return base64.a85decode(text)
    except ValueError as exc:
        raise MalformedPdf("bad ASCII85 data") from exc


def _run_length(data: bytes) -> bytes:
    out = bytearray()
    i, n = 0, len(data)
    while i < n:
        length = data[i]
        i += 1
        if length == 128:
            break
        if length < 128:
            out += data[i : i + length + 1]
            i += length + 1
        else:
            if i >= n:
                raise MalformedPdf("truncated run-length data")
            out += data[i : i + 1] * (257 - length)
            i += 1
    return bytes(out)


def _apply_predictor(data: bytes, parm: dict, resolve: Callable[[Any], Any]) -> bytes:
    predictor = int(resolve(parm.get("Predictor", 1)) or 1)
    if predictor <= 1:
        return data
    colors = int(resolve(parm.get("Colors", 1)) or 1)
    bpc = int(resolve(parm.get("BitsPerComponent", 8)) or 8)
    columns = int(resolve(parm.get("Columns", 1)) or 1)
    sample_bytes = max(1, (colors * bpc + 7) // 8)
    row_len = (columns * colors * bpc + 7) // 8
    if predictor == 2:
        if bpc != 8:
            raise UnsupportedFeature("TIFF predictor with sub-byte samples")
        out = bytearray(data)
        for row in range(0, len(out) - row_len + 1, row_len):
            for i in range(row + sample_bytes, row + row_len):
                out[i] = (out[i] + out[i - sample_bytes]) & 0xFF
        return bytes(out)
    if predictor >= 10:
        return _png_predictor(data, row_len, sample_bytes)
    raise UnsupportedFeature(f"predictor {predictor}")


def _png_predictor(data: bytes, row_len: int, bpp: int) -> bytes:
    out = bytearray()
    prev = bytearray(row_len)
    pos = 0
    while pos + 1 <= len(data):
        ftype = data[pos]
        row = bytearray(data[pos + 1 : pos + 1 + row_len])
        if len(row) < row_len:
            row += bytes(row_len - len(row))
        pos += 1 + row_len
        if ftype == 0:
            pass
        elif ftype == 1:
            for i in range(bpp, row_len):
                row[i] = (row[i] + row[i - bpp]) & 0xFF
        elif ftype == 2:
            for i in range(row_len):
                row[i] = (row[i] + prev[i]) & 0xFF
        elif ftype == 3:
            for i in range(row_len):
                left = row[i - bpp] if i >= bpp else 0
                row[i] = (row[i] + ((left + prev[i]) >> 1)) & 0xFF
        elif ftype == 4:
            for i in range(row_len):
                a = row[i - bpp] if i >= bpp else 0
                b = prev[i]
                c = prev[i - bpp] if i >= bpp else 0
                p = a + b - c
                pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
                if pa <= pb and pa <= pc:
                    pred = a
                elif pb <= pc:
                    pred = b
                else:
                    pred = c
                row[i] = (row[i] + pred) & 0xFF
        else:
            raise MalformedPdf(f"bad PNG filter type {ftype}")
        out += row
        prev = row
    return bytes(out)
