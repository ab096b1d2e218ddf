"""Delegating token extraction to an external command.

The command template names where the PDF path goes with a ``{pdf}``
placeholder.  With an ``{out}`` placeholder the layout is read from that
file afterwards; without one it is read from the command's stdout.
"""

from __future__ import annotations

import shlex
import subprocess
import tempfile
from pathlib import Path
from typing import List

from ..errors import ProcessorFailed
from ..tokens import PageTokenLayout, load_layout

_STDERR_LIMIT = 2000


def run_external_processor(command_template: str, pdf_path: Path) -> List[PageTokenLayout]:
    """Run ``command_template`` on ``pdf_path`` and parse the produced layout.

    Raises :class:`ProcessorFailed` on a non-zero exit and
    :class:`~pdfannot.errors.InvalidLayout` when the output does not parse.
    """
    if "{pdf}" not in command_template:
        raise ValueError("processor command must contain a {pdf} placeholder")
    use_out_file = "{out}" in command_template

    argv = shlex.split(command_template)
    with tempfile.TemporaryDirectory(prefix="pdfannot-proc-") as tmp:
        out_path = Path(tmp) / "layout.json"
        substitutions = {"pdf": str(pdf_path), "out": str(out_path)}
        argv = [_substitute(arg, substitutions) for arg in argv]
        try:
            proc = subprocess.run(argv, capture_output=True, check=False)
        except OSError as exc:
            raise ProcessorFailed(f"could not run {argv[0]!r}: {exc}", returncode=-1, stderr="") from exc
        stderr = proc.stderr.decode("utf-8", "replace")
        if proc.returncode != 0:
            detail = stderr.strip()[:_STDERR_LIMIT]
            raise ProcessorFailed(
                f"processor exited with status {proc.returncode}" + (f": {detail}" if detail else ""),
                returncode=proc.returncode,
                stderr=stderr,
            )
        if use_out_file:
            try:
                text = out_path.read_text(encoding="utf-8")
            except OSError as exc:
                raise ProcessorFailed(
                    f"processor wrote no output file: {exc}",
                    returncode=proc.returncode,
                    stderr=stderr,
                ) from exc
        else:
            text = proc.stdout.decode("utf-8", "replace")
    return load_layout(text)


def _substitute(arg: str, values: dict) -> str:
    out = arg
    for key, value in values.items():
        out = out.replace("{" + key + "}", value)
    return out
