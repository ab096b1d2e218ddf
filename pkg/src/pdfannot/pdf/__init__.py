"""Built-in PDF token extraction and the external pre-processor interface."""

from .extract import extract_token_layout
from .external import run_external_processor
from .synthetic import SyntheticPage, TextPlacement, build_pdf

__all__ = [
    "extract_token_layout",
    "run_external_processor",
    "SyntheticPage",
    "TextPlacement",
    "build_pdf",
]
