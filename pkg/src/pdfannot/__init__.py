"""PDF annotation platform: token extraction, snapped annotation geometry,
agreement metrics, on-disk project storage, exporters, HTTP service and CLI."""

from .annotations import (
    DEFAULT_SNAP_PADDING,
    Annotation,
    Label,
    LabelSchema,
    RelationGroup,
    TokenRef,
    select_tokens,
    snap_bounds,
)
from .geometry import Bounds, rescale_bounds
from .tokens import PageInfo, PageTokenLayout, Token

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "Bounds",
    "DEFAULT_SNAP_PADDING",
    "Label",
    "LabelSchema",
    "PageInfo",
    "PageTokenLayout",
    "RelationGroup",
    "Token",
    "TokenRef",
    "rescale_bounds",
    "select_tokens",
    "snap_bounds",
    "__version__",
]
