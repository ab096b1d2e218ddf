"""Rectangle arithmetic in original-PDF point coordinates, top-left origin.

All annotation geometry in the project is stored in this frame; pixel frames
exist only transiently in clients and are produced via :func:`rescale_bounds`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidDimensions


@dataclass(frozen=True)
class Bounds:
    """Axis-aligned rectangle; ``left <= right`` and ``top <= bottom``."""

    left: float
    top: float
    right: float
    bottom: float

    def __post_init__(self):
        if self.left > self.right or self.top > self.bottom:
            raise ValueError(
                f"invalid bounds: left={self.left} top={self.top} "
                f"right={self.right} bottom={self.bottom}"
            )

    @property
    def width(self) -> float:
        return self.right - self.left

    @property
    def height(self) -> float:
        return self.bottom - self.top

    @property
    def area(self) -> float:
        return self.width * self.height

    def to_dict(self) -> dict:
        return {
            "left": self.left,
            "top": self.top,
            "right": self.right,
            "bottom": self.bottom,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "Bounds":
        return cls(
            left=float(payload["left"]),
            top=float(payload["top"]),
            right=float(payload["right"]),
            bottom=float(payload["bottom"]),
        )


def intersection_area(a: Bounds, b: Bounds) -> float:
    """Overlap area of two rectangles; 0.0 when they merely touch."""
    w = min(a.right, b.right) - max(a.left, b.left)
    h = min(a.bottom, b.bottom) - max(a.top, b.top)
    if w <= 0 or h <= 0:
        return 0.0
    return w * h


def union(boxes) -> Bounds:
    """Axis-aligned bounding box of one or more rectangles."""
    boxes = list(boxes)
    if not boxes:
        raise ValueError("union of zero rectangles is undefined")
    return Bounds(
        left=min(b.left for b in boxes),
        top=min(b.top for b in boxes),
        right=max(b.right for b in boxes),
        bottom=max(b.bottom for b in boxes),
    )


def iou(a: Bounds, b: Bounds) -> float:
    """Intersection over union. Defined as 0.0 for degenerate boxes."""
    inter = intersection_area(a, b)
    denom = a.area + b.area - inter
    if denom <= 0:
        return 0.0
    return inter / denom


def rescale_bounds(b: Bounds, from_size: tuple, to_size: tuple) -> Bounds:
    """Project a rectangle from one page size to another.

    ``from_size`` and ``to_size`` are (width, height) pairs; x coordinates
    scale by the width ratio, y coordinates by the height ratio.
    """
    fw, fh = from_size
    tw, th = to_size
    if fw <= 0 or fh <= 0 or tw <= 0 or th <= 0:
        raise InvalidDimensions(
            f"page dimensions must be positive: from={from_size} to={to_size}"
        )
    sx = tw / fw
    sy = th / fh
    return Bounds(
        left=b.left * sx,
        top=b.top * sy,
        right=b.right * sx,
        bottom=b.bottom * sy,
    )
