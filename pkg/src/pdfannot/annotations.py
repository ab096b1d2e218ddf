"""Annotation data model and authoritative geometry.

Textual annotations are backed by token references and their bounds are
always *derived*: the padded union of the referenced token boxes, clamped to
the page ("snapping"). Freeform annotations keep the rectangle the annotator
drew. Relations are N-ary labeled links over annotation ids.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import EmptySelection, ValidationFailed
from .geometry import Bounds, intersection_area, union
from .tokens import PageInfo, PageTokenLayout, Token

DEFAULT_SNAP_PADDING = 3.0

# Tolerance when comparing stored bounds against recomputed snapped bounds.
SNAP_TOLERANCE = 1e-6

_COLOR_RE = re.compile(r"^#[0-9a-fA-F]{6}$")


@dataclass(frozen=True)
class TokenRef:
    """Reference to one token of a document layout."""

    page_index: int
    token_index: int

    def to_dict(self) -> dict:
        return {"pageIndex": self.page_index, "tokenIndex": self.token_index}


@dataclass(frozen=True)
class Annotation:
    """A labeled region; token-backed when ``tokens`` is present."""

    id: str
    page: int
    label: str
    bounds: Bounds
    tokens: Optional[Tuple[TokenRef, ...]] = None

    @property
    def is_textual(self) -> bool:
        return self.tokens is not None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "page": self.page,
            "label": self.label,
            "bounds": self.bounds.to_dict(),
            "tokens": [t.to_dict() for t in self.tokens] if self.tokens is not None else None,
        }


@dataclass(frozen=True)
class RelationGroup:
    """N-ary labeled link over annotation ids, at least two targets."""

    id: str
    label: str
    target_ids: Tuple[str, ...]

    def to_dict(self) -> dict:
        return {"id": self.id, "label": self.label, "targetIds": list(self.target_ids)}


@dataclass(frozen=True)
class Label:
    text: str
    color: str
    freeform: bool = False


@dataclass
class LabelSchema:
    """Project label schema: box labels with display colors, relation labels."""

    labels: List[Label] = field(default_factory=list)
    relations: List[str] = field(default_factory=list)

    def __post_init__(self):
        names = [l.text for l in self.labels]
        if len(set(names)) != len(names):
            raise ValueError("label names must be unique")
        if len(set(self.relations)) != len(self.relations):
            raise ValueError("relation names must be unique")
        for label in self.labels:
            if not _COLOR_RE.match(label.color):
                raise ValueError(f"label {label.text!r}: color must be #rrggbb, got {label.color!r}")

    def label_names(self) -> List[str]:
        return [l.text for l in self.labels]

    def is_freeform(self, label: str) -> bool:
        for entry in self.labels:
            if entry.text == label:
                return entry.freeform
        return False

    def to_dict(self) -> dict:
        labels = []
        for l in self.labels:
            entry = {"text": l.text, "color": l.color}
            if l.freeform:
                entry["freeform"] = True
            labels.append(entry)
        return {"labels": labels, "relations": [{"text": r} for r in self.relations]}

    @classmethod
    def from_dict(cls, payload: dict) -> "LabelSchema":
        labels = [
            Label(
                text=str(entry["text"]),
                color=str(entry["color"]),
                freeform=bool(entry.get("freeform", False)),
            )
            for entry in payload.get("labels", [])
        ]
        relations = [str(entry["text"]) for entry in payload.get("relations", [])]
        return cls(labels=labels, relations=relations)


# --- geometry operations ----------------------------------------------------

def select_tokens(layout: PageTokenLayout, drag_rect: Bounds) -> List[int]:
    """Indices of tokens overlapping ``drag_rect`` with positive area.

    Grazing contact (zero-area overlap along an edge) does not select.
    Result preserves layout order.
    """
    return [
        i
        for i, token in enumerate(layout.tokens)
        if intersection_area(token.bounds, drag_rect) > 0
    ]


def snap_bounds(
    tokens: Sequence[Token],
    padding: float = DEFAULT_SNAP_PADDING,
    page: Optional[PageInfo] = None,
) -> Bounds:
    """Padded axis-aligned union of token boxes, clamped to the page.

    The left/top edges never go below 0; when ``page`` is given the
    right/bottom edges are clamped to the page dimensions as well.
    """
    if not tokens:
        raise EmptySelection("cannot snap an empty token selection")
    if padding < 0:
        raise ValueError(f"padding must be non-negative, got {padding}")
    box = union(t.bounds for t in tokens)
    left = max(0.0, box.left - padding)
    top = max(0.0, box.top - padding)
    right = box.right + padding
    bottom = box.bottom + padding
    if page is not None:
        right = min(page.width, right)
        bottom = min(page.height, bottom)
    # Tokens may overhang the page by the allowed slack; keep the box valid.
    right = max(right, left)
    bottom = max(bottom, top)
    return Bounds(left=left, top=top, right=right, bottom=bottom)


# --- annotation-file format --------------------------------------------------

def annotation_set_to_jsonable(
    annotations: Sequence[Annotation], relations: Sequence[RelationGroup]
) -> dict:
    return {
        "annotations": [a.to_dict() for a in annotations],
        "relations": [r.to_dict() for r in relations],
    }


def _malformed(message: str) -> ValidationFailed:
    return ValidationFailed([Violation(code="malformed-payload", message=message)])


def parse_annotation_set(payload) -> Tuple[List[Annotation], List[RelationGroup]]:
    """Parse the annotation-file payload; raises ValidationFailed on shape errors."""
    if not isinstance(payload, dict):
        raise _malformed("expected an object with 'annotations' and 'relations'")
    raw_annotations = payload.get("annotations", [])
    raw_relations = payload.get("relations", [])
    if not isinstance(raw_annotations, list) or not isinstance(raw_relations, list):
        raise _malformed("'annotations' and 'relations' must be lists")

    annotations: List[Annotation] = []
    for i, raw in enumerate(raw_annotations):
        where = f"annotations[{i}]"
        if not isinstance(raw, dict):
            raise _malformed(f"{where}: expected an object")
        try:
            bounds = Bounds.from_dict(raw["bounds"])
        except (KeyError, TypeError, ValueError) as exc:
            raise _malformed(f"{where}.bounds: {exc}") from exc
        raw_tokens = raw.get("tokens")
        tokens: Optional[Tuple[TokenRef, ...]] = None
        if raw_tokens is not None:
            if not isinstance(raw_tokens, list):
                raise _malformed(f"{where}.tokens: expected a list or null")
            try:
                tokens = tuple(
                    TokenRef(page_index=int(t["pageIndex"]), token_index=int(t["tokenIndex"]))
                    for t in raw_tokens
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise _malformed(f"{where}.tokens: {exc}") from exc
        try:
            annotations.append(
                Annotation(
                    id=str(raw["id"]),
                    page=int(raw["page"]),
                    label=str(raw["label"]),
                    bounds=bounds,
                    tokens=tokens,
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise _malformed(f"{where}: {exc}") from exc

    relations: List[RelationGroup] = []
    for i, raw in enumerate(raw_relations):
        where = f"relations[{i}]"
        if not isinstance(raw, dict):
            raise _malformed(f"{where}: expected an object")
        try:
            relations.append(
                RelationGroup(
                    id=str(raw["id"]),
                    label=str(raw["label"]),
                    target_ids=tuple(str(t) for t in raw["targetIds"]),
                )
            )
        except (KeyError, TypeError) as exc:
            raise _malformed(f"{where}: {exc}") from exc
    return annotations, relations


# --- validation ---------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    """One invariant violation; violations are data, not failures."""

    code: str
    message: str
    subject_id: str = ""

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "subjectId": self.subject_id}


def canonicalize_annotations(
    annotations: Sequence[Annotation],
    layouts: Sequence[PageTokenLayout],
    padding: float = DEFAULT_SNAP_PADDING,
) -> List[Annotation]:
    """Recompute snapped bounds for every token-backed annotation.

    Client-supplied bounds are never trusted for textual annotations; this
    enforces the canonical-bounds rule server-side. Annotations whose token
    references do not resolve are returned unchanged so validation can report
    them.
    """
    result: List[Annotation] = []
    for ann in annotations:
        if not ann.tokens:
            result.append(ann)
            continue
        resolved: List[Token] = []
        ok = True
        for ref in ann.tokens:
            if ref.page_index != ann.page or not (0 <= ref.page_index < len(layouts)):
                ok = False
                break
            layout = layouts[ref.page_index]
            if not (0 <= ref.token_index < len(layout.tokens)):
                ok = False
                break
            resolved.append(layout.tokens[ref.token_index])
        if not ok:
            result.append(ann)
            continue
        snapped = snap_bounds(resolved, padding=padding, page=layouts[ann.page].page)
        result.append(
            Annotation(id=ann.id, page=ann.page, label=ann.label, bounds=snapped, tokens=ann.tokens)
        )
    return result


def validate_annotation_set(
    annotations: Sequence[Annotation],
    relations: Sequence[RelationGroup],
    layouts: Sequence[PageTokenLayout],
    schema: LabelSchema,
    padding: float = DEFAULT_SNAP_PADDING,
) -> List[Violation]:
    """Every invariant violation in the set; empty list means valid."""
    violations: List[Violation] = []
    labels = set(schema.label_names())
    relation_labels = set(schema.relations)

    seen_ids: set = set()
    for ann in annotations:
        if ann.id in seen_ids:
            violations.append(
                Violation("duplicate-annotation-id", f"annotation id {ann.id!r} appears twice", ann.id)
            )
        seen_ids.add(ann.id)

        if ann.label not in labels:
            violations.append(
                Violation("unknown-label", f"label {ann.label!r} is not in the project schema", ann.id)
            )
        if not (0 <= ann.page < len(layouts)):
            violations.append(
                Violation("unknown-page", f"page {ann.page} does not exist in the document", ann.id)
            )
            continue
        page = layouts[ann.page].page

        if ann.bounds.area <= 0:
            violations.append(
                Violation("degenerate-bounds", "annotation bounds have zero area", ann.id)
            )
        if (
            ann.bounds.left < -SNAP_TOLERANCE
            or ann.bounds.top < -SNAP_TOLERANCE
            or ann.bounds.right > page.width + SNAP_TOLERANCE
            or ann.bounds.bottom > page.height + SNAP_TOLERANCE
        ):
            violations.append(
                Violation("out-of-page-bounds", "annotation bounds extend beyond the page", ann.id)
            )

        if ann.tokens is None:
            continue
        if len(ann.tokens) == 0:
            violations.append(
                Violation("empty-token-refs", "textual annotation has an empty token list", ann.id)
            )
            continue
        refs_ok = True
        resolved: List[Token] = []
        for ref in ann.tokens:
            if ref.page_index != ann.page:
                violations.append(
                    Violation(
                        "token-page-mismatch",
                        f"token reference on page {ref.page_index} but annotation is on page {ann.page}",
                        ann.id,
                    )
                )
                refs_ok = False
                break
            layout = layouts[ref.page_index]
            if not (0 <= ref.token_index < len(layout.tokens)):
                violations.append(
                    Violation(
                        "unknown-token",
                        f"token {ref.token_index} does not exist on page {ref.page_index}",
                        ann.id,
                    )
                )
                refs_ok = False
                break
            resolved.append(layout.tokens[ref.token_index])
        if not refs_ok:
            continue
        expected = snap_bounds(resolved, padding=padding, page=page)
        drift = max(
            abs(expected.left - ann.bounds.left),
            abs(expected.top - ann.bounds.top),
            abs(expected.right - ann.bounds.right),
            abs(expected.bottom - ann.bounds.bottom),
        )
        if drift > SNAP_TOLERANCE:
            violations.append(
                Violation(
                    "snap-mismatch",
                    f"stored bounds differ from the snapped token union by {drift:.6g}pt",
                    ann.id,
                )
            )

    annotation_ids = {a.id for a in annotations}
    seen_relation_ids: set = set()
    for rel in relations:
        if rel.id in seen_relation_ids:
            violations.append(
                Violation("duplicate-relation-id", f"relation id {rel.id!r} appears twice", rel.id)
            )
        seen_relation_ids.add(rel.id)
        if rel.label not in relation_labels:
            violations.append(
                Violation(
                    "unknown-relation-label",
                    f"relation label {rel.label!r} is not in the project schema",
                    rel.id,
                )
            )
        if len(rel.target_ids) < 2:
            violations.append(
                Violation(
                    "relation-too-few-targets",
                    f"relation has {len(rel.target_ids)} target(s); at least 2 required",
                    rel.id,
                )
            )
        if len(set(rel.target_ids)) != len(rel.target_ids):
            violations.append(
                Violation("duplicate-relation-target", "relation targets contain duplicates", rel.id)
            )
        for target in rel.target_ids:
            if target not in annotation_ids:
                violations.append(
                    Violation(
                        "dangling-relation-target",
                        f"relation targets missing annotation {target!r}",
                        rel.id,
                    )
                )
    return violations
