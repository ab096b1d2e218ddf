"""Filesystem project store.

Layout under the project root::

    config.json                     label/relation schema + settings
    <sha256>/document.pdf           the PDF, named by its content hash
    <sha256>/structure.json         per-page token layout
    <sha256>/<annotator>.json       one annotation file per annotator
    <sha256>/status/<name>.json     assignment marker + progress status
    <sha256>/revisions.json         per-annotator save counters

Every write goes through an atomic replace so a crash mid-save never
corrupts previously committed state.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .annotations import (
    Annotation,
    LabelSchema,
    RelationGroup,
    TokenRef,
    Violation,
    annotation_set_to_jsonable,
    canonicalize_annotations,
    parse_annotation_set,
    select_tokens,
    validate_annotation_set,
)
from .errors import (
    InvalidIdentity,
    InvalidStatus,
    MalformedPdf,
    NotAssigned,
    UnknownDocument,
    ValidationFailed,
)
from .pdf import extract_token_layout
from .tokens import PageTokenLayout, dump_layout, load_layout

PREDICTIONS = "__predictions__"

_RESERVED_NAMES = {"document", "structure", "status", "revisions", "config"}
_IDENTITY_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._@-]{0,127}$")
_HASH_RE = re.compile(r"^[0-9a-f]{64}$")

_CONFIG_NAME = "config.json"
_PDF_NAME = "document.pdf"
_STRUCTURE_NAME = "structure.json"
_STATUS_DIR = "status"
_REVISIONS_NAME = "revisions.json"


def validate_identity(name: str) -> str:
    """Check an annotator identity is safe to use as a file name."""
    if not isinstance(name, str) or not _IDENTITY_RE.match(name):
        raise InvalidIdentity(f"invalid annotator identity {name!r}")
    if name in _RESERVED_NAMES:
        raise InvalidIdentity(f"annotator identity {name!r} is reserved")
    return name


def _atomic_write_bytes(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def _dump_json(payload) -> bytes:
    return (json.dumps(payload, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


@dataclass(frozen=True)
class Status:
    """Progress marker; its file's existence is what assignment means."""

    finished: bool = False
    junk: bool = False
    comments: str = ""
    completed_at: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "finished": self.finished,
            "junk": self.junk,
            "comments": self.comments,
            "completedAt": self.completed_at,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "Status":
        if not isinstance(payload, dict):
            raise InvalidStatus("status payload must be an object")
        finished = payload.get("finished", False)
        junk = payload.get("junk", False)
        comments = payload.get("comments", "")
        completed_at = payload.get("completedAt")
        if not isinstance(finished, bool) or not isinstance(junk, bool):
            raise InvalidStatus("finished/junk must be booleans")
        if not isinstance(comments, str):
            raise InvalidStatus("comments must be a string")
        if completed_at is not None and not isinstance(completed_at, str):
            raise InvalidStatus("completedAt must be a string timestamp")
        return cls(finished=finished, junk=junk, comments=comments, completed_at=completed_at)


@dataclass
class PrepopulateResult:
    applied: List[str] = field(default_factory=list)
    failures: List[Tuple[str, str]] = field(default_factory=list)


@dataclass(frozen=True)
class SaveResult:
    """What a save committed: the canonical set and its new revision."""

    revision: int
    annotations: Tuple[Annotation, ...]
    relations: Tuple[RelationGroup, ...]


class ProjectStore:
    def __init__(self, root: Path, create: bool = True) -> None:
        self.root = Path(root)
        if create:
            self.root.mkdir(parents=True, exist_ok=True)
        elif not self.root.is_dir():
            raise FileNotFoundError(f"project root {self.root} does not exist")
        if not (self.root / _CONFIG_NAME).exists():
            _atomic_write_bytes(self.root / _CONFIG_NAME, _dump_json({"labels": [], "relations": []}))
        self._locks: Dict[Tuple[str, str], threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # ------------------------------------------------------------------
    # configuration

    def _load_config(self) -> dict:
        try:
            payload = json.loads((self.root / _CONFIG_NAME).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationFailed([Violation("project-config", f"unreadable project config: {exc}")])
        if not isinstance(payload, dict):
            raise ValidationFailed([Violation("project-config", "project config must be an object")])
        return payload

    @property
    def schema(self) -> LabelSchema:
        return LabelSchema.from_dict(self._load_config())

    def save_schema(self, schema: LabelSchema) -> None:
        config = self._load_config()
        config.update(schema.to_dict())
        _atomic_write_bytes(self.root / _CONFIG_NAME, _dump_json(config))

    @property
    def snap_padding(self) -> float:
        value = self._load_config().get("snap_padding", 3.0)
        if not isinstance(value, (int, float)) or isinstance(value, bool) or value < 0:
            raise ValidationFailed([Violation("project-config", "snap_padding must be a non-negative number")])
        return float(value)

    # ------------------------------------------------------------------
    # documents

    def _doc_dir(self, doc: str) -> Path:
        return self.root / doc

    def _require_document(self, doc: str) -> Path:
        path = self._doc_dir(doc)
        if not _HASH_RE.match(doc or "") or not (path / _PDF_NAME).exists():
            raise UnknownDocument([doc])
        return path

    def add_document(self, pdf_bytes: bytes, layouts: Optional[Sequence[PageTokenLayout]] = None) -> str:
        """Register a PDF, extracting its token layout unless one is given.

        Re-adding the same bytes is a no-op and returns the same hash.
        """
        if not isinstance(pdf_bytes, (bytes, bytearray)):
            raise MalformedPdf("PDF content must be bytes")
        doc = hashlib.sha256(pdf_bytes).hexdigest()
        doc_dir = self._doc_dir(doc)
        structure = doc_dir / _STRUCTURE_NAME
        if (doc_dir / _PDF_NAME).exists() and structure.exists():
            return doc
        if layouts is None:
            layouts = extract_token_layout(bytes(pdf_bytes))
        doc_dir.mkdir(parents=True, exist_ok=True)
        (doc_dir / _STATUS_DIR).mkdir(exist_ok=True)
        _atomic_write_bytes(doc_dir / _PDF_NAME, bytes(pdf_bytes))
        _atomic_write_bytes(structure, dump_layout(layouts).encode("utf-8"))
        return doc

    def list_documents(self) -> List[str]:
        out = []
        for entry in sorted(self.root.iterdir()):
            if entry.is_dir() and _HASH_RE.match(entry.name) and (entry / _PDF_NAME).exists():
                out.append(entry.name)
        return out

    def load_pdf_bytes(self, doc: str) -> bytes:
        return (self._require_document(doc) / _PDF_NAME).read_bytes()

    def load_structure(self, doc: str) -> List[PageTokenLayout]:
        path = self._require_document(doc) / _STRUCTURE_NAME
        return load_layout(path.read_text(encoding="utf-8"))

    # ------------------------------------------------------------------
    # assignment and status

    def assign(self, annotator: str, docs: Iterable[str]) -> Set[str]:
        validate_identity(annotator)
        wanted = list(docs)
        missing = [d for d in wanted if not (_HASH_RE.match(d or "") and (self._doc_dir(d) / _PDF_NAME).exists())]
        if missing:
            raise UnknownDocument(missing)
        for doc in wanted:
            status_dir = self._doc_dir(doc) / _STATUS_DIR
            status_dir.mkdir(exist_ok=True)
            marker = status_dir / f"{annotator}.json"
            if not marker.exists():
                _atomic_write_bytes(marker, _dump_json(Status().to_dict()))
        return self.assignments(annotator)

    def assignments(self, annotator: str) -> Set[str]:
        out = set()
        for doc in self.list_documents():
            if (self._doc_dir(doc) / _STATUS_DIR / f"{annotator}.json").exists():
                out.add(doc)
        return out

    def is_assigned(self, annotator: str, doc: str) -> bool:
        self._require_document(doc)
        return (self._doc_dir(doc) / _STATUS_DIR / f"{annotator}.json").exists()

    def annotators(self, include_predictions: bool = False) -> List[str]:
        """Everyone who is assigned or has saved annotations somewhere."""
        names: Set[str] = set()
        for doc in self.list_documents():
            status_dir = self._doc_dir(doc) / _STATUS_DIR
            if status_dir.is_dir():
                for entry in status_dir.glob("*.json"):
                    names.add(entry.stem)
            for entry in self._doc_dir(doc).glob("*.json"):
                if entry.name in (_STRUCTURE_NAME, _REVISIONS_NAME):
                    continue
                names.add(entry.stem)
        if not include_predictions:
            names.discard(PREDICTIONS)
        return sorted(names)

    def get_status(self, annotator: str, doc: str) -> Status:
        self._require_document(doc)
        path = self._doc_dir(doc) / _STATUS_DIR / f"{annotator}.json"
        if not path.exists():
            raise NotAssigned(f"{annotator!r} is not assigned document {doc}")
        return Status.from_dict(json.loads(path.read_text(encoding="utf-8")))

    def set_status(self, annotator: str, doc: str, status: Status) -> Status:
        validate_identity(annotator)
        self._require_document(doc)
        path = self._doc_dir(doc) / _STATUS_DIR / f"{annotator}.json"
        if not path.exists():
            raise NotAssigned(f"{annotator!r} is not assigned document {doc}")
        if status.finished and status.junk:
            raise InvalidStatus("a document cannot be both finished and junk")
        if status.finished and status.completed_at is None:
            status = replace(status, completed_at=datetime.now(timezone.utc).isoformat())
        if not status.finished and status.completed_at is not None:
            status = replace(status, completed_at=None)
        with self._lock(annotator, doc):
            _atomic_write_bytes(path, _dump_json(status.to_dict()))
        return status

    def progress(self) -> Dict[str, Dict[str, int]]:
        """Per-annotator counts of assigned/finished/junk/in-progress."""
        out: Dict[str, Dict[str, int]] = {}
        for doc in self.list_documents():
            status_dir = self._doc_dir(doc) / _STATUS_DIR
            if not status_dir.is_dir():
                continue
            for entry in sorted(status_dir.glob("*.json")):
                name = entry.stem
                try:
                    status = Status.from_dict(json.loads(entry.read_text(encoding="utf-8")))
                except (OSError, json.JSONDecodeError, InvalidStatus):
                    status = Status()
                counts = out.setdefault(
                    name, {"assigned": 0, "finished": 0, "junk": 0, "in_progress": 0}
                )
                counts["assigned"] += 1
                if status.finished:
                    counts["finished"] += 1
                elif status.junk:
                    counts["junk"] += 1
                else:
                    counts["in_progress"] += 1
        return out

    # ------------------------------------------------------------------
    # annotations

    def _annotation_path(self, annotator: str, doc: str) -> Path:
        return self._doc_dir(doc) / f"{annotator}.json"

    def saved_documents(self, annotator: str) -> Set[str]:
        return {
            doc for doc in self.list_documents() if self._annotation_path(annotator, doc).exists()
        }

    def load_saved(self, annotator: str, doc: str) -> Tuple[List[Annotation], List[RelationGroup]]:
        """The annotator's own saved set, without the predictions fallback."""
        self._require_document(doc)
        path = self._annotation_path(annotator, doc)
        if not path.exists():
            return [], []
        return parse_annotation_set(json.loads(path.read_text(encoding="utf-8")))

    def load_annotations(self, annotator: str, doc: str) -> Tuple[List[Annotation], List[RelationGroup]]:
        """What the annotator should see: their saved work, else any
        pre-populated predictions, else an empty set."""
        validate_identity(annotator)
        if not self.is_assigned(annotator, doc):
            raise NotAssigned(f"{annotator!r} is not assigned document {doc}")
        if self._annotation_path(annotator, doc).exists():
            return self.load_saved(annotator, doc)
        predictions = self._annotation_path(PREDICTIONS, doc)
        if predictions.exists():
            return parse_annotation_set(json.loads(predictions.read_text(encoding="utf-8")))
        return [], []

    def revision(self, annotator: str, doc: str) -> int:
        self._require_document(doc)
        path = self._doc_dir(doc) / _REVISIONS_NAME
        if not path.exists():
            return 0
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            return 0
        value = payload.get(annotator, 0) if isinstance(payload, dict) else 0
        return value if isinstance(value, int) and value >= 0 else 0

    def save_annotations(
        self,
        annotator: str,
        doc: str,
        annotations: Sequence[Annotation],
        relations: Sequence[RelationGroup],
    ) -> SaveResult:
        """Validate, canonicalize and persist a full annotation set."""
        validate_identity(annotator)
        if not self.is_assigned(annotator, doc):
            raise NotAssigned(f"{annotator!r} is not assigned document {doc}")
        return self._write_annotations(annotator, doc, annotations, relations)

    def _write_annotations(
        self,
        annotator: str,
        doc: str,
        annotations: Sequence[Annotation],
        relations: Sequence[RelationGroup],
    ) -> SaveResult:
        layouts = self.load_structure(doc)
        padding = self.snap_padding
        canonical = canonicalize_annotations(annotations, layouts, padding)
        violations = validate_annotation_set(canonical, relations, layouts, self.schema, padding)
        if violations:
            raise ValidationFailed(violations)
        payload = _dump_json(annotation_set_to_jsonable(canonical, relations))
        with self._lock(annotator, doc):
            _atomic_write_bytes(self._annotation_path(annotator, doc), payload)
            revision = self._bump_revision(annotator, doc)
        return SaveResult(revision=revision, annotations=tuple(canonical), relations=tuple(relations))

    def _bump_revision(self, annotator: str, doc: str) -> int:
        with self._lock("", doc):  # one revision file per document
            path = self._doc_dir(doc) / _REVISIONS_NAME
            payload: Dict[str, int] = {}
            if path.exists():
                try:
                    loaded = json.loads(path.read_text(encoding="utf-8"))
                    if isinstance(loaded, dict):
                        payload = {k: v for k, v in loaded.items() if isinstance(v, int)}
                except (OSError, json.JSONDecodeError):
                    payload = {}
            revision = payload.get(annotator, 0) + 1
            payload[annotator] = revision
            _atomic_write_bytes(path, _dump_json(payload))
        return revision

    # ------------------------------------------------------------------
    # predictions

    def prepopulate(self, payload: dict) -> PrepopulateResult:
        """Load model predictions as the ``__predictions__`` annotator.

        ``payload`` maps document hashes to annotation-set payloads.  Failing
        documents are reported without blocking the rest.
        """
        if not isinstance(payload, dict):
            raise ValidationFailed([Violation("malformed-payload", "predictions payload must be an object")])
        result = PrepopulateResult()
        schema = self.schema
        for doc in sorted(payload):
            entry = payload[doc]
            try:
                self._require_document(doc)
            except UnknownDocument:
                result.failures.append((doc, "unknown document"))
                continue
            try:
                annotations, relations = parse_annotation_set(entry)
                annotations = self._resolve_predictions(doc, annotations, schema)
                self._write_annotations(PREDICTIONS, doc, annotations, relations)
            except ValidationFailed as exc:
                result.failures.append((doc, str(exc)))
                continue
            result.applied.append(doc)
        return result

    def _resolve_predictions(
        self, doc: str, annotations: Sequence[Annotation], schema: LabelSchema
    ) -> List[Annotation]:
        """Snap bounds-only predictions of textual labels onto tokens."""
        layouts = self.load_structure(doc)
        out: List[Annotation] = []
        for ann in annotations:
            if (
                ann.tokens is None
                and not schema.is_freeform(ann.label)
                and 0 <= ann.page < len(layouts)
            ):
                hits = select_tokens(layouts[ann.page], ann.bounds)
                if hits:
                    refs = tuple(TokenRef(ann.page, i) for i in hits)
                    ann = replace(ann, tokens=refs)
            out.append(ann)
        return out

    # ------------------------------------------------------------------

    def _lock(self, annotator: str, doc: str) -> threading.Lock:
        key = (annotator, doc)
        with self._locks_guard:
            lock = self._locks.get(key)
            if lock is None:
                lock = self._locks[key] = threading.Lock()
            return lock
