"""HTTP API over a project store.

Identity comes from a configurable request header.  In development mode a
missing header falls back to a default identity; in production it is a 401.
Domain errors map onto structured JSON bodies with stable ``code`` values.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .annotations import parse_annotation_set
from .errors import DomainError, NotAssigned, ValidationFailed
from .store import ProjectStore, Status, validate_identity
from .tokens import layout_to_jsonable

DEFAULT_IDENTITY_HEADER = "X-Annotator"
DEVELOPMENT_IDENTITY = "development_user"

_HTTP_STATUS = {
    "missing-identity": 401,
    "invalid-identity": 400,
    "unknown-document": 404,
    "not-assigned": 403,
    "validation-failed": 422,
    "invalid-status": 422,
    "invalid-layout": 500,
    "malformed-pdf": 500,
}


class MissingIdentity(DomainError):
    code = "missing-identity"


def create_app(
    root: Path,
    header_name: str = DEFAULT_IDENTITY_HEADER,
    default_identity: Optional[str] = DEVELOPMENT_IDENTITY,
    static_dir: Optional[Path] = None,
) -> FastAPI:
    """Build the service over the project at ``root``.

    ``default_identity=None`` selects production behaviour: requests
    without the identity header are rejected.
    """
    store = ProjectStore(root)
    app = FastAPI(title="PDF annotation service", docs_url=None, redoc_url=None)
    app.state.store = store

    def identity(request: Request) -> str:
        raw = request.headers.get(header_name)
        if raw is None or raw.strip() == "":
            if default_identity is None:
                raise MissingIdentity(f"request carries no {header_name} header")
            raw = default_identity
        return validate_identity(raw.strip())

    @app.exception_handler(DomainError)
    async def _domain_error(_request: Request, exc: DomainError) -> JSONResponse:
        body = {"code": exc.code, "message": str(exc)}
        if isinstance(exc, ValidationFailed):
            body["violations"] = [v.to_dict() for v in exc.violations]
        return JSONResponse(status_code=_HTTP_STATUS.get(exc.code, 400), content=body)

    async def _json_body(request: Request) -> dict:
        try:
            return json.loads(await request.body())
        except json.JSONDecodeError as exc:
            from .annotations import Violation

            raise ValidationFailed([Violation("malformed-payload", f"request body is not valid JSON: {exc}")])

    # ------------------------------------------------------------------

    @app.get("/api/docs")
    async def list_documents(request: Request):
        caller = identity(request)
        out = []
        for doc in store.list_documents():
            assigned = store.is_assigned(caller, doc)
            entry = {
                "id": doc,
                "pages": len(store.load_structure(doc)),
                "assigned": assigned,
                "status": store.get_status(caller, doc).to_dict() if assigned else None,
            }
            out.append(entry)
        return {"documents": out}

    @app.get("/api/config/labels")
    async def get_labels(request: Request):
        identity(request)
        return store.schema.to_dict()

    @app.get("/api/doc/{doc}/pdf")
    async def get_pdf(doc: str, request: Request):
        caller = identity(request)
        _require_assigned(store, caller, doc)
        return Response(content=store.load_pdf_bytes(doc), media_type="application/pdf")

    @app.get("/api/doc/{doc}/tokens")
    async def get_tokens(doc: str, request: Request):
        caller = identity(request)
        _require_assigned(store, caller, doc)
        return layout_to_jsonable(store.load_structure(doc))

    @app.get("/api/doc/{doc}/annotations")
    async def get_annotations(doc: str, request: Request):
        caller = identity(request)
        annotations, relations = store.load_annotations(caller, doc)
        return {
            "annotations": [a.to_dict() for a in annotations],
            "relations": [r.to_dict() for r in relations],
            "revision": store.revision(caller, doc),
        }

    @app.post("/api/doc/{doc}/annotations")
    async def post_annotations(doc: str, request: Request):
        caller = identity(request)
        annotations, relations = parse_annotation_set(await _json_body(request))
        result = store.save_annotations(caller, doc, annotations, relations)
        return {
            "annotations": [a.to_dict() for a in result.annotations],
            "relations": [r.to_dict() for r in result.relations],
            "revision": result.revision,
        }

    @app.get("/api/doc/{doc}/status")
    async def get_status(doc: str, request: Request):
        caller = identity(request)
        return store.get_status(caller, doc).to_dict()

    @app.post("/api/doc/{doc}/status")
    async def post_status(doc: str, request: Request):
        caller = identity(request)
        status = Status.from_dict(await _json_body(request))
        return store.set_status(caller, doc, status).to_dict()

    # ------------------------------------------------------------------

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    else:

        @app.get("/")
        async def index():
            return {"service": "pdf-annotation", "api": "/api"}

    return app


def _require_assigned(store: ProjectStore, annotator: str, doc: str) -> None:
    if not store.is_assigned(annotator, doc):
        raise NotAssigned(f"{annotator!r} is not assigned document {doc}")
