import pytest
from fastapi.testclient import TestClient

from helpers import hello_world_pdf, make_project, textual_annotation
from pdfannot.annotations import Annotation, TokenRef
from pdfannot.geometry import Bounds
from pdfannot.service import DEVELOPMENT_IDENTITY, create_app
from pdfannot.store import ProjectStore


@pytest.fixture
def project(tmp_path):
    store, (doc,) = make_project(tmp_path / "proj", documents=[hello_world_pdf()])
    store.assign("alice", [doc])
    return store, doc


@pytest.fixture
def client(project):
    store, _ = project
    return TestClient(create_app(store.root))


def as_alice(path_client, method, url, **kwargs):
    kwargs.setdefault("headers", {})["X-Annotator"] = "alice"
    return getattr(path_client, method)(url, **kwargs)


def sloppy_payload(store: ProjectStore, doc: str) -> dict:
    """A textual annotation whose bounds have not been snapped."""
    ann = Annotation(
        "a-1", 0, "Title", Bounds(60.0, 70.0, 160.0, 110.0), tokens=(TokenRef(0, 0), TokenRef(0, 1))
    )
    return {"annotations": [ann.to_dict()], "relations": []}


def canonical_bounds(store: ProjectStore, doc: str) -> dict:
    layout = store.load_structure(doc)[0]
    return textual_annotation(layout, [0, 1], ann_id="a-1", label="Title").bounds.to_dict()


class TestIdentity:
    def test_development_fallback(self, client):
        response = client.get("/api/config/labels")
        assert response.status_code == 200
        assert [l["text"] for l in response.json()["labels"]] == ["Title", "Body", "Figure"]

    def test_development_identity_is_a_real_user(self, project):
        store, doc = project
        store.assign(DEVELOPMENT_IDENTITY, [doc])
        client = TestClient(create_app(store.root))
        response = client.get(f"/api/doc/{doc}/annotations")
        assert response.status_code == 200

    def test_production_requires_header(self, project):
        store, doc = project
        client = TestClient(create_app(store.root, default_identity=None))
        response = client.get("/api/docs")
        assert response.status_code == 401
        assert response.json()["code"] == "missing-identity"
        assert as_alice(client, "get", "/api/docs").status_code == 200

    def test_blank_header_counts_as_missing(self, project):
        store, _ = project
        client = TestClient(create_app(store.root, default_identity=None))
        response = client.get("/api/docs", headers={"X-Annotator": "   "})
        assert response.status_code == 401

    def test_invalid_identity(self, client):
        response = client.get("/api/docs", headers={"X-Annotator": "no/slash allowed"})
        assert response.status_code == 400
        assert response.json()["code"] == "invalid-identity"

    def test_reserved_identity_rejected(self, client):
        response = client.get("/api/docs", headers={"X-Annotator": "__predictions__"})
        assert response.status_code == 400

    def test_custom_header_name(self, project):
        store, _ = project
        client = TestClient(create_app(store.root, header_name="X-User", default_identity=None))
        assert client.get("/api/docs").status_code == 401
        assert client.get("/api/docs", headers={"X-User": "alice"}).status_code == 200


class TestDocumentEndpoints:
    def test_listing_with_assignment_state(self, client, project):
        _, doc = project
        body = as_alice(client, "get", "/api/docs").json()
        (entry,) = body["documents"]
        assert entry["id"] == doc
        assert entry["pages"] == 1
        assert entry["assigned"] is True
        assert entry["status"]["finished"] is False

        other = client.get("/api/docs", headers={"X-Annotator": "bob"}).json()
        (entry,) = other["documents"]
        assert entry["assigned"] is False
        assert entry["status"] is None

    def test_pdf_round_trip(self, client, project):
        _, doc = project
        response = as_alice(client, "get", f"/api/doc/{doc}/pdf")
        assert response.status_code == 200
        assert response.headers["content-type"] == "application/pdf"
        assert response.content == hello_world_pdf()

    def test_tokens_endpoint(self, client, project):
        _, doc = project
        (page,) = as_alice(client, "get", f"/api/doc/{doc}/tokens").json()
        assert page["page"]["width"] == 612.0
        assert [t["text"] for t in page["tokens"]] == ["Hello", "World"]

    def test_unknown_document_is_404(self, client):
        response = as_alice(client, "get", f"/api/doc/{'0' * 64}/tokens")
        assert response.status_code == 404
        assert response.json()["code"] == "unknown-document"

    def test_unassigned_access_is_403(self, client, project):
        _, doc = project
        response = client.get(f"/api/doc/{doc}/pdf", headers={"X-Annotator": "bob"})
        assert response.status_code == 403
        assert response.json()["code"] == "not-assigned"


class TestAnnotationEndpoints:
    def test_fresh_document_is_empty_at_revision_zero(self, client, project):
        _, doc = project
        body = as_alice(client, "get", f"/api/doc/{doc}/annotations").json()
        assert body == {"annotations": [], "relations": [], "revision": 0}

    def test_post_canonicalizes_and_get_echoes(self, client, project):
        store, doc = project
        posted = as_alice(
            client, "post", f"/api/doc/{doc}/annotations", json=sloppy_payload(store, doc)
        )
        assert posted.status_code == 200
        body = posted.json()
        assert body["revision"] == 1
        assert body["annotations"][0]["bounds"] == canonical_bounds(store, doc)

        fetched = as_alice(client, "get", f"/api/doc/{doc}/annotations").json()
        assert fetched == body

    def test_revision_increments_per_save(self, client, project):
        store, doc = project
        payload = sloppy_payload(store, doc)
        assert as_alice(client, "post", f"/api/doc/{doc}/annotations", json=payload).json()["revision"] == 1
        assert as_alice(client, "post", f"/api/doc/{doc}/annotations", json=payload).json()["revision"] == 2

    def test_relations_round_trip(self, client, project):
        store, doc = project
        layout = store.load_structure(doc)[0]
        a = textual_annotation(layout, [0], ann_id="a-1", label="Title")
        b = textual_annotation(layout, [1], ann_id="a-2", label="Body")
        payload = {
            "annotations": [a.to_dict(), b.to_dict()],
            "relations": [{"id": "r-1", "label": "Linked", "targetIds": ["a-1", "a-2"]}],
        }
        body = as_alice(client, "post", f"/api/doc/{doc}/annotations", json=payload).json()
        assert body["relations"] == payload["relations"]

    def test_validation_failure_names_violations(self, client, project):
        store, doc = project
        layout = store.load_structure(doc)[0]
        bad = textual_annotation(layout, [0], ann_id="a-1", label="Nope")
        response = as_alice(
            client,
            "post",
            f"/api/doc/{doc}/annotations",
            json={"annotations": [bad.to_dict()], "relations": []},
        )
        assert response.status_code == 422
        body = response.json()
        assert body["code"] == "validation-failed"
        assert body["violations"][0]["code"] == "unknown-label"
        assert body["violations"][0]["subjectId"] == "a-1"

    def test_malformed_json_body(self, client, project):
        _, doc = project
        response = client.post(
            f"/api/doc/{doc}/annotations",
            content=b"{not json",
            headers={"X-Annotator": "alice", "Content-Type": "application/json"},
        )
        assert response.status_code == 422
        assert response.json()["violations"][0]["code"] == "malformed-payload"

    def test_malformed_payload_shape(self, client, project):
        _, doc = project
        response = as_alice(
            client, "post", f"/api/doc/{doc}/annotations", json={"annotations": "nope"}
        )
        assert response.status_code == 422

    def test_post_requires_assignment(self, client, project):
        _, doc = project
        response = client.post(
            f"/api/doc/{doc}/annotations",
            json={"annotations": [], "relations": []},
            headers={"X-Annotator": "bob"},
        )
        assert response.status_code == 403

    def test_predictions_fallback_until_first_save(self, client, project):
        store, doc = project
        layout = store.load_structure(doc)[0]
        pred = textual_annotation(layout, [1], ann_id="p-1", label="Body")
        store.prepopulate({doc: {"annotations": [pred.to_dict()], "relations": []}})

        body = as_alice(client, "get", f"/api/doc/{doc}/annotations").json()
        assert [a["id"] for a in body["annotations"]] == ["p-1"]
        assert body["revision"] == 0

        as_alice(client, "post", f"/api/doc/{doc}/annotations", json={"annotations": [], "relations": []})
        body = as_alice(client, "get", f"/api/doc/{doc}/annotations").json()
        assert body["annotations"] == []
        assert body["revision"] == 1


class TestStatusEndpoints:
    def test_get_and_set(self, client, project):
        _, doc = project
        assert as_alice(client, "get", f"/api/doc/{doc}/status").json()["finished"] is False
        body = as_alice(
            client,
            "post",
            f"/api/doc/{doc}/status",
            json={"finished": True, "junk": False, "comments": "done"},
        ).json()
        assert body["finished"] is True
        assert body["completedAt"] is not None
        assert as_alice(client, "get", f"/api/doc/{doc}/status").json() == body

    def test_finished_junk_conflict(self, client, project):
        _, doc = project
        response = as_alice(
            client, "post", f"/api/doc/{doc}/status", json={"finished": True, "junk": True}
        )
        assert response.status_code == 422
        assert response.json()["code"] == "invalid-status"

    def test_bad_status_payload(self, client, project):
        _, doc = project
        response = as_alice(client, "post", f"/api/doc/{doc}/status", json={"finished": "yes"})
        assert response.status_code == 422

    def test_status_requires_assignment(self, client, project):
        _, doc = project
        response = client.get(f"/api/doc/{doc}/status", headers={"X-Annotator": "bob"})
        assert response.status_code == 403


class TestStaticServing:
    def test_banner_without_ui_build(self, client):
        body = client.get("/").json()
        assert body["api"] == "/api"

    def test_static_directory_is_mounted(self, project, tmp_path):
        store, _ = project
        ui = tmp_path / "ui"
        ui.mkdir()
        (ui / "index.html").write_text("<!doctype html><title>annotator</title>")
        client = TestClient(create_app(store.root, static_dir=ui))
        response = client.get("/")
        assert response.status_code == 200
        assert "annotator" in response.text
        # API routes still take precedence over the static mount
        assert client.get("/api/config/labels").status_code == 200
