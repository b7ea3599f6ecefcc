"""HTTP service: endpoint contracts, error shapes, read purity, model swap."""

import hashlib
import json

import pytest
from fastapi.testclient import TestClient

from qgauge.api import create_app
from qgauge.demo import DEMO_WINDOW_1, DEMO_WINDOW_2, INGEST_PLAN, fixture_text
from qgauge.engine import Engine
from qgauge.model import model_to_document, parse_model
from qgauge.store import Store


@pytest.fixture
def demo_engine(tmp_path):
    model = parse_model(fixture_text("model.json"))
    store = Store(tmp_path / "store", project="demo")
    engine = Engine(model, store, model_path=None)
    for format_name, fixture in INGEST_PLAN:
        engine.ingest(format_name, fixture_text(fixture))
    engine.assess(window=DEMO_WINDOW_1)
    engine.assess(window=DEMO_WINDOW_2)
    return engine


@pytest.fixture
def client(demo_engine):
    return TestClient(create_app(demo_engine))


def _store_checksums(store: Store) -> dict:
    return {
        p.name: hashlib.sha256(p.read_bytes()).hexdigest()
        for p in store.file_paths()
        if p.exists()
    }


class TestReads:
    def test_health(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json()["status"] == "ok"

    def test_current_snapshot(self, client):
        body = client.get("/assessment/current").json()
        assert body["entries"]["maintainability"]["color"] == "orange"
        assert body["entries"]["maintainability"]["value"] == pytest.approx(2 / 3, abs=1e-9)
        assert body["transient"] is False

    def test_history_two_points(self, client):
        body = client.get("/assessment/history", params={"element": "maintainability"}).json()
        assert len(body["points"]) == 2
        assert body["points"][0]["color"] == "green"
        assert body["points"][1]["color"] == "orange"

    def test_history_window_filter(self, client, demo_engine):
        latest = demo_engine.latest_snapshot()
        frm = latest.evaluated_at.isoformat()
        body = client.get(
            "/assessment/history", params={"element": "maintainability", "from": frm}
        ).json()
        assert len(body["points"]) == 1

    def test_history_unknown_element_404(self, client):
        response = client.get("/assessment/history", params={"element": "nope"})
        assert response.status_code == 404
        body = response.json()
        assert body["code"] == "unknown_element"
        assert body["status"] == 404

    def test_history_malformed_window_400(self, client):
        response = client.get(
            "/assessment/history", params={"element": "maintainability", "from": "not-a-date"}
        )
        assert response.status_code == 400
        assert response.json()["code"] == "bad_window"

    def test_drilldown_matches_library_serialization(self, client, demo_engine):
        from qgauge.alerts import drilldown, drilldown_to_doc

        response = client.get("/drilldown/maintainability")
        assert response.status_code == 200
        node = drilldown(demo_engine.latest_snapshot(), "maintainability", demo_engine.model)
        assert response.json() == json.loads(json.dumps(drilldown_to_doc(node)))

    def test_drilldown_unknown_404(self, client):
        assert client.get("/drilldown/nope").status_code == 404

    def test_alerts_listing(self, client):
        body = client.get("/alerts").json()
        element_ids = [a["element_id"] for a in body["alerts"]]
        assert "maintainability" in element_ids
        assert all(not a["acknowledged"] for a in body["alerts"])

    def test_alerts_pagination(self, client):
        first = client.get("/alerts", params={"limit": 1}).json()["alerts"]
        rest = client.get("/alerts", params={"limit": 1, "offset": 1}).json()["alerts"]
        assert len(first) == 1 and len(rest) == 1
        assert first[0]["alert_id"] != rest[0]["alert_id"]

    def test_model_document(self, client, demo_engine):
        body = client.get("/model").json()
        assert body == json.loads(json.dumps(model_to_document(demo_engine.model)))

    def test_read_sequence_leaves_store_untouched(self, client, demo_engine):
        before = _store_checksums(demo_engine.store)
        client.get("/health")
        client.get("/assessment/current")
        client.get("/assessment/history", params={"element": "maintainability"})
        client.get("/drilldown/maintainability")
        client.get("/alerts")
        client.get("/model")
        assert _store_checksums(demo_engine.store) == before


class TestWrites:
    def test_ingest_roundtrip_counts(self, client):
        response = client.post("/ingest/issues", content=fixture_text("issues.csv"))
        assert response.status_code == 200
        body = response.json()
        assert body["inserted"] == 0 and body["duplicates"] == 6

    def test_ingest_unknown_format_404(self, client):
        assert client.post("/ingest/sonar", content="{}").status_code == 404

    def test_ingest_unparseable_container_400(self, client):
        response = client.post("/ingest/testxml", content="<testsuites><broken")
        assert response.status_code == 400
        assert response.json()["code"] == "unparseable_input"

    def test_assess_trigger(self, client):
        response = client.post(
            "/assess",
            content=json.dumps(
                {"from": "2018-01-08T00:00:00Z", "to": "2018-01-15T00:00:00Z"}
            ),
        )
        assert response.status_code == 200
        assert response.json()["snapshot_id"]

    def test_whatif_transient_and_value_correct(self, client, demo_engine):
        before_current = client.get("/assessment/current").json()
        checksums = _store_checksums(demo_engine.store)
        delta = {
            "weights": {
                "blocking_code": {
                    "fulfillment_critical_blocker_rules": 0.8,
                    "highly_changed_files": 0.2,
                }
            },
            "from": "2018-01-08T00:00:00Z",
            "to": "2018-01-15T00:00:00Z",
        }
        response = client.post("/whatif", content=json.dumps(delta))
        assert response.status_code == 200
        body = response.json()
        assert body["transient"] is True
        expected_blocking = 0.8 * 0.2 + 0.2 * (2 / 3)
        assert body["entries"]["blocking_code"]["value"] == pytest.approx(
            expected_blocking, abs=1e-9
        )
        assert _store_checksums(demo_engine.store) == checksums
        assert client.get("/assessment/current").json() == before_current

    def test_whatif_invalid_weights_422(self, client):
        delta = {"weights": {"blocking_code": {"fulfillment_critical_blocker_rules": 0.9}}}
        response = client.post("/whatif", content=json.dumps(delta))
        assert response.status_code == 422
        assert "weights sum" in response.json()["detail"]

    def test_put_model_replaces_after_validation(self, client, demo_engine):
        doc = model_to_document(demo_engine.model)
        doc["aspects"][0]["name"] = "Maintainability (renamed)"
        response = client.request("PUT", "/model", content=json.dumps(doc))
        assert response.status_code == 200
        assert client.get("/model").json()["aspects"][0]["name"] == "Maintainability (renamed)"

    def test_put_model_bad_weights_422_with_violations(self, client, demo_engine):
        doc = model_to_document(demo_engine.model)
        for edge in doc["edges"]:
            if edge["parent"] == "blocking_code":
                edge["weight"] = 0.6
        response = client.request("PUT", "/model", content=json.dumps(doc))
        assert response.status_code == 422
        body = response.json()
        assert body["code"] == "invalid_model"
        assert any("weights sum 1.2" in v["message"] for v in body["violations"])

    def test_put_model_keeps_old_model_on_failure(self, client, demo_engine):
        before = model_to_document(demo_engine.model)
        doc = json.loads(json.dumps(before))
        for edge in doc["edges"]:
            edge["weight"] = 2.0
        client.request("PUT", "/model", content=json.dumps(doc))
        assert client.get("/model").json() == json.loads(json.dumps(before))

    def test_assess_conflict_while_running(self, client, demo_engine):
        # hold the single-flight lock to simulate an active run
        assert demo_engine._assess_flight.acquire(blocking=False)
        try:
            response = client.post("/assess", content="")
            assert response.status_code == 409
            assert response.json()["code"] == "assessment_running"
        finally:
            demo_engine._assess_flight.release()

    def test_alert_ack_endpoint(self, client):
        alerts = client.get("/alerts").json()["alerts"]
        alert_id = alerts[0]["alert_id"]
        response = client.post(f"/alerts/{alert_id}/ack")
        assert response.status_code == 200
        refreshed = client.get("/alerts").json()["alerts"]
        assert any(a["alert_id"] == alert_id and a["acknowledged"] for a in refreshed)

    def test_alert_ack_unknown_404(self, client):
        assert client.post("/alerts/zzz/ack").status_code == 404


class TestErrorShape:
    def test_route_not_found_carries_api_error_shape(self, client):
        body = client.get("/nope").json()
        assert set(body) >= {"status", "code", "detail"}
        assert body["status"] == 404
