from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from adr import scenarios
from adr.server import build_app


@pytest.fixture
def failover_client():
    return TestClient(build_app(scenarios.build_failover_workspace()))


@pytest.fixture
def travel_client():
    return TestClient(build_app(scenarios.build_travel_workspace()))


def _revision(client, sid):
    return client.get(f"/systems/{sid}/graph").json()["revision"]


class TestReads:
    def test_workspace_document(self, failover_client):
        doc = failover_client.get("/workspace").json()
        assert doc["format"] == "adr-workspace"
        assert "cluster" in doc["systems"]
        assert doc["revisions"] == {"cluster": 0}

    def test_graph_after_init(self, travel_client):
        body = travel_client.get("/systems/trip/graph").json()
        assert body["revision"] == 0
        edges = body["graph"]["edges"]
        assert len(edges) == 1 and edges[0]["tau"] == "Fl"

    def test_forest_view(self, failover_client):
        body = failover_client.get("/systems/cluster/forest").json()
        vertices = body["forest"]["vertices"]
        assert any(v["production"] == "badServer" for v in vertices)
        assert all(set(v) >= {"id", "children", "label", "leaf"} for v in vertices)

    def test_dot_exports(self, failover_client):
        text = failover_client.get("/systems/cluster/graph.dot").text
        assert text.startswith("graph design {") and "peripheries=2" in text
        text = failover_client.get("/systems/cluster/forest.dot").text
        assert text.startswith("graph forest {")

    def test_unknown_system_404(self, failover_client):
        assert failover_client.get("/systems/nope/graph").status_code == 404


class TestApplyProduction:
    def test_booking_chain_over_http(self, travel_client):
        g = travel_client.get("/systems/trip/graph").json()["graph"]
        edge = g["edges"][0]["id"]
        r = travel_client.post("/systems/trip/productions/bookF/apply",
                               json={"revision": 0, "edge": edge})
        assert r.status_code == 200
        body = r.json()
        assert body["revision"] == 1
        taus = sorted(e["tau"] for e in body["graph"]["edges"])
        assert taus == ["Client", "Fl"]

    def test_stale_revision_conflict(self, travel_client):
        g = travel_client.get("/systems/trip/graph").json()["graph"]
        edge = g["edges"][0]["id"]
        r = travel_client.post("/systems/trip/productions/bookF/apply",
                               json={"revision": 41, "edge": edge})
        assert r.status_code == 409

    def test_unknown_production_404(self, travel_client):
        r = travel_client.post("/systems/trip/productions/nope/apply",
                               json={"revision": 0, "edge": 0})
        assert r.status_code == 404

    def test_revision_increases_monotonically(self, travel_client):
        for expected in (0, 1):
            g = travel_client.get("/systems/trip/graph").json()
            assert g["revision"] == expected
            match = next(e for e in g["graph"]["edges"] if e["tau"] == "Fl")
            r = travel_client.post("/systems/trip/productions/brF/apply",
                                   json={"revision": expected, "edge": match["id"]})
            assert r.status_code == 200


class TestRules:
    def test_matches_and_apply(self, travel_client):
        # grow the worked scenario over the API, then move the client
        rev = 0
        for prod in ("brF", "bookF", "addC"):
            g = travel_client.get("/systems/trip/graph").json()["graph"]
            want = {"brF": "Fl", "bookF": "Fl", "addC": "Client"}[prod]
            if prod == "bookF":
                name_by_edge = {e["id"]: e["name"] for e in g["edges"]}
                edge = next(e["id"] for e in g["edges"]
                            if e["tau"] == want and name_by_edge[e["id"]] == "f2")
            else:
                edge = next(e["id"] for e in g["edges"] if e["tau"] == want)
            r = travel_client.post(f"/systems/trip/productions/{prod}/apply",
                                   json={"revision": rev, "edge": edge})
            assert r.status_code == 200
            rev = r.json()["revision"]

        matches = travel_client.post("/systems/trip/rules/cf/matches", json={}).json()
        assert len(matches["matches"]) == 1
        root = matches["matches"][0]
        r = travel_client.post("/systems/trip/rules/cf/apply",
                               json={"revision": rev, "root": root})
        assert r.status_code == 200
        taus = sorted(e["tau"] for e in r.json()["graph"]["edges"])
        assert taus == ["Client", "Client", "Fl", "Fl"]

    def test_stale_rule_root_conflicts(self, travel_client):
        r = travel_client.post("/systems/trip/rules/cf/apply",
                               json={"revision": 0, "root": 123456})
        assert r.status_code == 409


class TestRecovery:
    def start(self, client, invariant=None):
        body = {"revision": _revision(client, "cluster")}
        if invariant:
            body["invariant"] = invariant
        return client.post("/systems/cluster/recovery/start", json=body)

    def test_start_reports_violation_with_witness(self, failover_client):
        r = self.start(failover_client)
        assert r.status_code == 200
        payload = r.json()
        assert payload["state"] == "violated"
        assert payload["violation"] is not None
        assert payload["marked_edges"]  # the console highlights these

    def test_candidates_listing(self, failover_client):
        self.start(failover_client)
        r = failover_client.get("/systems/cluster/recovery/candidates")
        body = r.json()
        assert body["state"] == "awaiting-production-choice"
        assert any(c["production"] == "goodServer" for c in body["candidates"])

    def test_accept_decision_recovers_and_bumps_revision(self, failover_client):
        self.start(failover_client)
        cands = failover_client.get("/systems/cluster/recovery/candidates").json()
        chosen = cands["candidates"][0]
        r = failover_client.post("/systems/cluster/recovery/decision",
                                 json={"revision": 0, "kind": "accept",
                                       "production": chosen["production"],
                                       "edge": chosen["edge"]})
        assert r.status_code == 200
        payload = r.json()
        assert payload["state"] == "recovered"
        assert payload["revision"] == 1
        graph = failover_client.get("/systems/cluster/graph").json()["graph"]
        assert sorted(e["tau"] for e in graph["edges"]) == ["C", "S"]

    def test_decision_without_session_404(self, failover_client):
        r = failover_client.post("/systems/cluster/recovery/decision",
                                 json={"revision": 0, "kind": "abandon"})
        assert r.status_code == 404

    def test_decision_in_wrong_state_conflicts(self, failover_client):
        self.start(failover_client, invariant="top")  # immediately recovered
        r = failover_client.post("/systems/cluster/recovery/decision",
                                 json={"revision": 0, "kind": "accept",
                                       "production": "goodServer", "edge": 1})
        assert r.status_code == 409

    def test_bad_invariant_rejected(self, failover_client):
        r = self.start(failover_client, invariant="forall Nope(x). top")
        assert r.status_code == 400

    def test_get_session_payload(self, failover_client):
        assert failover_client.get("/systems/cluster/recovery").status_code == 404
        self.start(failover_client)
        payload = failover_client.get("/systems/cluster/recovery").json()
        assert payload["state"] == "violated"
        assert payload["invariant"].startswith("forall C")
