"""HTTP service contract: endpoints, error codes, CLI equivalence."""

import json

import pytest
from fastapi.testclient import TestClient

from heartcast.cli import execute
from heartcast.service import create_app

from conftest import fixture_path, load_fixture


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(), raise_server_exceptions=False)


class TestHealth:
    def test_healthz(self, client):
        response = client.get("/healthz")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}

    def test_unknown_route_404(self, client):
        assert client.get("/api/v1/nope").status_code == 404


class TestForecastEndpoint:
    def test_empty_body_rejected(self, client):
        response = client.post("/api/v1/forecast", json={})
        assert response.status_code == 400
        assert response.json()["code"] == "invalid_scenario"

    def test_malformed_json_rejected(self, client):
        response = client.post(
            "/api/v1/forecast", content=b"{oops", headers={"content-type": "application/json"}
        )
        assert response.status_code == 400
        assert response.json()["code"] == "invalid_scenario"

    def test_field_path_reported(self, client):
        scenario = load_fixture("location_b.json")
        scenario["user"]["tau_single"] = -1
        response = client.post("/api/v1/forecast", json=scenario)
        assert response.status_code == 400
        assert response.json()["code"] == "invalid_scenario"

    def test_insufficient_data_422_with_log(self, client):
        scenario = load_fixture("location_b.json")
        scenario["groups"][0]["population"]["n"] = 20
        scenario["groups"][0]["population"]["mean"] = [0.05, 0.05, 0.05, 0.05]
        scenario["user"]["window"]["halfwidths"] = [0.01] * 4
        response = client.post("/api/v1/forecast", json=scenario)
        assert response.status_code == 422
        body = response.json()
        assert body["code"] == "insufficient_data"
        assert len(body["relaxation_log"]) > 0

    def test_oversized_body_rejected(self, client):
        blob = {"schema_version": 1, "pad": "x" * (1 << 20)}
        response = client.post("/api/v1/forecast", json=blob)
        assert response.status_code == 413

    def test_matches_cli_bytes(self, client, tmp_path):
        scenario = load_fixture("location_b.json")
        response = client.post("/api/v1/forecast", json=scenario)
        assert response.status_code == 200

        out = tmp_path / "cli.json"
        assert execute(
            ["forecast", "--scenario", fixture_path("location_b.json"), "--out", str(out)]
        ) == 0
        assert response.content == out.read_bytes()

    def test_identical_requests_identical_responses(self, client):
        scenario = load_fixture("location_a.json")
        a = client.post("/api/v1/forecast", json=scenario)
        b = client.post("/api/v1/forecast", json=scenario)
        assert a.content == b.content


class TestCompareEndpoint:
    def test_identical_scenarios_stable_tie(self, client, scenario_locations):
        a, _ = scenario_locations
        response = client.post("/api/v1/compare", json={"scenarios": [a, a]})
        assert response.status_code == 200
        body = response.json()
        assert body["ranking"] == [0, 1]
        assert body["reports"][0] == body["reports"][1]

    def test_location_pair_ranks_higher_value_first(self, client, scenario_locations):
        a, b = scenario_locations
        response = client.post("/api/v1/compare", json={"scenarios": [b, a]})
        assert response.status_code == 200
        body = response.json()
        best = [max(o["value"] for o in r["options"]) for r in body["reports"]]
        assert best[1] > best[0]
        assert body["ranking"] == [1, 0]
        # reports stay in input order
        assert body["reports"][0]["cumulative"]["total"][-1] < body["reports"][1]["cumulative"]["total"][-1]

    def test_invalid_scenario_names_index(self, client, scenario_locations):
        a, _ = scenario_locations
        response = client.post("/api/v1/compare", json={"scenarios": [a, {"schema_version": 1}]})
        assert response.status_code == 400
        body = response.json()
        assert body["field_path"].startswith("scenarios[1]")

    def test_too_many_scenarios_rejected(self, client, scenario_locations):
        a, _ = scenario_locations
        response = client.post("/api/v1/compare", json={"scenarios": [a] * 9})
        assert response.status_code == 400

    def test_empty_list_rejected(self, client):
        response = client.post("/api/v1/compare", json={"scenarios": []})
        assert response.status_code == 400
