from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from conftest import scenario_doc
from evitrack.scenario import SchemaError
from evitrack.service import ServiceConfig, create_app, load_config


@pytest.fixture
def client() -> TestClient:
    return TestClient(create_app(), raise_server_exceptions=False)


@pytest.fixture
def seeded(client: TestClient):
    """Client with the default two-report scenario posted."""
    resp = client.post("/scenarios", json=scenario_doc())
    assert resp.status_code == 201
    return client, resp.json()["token"]


# ---------------------------------------------------------------------------
# Scenario lifecycle


def test_create_and_fetch(seeded):
    client, token = seeded
    resp = client.get("/scenarios/s1")
    assert resp.status_code == 200
    assert resp.headers["x-snapshot-token"] == str(token)
    doc = resp.json()
    assert doc["id"] == "s1"
    assert [r["id"] for r in doc["reports"]] == ["r1", "r2"]


def test_missing_scenario_is_404(client):
    resp = client.get("/scenarios/ghost")
    assert resp.status_code == 404
    assert "error" in resp.json()


def test_duplicate_create_conflicts(seeded):
    client, _ = seeded
    resp = client.post("/scenarios", json=scenario_doc())
    assert resp.status_code == 409


def test_put_replaces_and_bumps_token(seeded):
    client, token = seeded
    doc = scenario_doc()
    doc["reports"] = doc["reports"][:1]
    resp = client.put("/scenarios/s1", json=doc)
    assert resp.status_code == 200
    assert resp.json()["token"] == token + 1
    assert len(client.get("/scenarios/s1").json()["reports"]) == 1


def test_put_id_mismatch(seeded):
    client, _ = seeded
    resp = client.put("/scenarios/s1", json=scenario_doc(sid="other"))
    assert resp.status_code == 400
    assert resp.json()["field"] == "id"


def test_invalid_scenario_is_400_with_field(client):
    doc = scenario_doc()
    doc["reports"][0]["trust_p"] = 7
    resp = client.post("/scenarios", json=doc)
    assert resp.status_code == 400
    assert resp.json()["field"] == "reports[0].trust_p"


# ---------------------------------------------------------------------------
# Report ingestion and flags


def test_post_single_report(seeded):
    client, token = seeded
    r = {"id": "r3", "time": 2_000_000, "position": [9000.0, 1000.0], "trust_p": 0.8}
    resp = client.post("/scenarios/s1/reports", content=json.dumps(r))
    assert resp.status_code == 200
    body = resp.json()
    assert body["added"] == ["r3"]
    assert body["token"] == token + 1


def test_post_ndjson_stream(seeded):
    client, token = seeded
    lines = "\n".join(
        json.dumps(
            {"id": f"n{k}", "time": 3_000_000 + k, "position": [8000.0, 8000.0], "trust_p": 0.4}
        )
        for k in range(3)
    )
    resp = client.post("/scenarios/s1/reports", content=lines)
    assert resp.status_code == 200
    assert resp.json()["added"] == ["n0", "n1", "n2"]
    assert len(client.get("/scenarios/s1").json()["reports"]) == 5


def test_flag_toggle_changes_analysis(seeded):
    client, _ = seeded
    before = client.get("/scenarios/s1/analysis/paths").json()
    assert any(len(p["chain"]) == 2 for p in before["paths"])

    resp = client.post(
        "/scenarios/s1/flags", json={"report_id": "r2", "flagged_false": True}
    )
    assert resp.status_code == 200
    assert resp.json()["flagged_false"] is True

    after = client.get("/scenarios/s1/analysis/paths").json()
    chains = [tuple(p["chain"]) for p in after["paths"]]
    assert ("r1", "r2") not in chains
    assert ("r1",) in chains

    # Reversible: unflagging restores the original picture.
    client.post("/scenarios/s1/flags", json={"report_id": "r2", "flagged_false": False})
    restored = client.get("/scenarios/s1/analysis/paths").json()
    assert restored["paths"] == before["paths"]


def test_flag_unknown_report(seeded):
    client, _ = seeded
    resp = client.post(
        "/scenarios/s1/flags", json={"report_id": "zz", "flagged_false": True}
    )
    assert resp.status_code == 400
    assert resp.json()["field"] == "report_id"


# ---------------------------------------------------------------------------
# Snapshot tokens


def test_stale_token_conflicts(seeded):
    client, token = seeded
    r = {"id": "r3", "time": 2_000_000, "position": [9000.0, 1000.0], "trust_p": 0.8}
    client.post("/scenarios/s1/reports", content=json.dumps(r))
    resp = client.get("/scenarios/s1/analysis/paths", params={"token": token})
    assert resp.status_code == 409
    body = resp.json()
    assert body["token"] == token + 1
    fresh = client.get("/scenarios/s1/analysis/paths", params={"token": token + 1})
    assert fresh.status_code == 200


def test_every_response_carries_token(seeded):
    client, token = seeded
    for path in (
        "/scenarios/s1",
        "/scenarios/s1/graph",
        "/scenarios/s1/analysis/paths",
        "/scenarios/s1/analysis/counts",
    ):
        resp = client.get(path)
        assert resp.headers["x-snapshot-token"] == str(token)


# ---------------------------------------------------------------------------
# Analysis endpoints


def test_graph_endpoint(seeded):
    client, _ = seeded
    doc = client.get("/scenarios/s1/graph").json()
    assert [n["id"] for n in doc["nodes"]] == ["r1", "r2"]
    (edge,) = doc["edges"]
    assert edge["from"] == "r1"
    assert edge["q"] == pytest.approx(0.5)
    pruned = client.get("/scenarios/s1/graph", params={"threshold": 0.6}).json()
    assert pruned["edges"] == []


def test_paths_endpoint_values(seeded):
    client, _ = seeded
    doc = client.get("/scenarios/s1/analysis/paths").json()
    assert doc["conflict_k"] == pytest.approx(0.15, abs=1e-12)
    rows = {tuple(p["chain"]): p for p in doc["paths"]}
    assert rows[("r1", "r2")]["support"] == pytest.approx(3 / 17, abs=1e-12)
    assert rows[()]["plausibility"] == pytest.approx(4 / 17, abs=1e-12)
    top = client.get("/scenarios/s1/analysis/paths", params={"top_n": 2}).json()
    assert len(top["paths"]) == 2


def test_counts_endpoint(seeded):
    client, _ = seeded
    doc = client.get("/scenarios/s1/analysis/counts").json()
    assert doc["min_count"] == 0
    assert doc["intervals"]["1"][0] == pytest.approx(13 / 17, abs=1e-12)


def test_region_endpoint(seeded):
    client, _ = seeded
    resp = client.get(
        "/scenarios/s1/analysis/region", params={"rect": "0,0,2000,2000"}
    )
    assert resp.json()["interval"] == [pytest.approx(0.6), 1.0]
    windowed = client.get(
        "/scenarios/s1/analysis/region",
        params={"rect": "0,0,20000,20000", "window": "0,500000"},
    )
    assert windowed.json()["interval"][0] == pytest.approx(0.6)
    bad = client.get("/scenarios/s1/analysis/region", params={"rect": "5,5,1,1"})
    assert bad.status_code == 400
    assert bad.json()["field"] == "rect"


def test_incident_start_endpoint(seeded):
    client, _ = seeded
    resp = client.get(
        "/scenarios/s1/analysis/incident-start", params={"threshold": 0.7}
    )
    assert resp.json()["time"] == 1_000_000
    none = client.get(
        "/scenarios/s1/analysis/incident-start", params={"threshold": 0.95}
    )
    assert none.json()["time"] is None


def test_evidence_map_endpoint(seeded):
    client, _ = seeded
    doc = client.get("/scenarios/s1/evidence-map").json()
    assert doc["cell_size"] == 500.0
    assert len(doc["values"]) == doc["width"] * doc["height"]
    coarse = client.get("/scenarios/s1/evidence-map", params={"cell": 1000}).json()
    assert coarse["cell_size"] == 1000.0
    assert len(coarse["values"]) == coarse["width"] * coarse["height"]


def test_shortest_path_endpoint(seeded):
    client, _ = seeded
    resp = client.get(
        "/scenarios/s1/shortest-path",
        params={"from": "1000,1000", "to": "4000,5000"},
    )
    doc = resp.json()
    assert doc["length_m"] == pytest.approx(5000.0)
    assert doc["waypoints"] == [[1000.0, 1000.0], [4000.0, 5000.0]]


def test_over_limit_is_422(client):
    reports = [
        {
            "id": f"r{k:02d}",
            "time": k * 600_000,
            "position": [1000.0 + 120_000.0 * 0, 1000.0],
            "trust_p": 0.5,
        }
        for k in range(12)
    ]
    for k, r in enumerate(reports):
        r["position"] = [1000.0 + 900.0 * k, 1000.0]
    doc = scenario_doc(sid="big", navmap=None, reports=reports)
    assert client.post("/scenarios", json=doc).status_code == 201
    resp = client.get("/scenarios/big/analysis/paths")
    assert resp.status_code == 422
    beamed = client.get("/scenarios/big/analysis/paths", params={"beam": "true"})
    assert beamed.status_code == 200
    assert beamed.json()["approximate"] is True


def test_navigation_error_is_422(client):
    doc = scenario_doc(sid="nav")
    doc["map"]["features"] = [
        {
            "type": "Feature",
            "geometry": {
                "type": "Polygon",
                "coordinates": [
                    [
                        [8000.0, 8000.0],
                        [12000.0, 8000.0],
                        [12000.0, 12000.0],
                        [8000.0, 12000.0],
                        [8000.0, 8000.0],
                    ]
                ],
            },
            "properties": {"min_depth_m": 0.0},
        }
    ]
    assert client.post("/scenarios", json=doc).status_code == 201
    resp = client.get(
        "/scenarios/nav/shortest-path",
        params={"from": "10000,10000", "to": "1000,1000"},
    )
    assert resp.status_code == 422
    assert "error" in resp.json()


def test_cors_allows_browser_clients(seeded):
    client, _ = seeded
    resp = client.get("/scenarios/s1", headers={"Origin": "http://localhost:5173"})
    assert resp.headers.get("access-control-allow-origin") in {"*", "http://localhost:5173"}


# ---------------------------------------------------------------------------
# Configuration


def test_load_config_file_and_env(tmp_path, monkeypatch):
    path = tmp_path / "service.json"
    path.write_text(
        json.dumps(
            {"host": "0.0.0.0", "port": 9000, "params": {"exact_limit": 8}}
        )
    )
    cfg = load_config(path)
    assert cfg.host == "0.0.0.0"
    assert cfg.port == 9000
    assert cfg.params == {"exact_limit": 8}

    monkeypatch.setenv("EVITRACK_PORT", "9100")
    monkeypatch.setenv("EVITRACK_EXACT_LIMIT", "6")
    monkeypatch.setenv("EVITRACK_CELL_SIZE_M", "250")
    cfg = load_config(path)
    assert cfg.port == 9100
    assert cfg.params["exact_limit"] == 6
    assert cfg.params["cell_size_m"] == 250.0


def test_load_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "service.json"
    path.write_text(json.dumps({"hots": "x"}))
    with pytest.raises(SchemaError):
        load_config(path)
    path.write_text(json.dumps({"params": {"nope": 1}}))
    with pytest.raises(SchemaError):
        load_config(path)


def test_config_params_reach_analysis(monkeypatch):
    # A service-level exact_limit of 1 forces the 422 on two reports.
    app = create_app(ServiceConfig(params={"exact_limit": 1}))
    client = TestClient(app, raise_server_exceptions=False)
    client.post("/scenarios", json=scenario_doc())
    resp = client.get("/scenarios/s1/analysis/paths")
    assert resp.status_code == 422
