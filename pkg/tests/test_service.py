"""HTTP API contract tests over the bundled dataset."""

import json

import pytest
from fastapi.testclient import TestClient

from rulcast import fixtures, pipeline, report
from rulcast.cli import main
from rulcast.service import create_app


@pytest.fixture(scope="module")
def client(fixture_snapshot):
    app = create_app(snapshot=fixture_snapshot)
    with TestClient(app) as c:
        yield c


def combos_payload():
    return json.loads(fixtures.fixture_combos_json())


def test_releases_endpoint(client, fixture_snapshot):
    body = client.get("/api/releases").json()
    assert body["snapshot_version"] == fixture_snapshot.version_stamp
    assert body["threshold_ms"] == 9000.0
    assert [r["version"] for r in body["releases"]] == \
        list(fixtures.HISTORICAL_VERSIONS)
    assert body["releases"][-1]["cumulative_cpv"] == 24.5


def test_unresolved_issue_pool(client):
    body = client.get("/api/issues", params={"status": "unresolved"}).json()
    ids = [i["id"] for i in body["issues"]]
    assert ids == [f"U{n}" for n in range(1, 12)]
    assert all(i["resolved_release"] is None for i in body["issues"])


def test_resolved_filter_and_default(client):
    resolved = client.get("/api/issues", params={"status": "resolved"}).json()
    everything = client.get("/api/issues").json()
    assert len(resolved["issues"]) == 18
    assert len(everything["issues"]) == 29


def test_classify_endpoint(client):
    body = client.post("/api/classify",
                       json={"text": "Fix typo in help text"}).json()
    assert body["story_points"] == 1
    posterior = {int(k): v for k, v in body["posterior"].items()}
    assert sum(posterior.values()) == pytest.approx(1.0, abs=1e-9)
    assert max(posterior, key=posterior.get) == 1


def test_classify_malformed_body_is_400(client):
    resp = client.post("/api/classify", json={"txt": "oops"})
    assert resp.status_code == 400
    errors = resp.json()["errors"]
    assert any("text" in e["field"] for e in errors)


def test_classify_without_model_is_422(fixture_snapshot):
    from dataclasses import replace
    bare = replace(fixture_snapshot, sizing_model=None)
    with TestClient(create_app(snapshot=bare)) as c:
        resp = c.post("/api/classify", json={"text": "anything"})
    assert resp.status_code == 422
    assert "error" in resp.json()


def test_plan_ranks_all_combos(client):
    body = client.post("/api/plan", json=combos_payload()).json()
    assert body["ranking"] == ["Combo-1", "Combo-4", "Combo-3", "Combo-2"]
    by_label = {c["combo"]: c for c in body["combos"]}
    assert by_label["Combo-1"]["rul_releases"] == 5
    assert by_label["Combo-2"]["rul_releases"] == 1


def test_plan_matches_cli_report(client, tmp_path):
    assert main(["fixture", "--out", str(tmp_path / "demo")]) == 0
    assert main(["rul", "--config", str(tmp_path / "demo" / "run.toml"),
                 "--out", str(tmp_path / "out")]) == 0
    cli_payload = json.loads((tmp_path / "out" / "rul.json").read_text())
    api_payload = client.post("/api/plan", json=combos_payload()).json()
    assert api_payload["combos"] == cli_payload["combos"]


def test_plan_duplicate_issue_is_422(client):
    bad = {"combos": [{"label": "dup", "releases": [
        {"version": "6.0.0", "issues": ["U1"]},
        {"version": "6.5.0", "issues": ["U1"]},
    ]}]}
    resp = client.post("/api/plan", json=bad)
    assert resp.status_code == 422
    assert "U1" in resp.json()["error"]


def test_plan_unknown_issue_is_422(client):
    bad = {"combos": [{"label": "ghost", "releases": [
        {"version": "6.0.0", "issues": ["nope"]}]}]}
    assert client.post("/api/plan", json=bad).status_code == 422


def test_plan_malformed_body_is_400(client):
    assert client.post("/api/plan", json={"combos": "nope"}).status_code == 400
    assert client.post("/api/plan",
                       content=b"{not json",
                       headers={"content-type": "application/json"}
                       ).status_code == 400


def test_plan_delta_override(client):
    body = {"combos": [{"label": "manual", "releases": [
        {"version": "6.0.0", "delta_cpv": 19.0}]}]}
    resp = client.post("/api/plan", json=body).json()
    release = resp["combos"][0]["releases"][0]
    assert release["cumulative_cpv"] == 43.5


def test_model_endpoint(client, fixture_snapshot):
    body = client.get("/api/model").json()
    assert body["k"] == 2
    assert body["unfittable_clusters"] == []
    assert set(body["models"]) == {"0", "1"}
    for m in body["models"].values():
        assert m["r_squared"] > 0.95
    assert len(body["wcss_curve"]) == len(fixture_snapshot.wcss_curve)


def test_cors_headers(client):
    resp = client.get("/api/releases", headers={"Origin": "http://example.test"})
    assert resp.headers.get("access-control-allow-origin") == "*"


def test_reload_from_files(tmp_path):
    assert main(["fixture", "--out", str(tmp_path / "demo")]) == 0
    from rulcast.cli import _load_config
    from rulcast.pipeline import RunConfig
    config = RunConfig(**_load_config(tmp_path / "demo" / "run.toml"))
    with TestClient(create_app(config=config)) as c:
        before = c.get("/api/releases").json()["snapshot_version"]
        assert c.post("/api/reload").json()["snapshot_version"] == before
        # Change an input file: the stamp must change after reload only.
        issues = tmp_path / "demo" / "issues.csv"
        text = issues.read_text().replace("U11,enhancement", "U11,fault")
        issues.write_text(text)
        assert c.get("/api/releases").json()["snapshot_version"] == before
        after = c.post("/api/reload").json()["snapshot_version"]
        assert after != before
