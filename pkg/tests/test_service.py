"""HTTP service tests using the in-process test client."""

import math

import pytest
from fastapi.testclient import TestClient

from fwmsim import __version__
from fwmsim.config import SCENARIOS
from fwmsim.service.app import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok", "version": __version__}


def test_scenario_listing(client):
    resp = client.get("/scenarios")
    assert resp.status_code == 200
    assert resp.json()["scenarios"] == list(SCENARIOS)


def test_run_visibility(client):
    resp = client.post(
        "/run",
        json={"scenario": "visibility", "T": [1.0], "alpha_sq": [0.0], "gamma": 0.48},
    )
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["columns"] == ["T", "alpha_sq", "V"]
    assert doc["rows"] == [[1.0, 0.0, 0.48]]
    assert doc["metadata"]["scenario"] == "visibility"


def test_run_preserves_float_precision(client):
    resp = client.post(
        "/run",
        json={"scenario": "visibility", "T": [0.3], "alpha_sq": [2.0], "gamma": 1.0},
    )
    from fwmsim.closed_form import visibility

    # JSON uses repr round-tripping, so the value survives the wire exactly
    assert resp.json()["rows"][0][2] == visibility(0.3, 2.0, 1.0)


def test_run_mixed_string_cells(client):
    resp = client.post(
        "/run",
        json={
            "scenario": "oracle-check",
            "T": [0.6],
            "alpha_sq": [0.0],
            "r": 0.05,
            "dim": 12,
        },
    )
    assert resp.status_code == 200
    metrics = {row[2] for row in resp.json()["rows"]}
    assert metrics == {"V", "K", "P", "C"}


def test_unknown_key_is_422(client):
    resp = client.post("/run", json={"scenario": "visibility", "bogus": 1})
    assert resp.status_code == 422


def test_incomplete_config_is_422_with_detail(client):
    resp = client.post("/run", json={"scenario": "g2-sweep", "alpha_sq": [0.0]})
    assert resp.status_code == 422
    assert "detector" in resp.json()["detail"]


def test_bad_scenario_is_422(client):
    resp = client.post("/run", json={"scenario": "zzz"})
    assert resp.status_code == 422


def test_jitter_run_over_http_deterministic(client):
    payload = {
        "scenario": "jitter",
        "alpha_sq": 0.0,
        "detector": {
            "jitter_sigma": 0.4e-9 / math.sqrt(2.0),
            "bin_width": 1e-10,
            "window": 2e-9,
        },
        "pair_rate": 1e5,
        "duration": 1.0,
        "seed": 123,
    }
    a = client.post("/run", json=payload).json()
    b = client.post("/run", json=payload).json()
    assert a == b
