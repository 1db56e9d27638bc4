"""HTTP endpoints."""
from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from app import api
from app.api import app
from core.errors import EigenspaceError


@pytest.fixture
def client():
    return TestClient(app)


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


def test_mask(client):
    response = client.post("/api/v1/mask", json={"family": "dual-even", "n": 2})
    assert response.status_code == 200
    body = response.json()
    assert body["fraction"] == "[7,13,9,11,11,9,13,7]/40"
    assert body["record"]["first_index"] == -4
    assert body["record"]["family"] == "dual_even"


@pytest.mark.parametrize(
    "payload",
    [{"family": "quadratic", "n": 2}, {"family": "primal-even", "n": 2, "degree": 4}],
)
def test_bad_scheme_is_400(client, payload):
    assert client.post("/api/v1/mask", json=payload).status_code == 400


def test_schema_violations_are_422(client):
    assert client.post("/api/v1/mask", json={"family": "primal-even", "n": 0}).status_code == 422
    assert client.post("/api/v1/mask", json={"family": "primal-even", "n": 2, "colour": "red"}).status_code == 422


def test_regularity(client):
    response = client.post("/api/v1/regularity", json={"family": "primal-even", "n": 1, "L": 4})
    assert response.status_code == 200
    assert response.json()["lower_bound"] == pytest.approx(1.0)
    assert client.post("/api/v1/regularity", json={"family": "primal-even", "n": 1, "L": 30}).status_code == 422


def test_psi_stats(client):
    response = client.post("/api/v1/psi-stats", json={"family": "primal-even", "n": 1, "K": 9})
    assert response.status_code == 200
    body = response.json()
    assert body["min"] == pytest.approx(0.5)
    assert body["max"] == pytest.approx(1.0)


def test_numerical_failure_is_422(client, monkeypatch):
    def broken(spec, K):
        raise EigenspaceError("eigenvalue 1 is not simple")

    monkeypatch.setattr(api, "psi_stats", broken)
    response = client.post("/api/v1/psi-stats", json={"family": "primal-even", "n": 2})
    assert response.status_code == 422
    assert "not simple" in response.json()["detail"]
