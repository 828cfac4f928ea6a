import pytest
from fastapi.testclient import TestClient

from main import app

TINY_CAMPAIGN = {
    "code": {"n": 64, "k": 16, "crc_len": 6},
    "decoder": {"kind": "scl", "list_size": 4},
    "channel": {"snr_points_db": [2.0, 6.0]},
    "stopping": {"min_block_errors": 5, "max_frames": 16, "batch_size": 8},
    "workers": 1,
    "output": {"label": "api-smoke"},
}


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_home(client):
    assert client.get("/").json() == {"status": "ok", "service": "polar-fsl"}


def test_campaign_lifecycle(client):
    response = client.post("/api/v1/campaigns", json=TINY_CAMPAIGN)
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "success"
    assert body["label"].startswith("api-smoke")

    campaign = client.get(f"/api/v1/campaigns/{body['campaign_id']}").json()["campaign"]
    assert campaign["status"] == "finished"
    assert campaign["code"].startswith("N: 64")
    assert [p["snr_db"] for p in campaign["points"]] == [2.0, 6.0]
    assert all(0 < p["frames"] <= 16 for p in campaign["points"])

    listed = client.get("/api/v1/campaigns").json()["campaigns"]
    assert body["campaign_id"] in [c["id"] for c in listed]
    assert all("points" not in c for c in listed)


def test_fsl_campaign_through_the_api(client):
    config = {**TINY_CAMPAIGN, "decoder": {"kind": "fsl", "list_size": 8, "block_len": 8}}
    campaign_id = client.post("/api/v1/campaigns", json=config).json()["campaign_id"]
    campaign = client.get(f"/api/v1/campaigns/{campaign_id}").json()["campaign"]
    assert campaign["status"] == "finished"
    assert campaign["decoder"] == "fsl"


def test_invalid_campaigns_are_rejected(client):
    bad_snr = {**TINY_CAMPAIGN, "channel": {"snr_points_db": [3.0, 1.0]}}
    assert client.post("/api/v1/campaigns", json=bad_snr).status_code == 422
    bad_code = {**TINY_CAMPAIGN, "code": {"n": 60, "k": 16}}
    assert client.post("/api/v1/campaigns", json=bad_code).status_code == 400


def test_missing_campaign(client):
    assert client.get("/api/v1/campaigns/999999").status_code == 404


def test_verify_endpoint(client):
    response = client.post("/api/v1/verify", json={"checks": ["crc", "syndrome-table", "spectra"]})
    body = response.json()
    assert body["passed"] is True
    assert [c["name"] for c in body["checks"]] == ["crc", "syndrome-table", "spectra"]
    assert client.post("/api/v1/verify", json={"checks": ["nope"]}).status_code == 400


def test_outer_code_spectrum(client):
    body = client.get("/api/v1/outer-codes/9").json()
    assert body["family"] == "dual-ebch"
    assert body["min_distance"] == 4
    assert body["a_dmin"] == 20
    assert len(body["generator"]) == 9
    assert body["spectrum"]["0"] == 1


def test_outer_code_out_of_range(client):
    assert client.get("/api/v1/outer-codes/20").status_code == 400
