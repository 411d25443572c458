"""HTTP service tests over the in-process test client."""

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from icebreaker.pipeline import Resources
from icebreaker.retrieval import RetrievalCaps
from icebreaker.service import (
    ConfigError,
    ServiceConfig,
    SessionRegistry,
    create_app,
    load_config_file,
)


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app(Resources.load())) as c:
        yield c


def new_session(client) -> str:
    response = client.post("/sessions")
    assert response.status_code == 201
    return response.json()["session_id"]


# ----------------------------------------------------------------- basics

def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "ok"
    assert body["corpus_pairs"] == 52


def test_session_ids_are_sequential():
    registry = SessionRegistry()
    assert [registry.create() for _ in range(3)] == ["s1", "s2", "s3"]
    assert registry.get("s2") is not None
    assert registry.delete("s2")
    assert registry.get("s2") is None
    assert not registry.delete("s2")


def test_create_and_read_empty_session(client):
    sid = new_session(client)
    response = client.get(f"/sessions/{sid}")
    assert response.status_code == 200
    assert response.json() == {"session_id": sid, "turns": []}


def test_unknown_session_is_404(client):
    assert client.get("/sessions/ghost").status_code == 404
    assert client.delete("/sessions/ghost").status_code == 404
    assert client.get("/sessions/ghost/trace").status_code == 404
    assert (
        client.post("/sessions/ghost/messages", json={"text": "hi"}).status_code == 404
    )


def test_delete_session(client):
    sid = new_session(client)
    assert client.delete(f"/sessions/{sid}").json() == {"deleted": sid}
    assert client.get(f"/sessions/{sid}").status_code == 404


# ---------------------------------------------------------------- messages

def test_message_round_trip_general(client):
    sid = new_session(client)
    response = client.post(f"/sessions/{sid}/messages", json={"text": "你喜欢看电视剧吗？"})
    assert response.status_code == 200
    body = response.json()
    assert body["session_id"] == sid
    assert body["reply"]
    assert body["trace"]["mode"] == "general"
    assert body["trace"]["stalemate"] is False

    turns = client.get(f"/sessions/{sid}").json()["turns"]
    assert [t["speaker"] for t in turns] == ["human", "computer"]
    assert turns[1]["text"] == body["reply"]


def test_message_round_trip_introducing(client):
    sid = new_session(client)
    client.post(f"/sessions/{sid}/messages", json={"text": "你看过机器人总动员吗？"})
    response = client.post(f"/sessions/{sid}/messages", json={"text": "啊……"})
    assert response.status_code == 200
    trace = response.json()["trace"]
    assert trace["mode"] == "introducing"
    assert trace["stalemate"] is True
    assert trace["detected_entities"]
    assert trace["ranking"]["method"] == "bi_pagerank_hits"
    assert trace["ranking"]["entries"][0]["id"] == trace["chosen_reply_id"]
    # texts are inlined so a client can render the candidate table directly
    assert all("text" in e for e in trace["ranking"]["entries"])


def test_trace_endpoint_returns_last_trace(client):
    sid = new_session(client)
    assert client.get(f"/sessions/{sid}/trace").status_code == 404  # nothing yet
    posted = client.post(f"/sessions/{sid}/messages", json={"text": "hello"}).json()
    fetched = client.get(f"/sessions/{sid}/trace").json()
    assert fetched["session_id"] == sid
    assert fetched["trace"] == posted["trace"]


def test_empty_message_rejected(client):
    sid = new_session(client)
    assert (
        client.post(f"/sessions/{sid}/messages", json={"text": "   "}).status_code
        == 422
    )
    assert client.post(f"/sessions/{sid}/messages", json={}).status_code == 422
    assert client.get(f"/sessions/{sid}").json()["turns"] == []


def test_no_reply_returns_structured_422(write_file):
    # min_len larger than any reply empties both retrieval paths
    resources = Resources.load(caps=RetrievalCaps(min_len=999))
    with TestClient(create_app(resources)) as client:
        sid = new_session(client)
        response = client.post(f"/sessions/{sid}/messages", json={"text": "hi"})
        assert response.status_code == 422
        body = response.json()
        assert body["error"] == "no_reply"
        assert body["trace"]["candidates"] == []
        # the failed trace is still inspectable afterwards
        assert client.get(f"/sessions/{sid}/trace").status_code == 200


def test_auto_create_sessions_flag():
    app = create_app(Resources.load(), ServiceConfig(auto_create_sessions=True))
    with TestClient(app) as client:
        response = client.post("/sessions/fresh/messages", json={"text": "hello"})
        assert response.status_code == 200
        assert client.get("/sessions/fresh").status_code == 200


# ---------------------------------------------------------------- kg route

def test_kg_neighbors_known_entity(client):
    response = client.get("/kg/neighbors", params={"entity": "瓦力", "k": 2})
    assert response.status_code == 200
    body = response.json()
    assert body["known"] is True
    assert body["neighbors"][0] == {"entity": "伊娃", "weight": 0.95}
    assert len(body["neighbors"]) == 2


def test_kg_neighbors_unknown_entity(client):
    body = client.get("/kg/neighbors", params={"entity": "dragon"}).json()
    assert body["known"] is False
    assert body["neighbors"] == []


# ------------------------------------------------------------------ config

def test_service_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        ServiceConfig(corpus_path=str(tmp_path / "missing.tsv")).validate()
    with pytest.raises(ConfigError):
        ServiceConfig(port=0).validate()
    with pytest.raises(ConfigError):
        ServiceConfig(ui_dir=str(tmp_path / "nope")).validate()
    assert ServiceConfig().validate() is not None


def test_load_config_file(write_file):
    path = write_file(json.dumps({"mu": 0.2, "port": 9000}), suffix=".json")
    assert load_config_file(path) == {"mu": 0.2, "port": 9000}


def test_load_config_file_rejects_unknown_keys(write_file):
    path = write_file(json.dumps({"mu": 0.2, "muu": 1}), suffix=".json")
    with pytest.raises(ConfigError, match="muu"):
        load_config_file(path)


def test_load_config_file_rejects_non_object(write_file):
    with pytest.raises(ConfigError):
        load_config_file(write_file("[1, 2]", suffix=".json"))
    with pytest.raises(ConfigError):
        load_config_file(write_file("{broken", suffix=".json"))


def test_static_ui_mount(tmp_path):
    ui = tmp_path / "ui"
    ui.mkdir()
    (ui / "index.html").write_text("<h1>chat shell</h1>", encoding="utf-8")
    app = create_app(Resources.load(), ServiceConfig(ui_dir=str(ui)))
    with TestClient(app) as client:
        response = client.get("/")
        assert response.status_code == 200
        assert "chat shell" in response.text
        # API routes still win over the static mount
        assert client.get("/health").status_code == 200
