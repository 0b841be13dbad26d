"""Wire-protocol conformance for /embed and /health, mostly in mock mode."""

import random

import numpy as np
import pytest
from fastapi.testclient import TestClient

from embed_service.app import MAX_BATCH, create_app
from embed_service.encoders import MOCK_DIM, MockEncoder, TransformerEncoder, mock_embedding


@pytest.fixture
def client():
    with TestClient(create_app(MockEncoder)) as c:
        yield c


def embed(client, sentences):
    return client.post("/embed", json={"sentences": sentences})


def test_identical_sentences_identical_vectors(client):
    body = embed(client, ["a", "a"]).json()
    assert body["embeddings"][0] == body["embeddings"][1]


def test_batch_shape_and_order(client):
    sentences = ["one fish", "two fish", "red fish"]
    resp = embed(client, sentences)
    assert resp.status_code == 200
    body = resp.json()
    assert len(body["embeddings"]) == 3
    assert all(len(v) == body["dim"] for v in body["embeddings"])
    assert all(np.isfinite(v).all() for v in body["embeddings"])
    singles = [embed(client, [s]).json()["embeddings"][0] for s in sentences]
    assert body["embeddings"] == singles


def test_empty_list_is_400(client):
    resp = embed(client, [])
    assert resp.status_code == 400
    assert "error" in resp.json()


def test_empty_sentence_is_400(client):
    assert embed(client, ["ok", ""]).status_code == 400


def test_oversize_batch_is_413(client):
    resp = embed(client, ["x"] * (MAX_BATCH + 1))
    assert resp.status_code == 413
    assert "error" in resp.json()


def test_health_matches_embed_dim(client):
    health = client.get("/health").json()
    assert health["status"] == "ok"
    assert health["model"] == "mock"
    assert health["dim"] == embed(client, ["z"]).json()["dim"] == MOCK_DIM


def test_health_503_before_model_load():
    with TestClient(create_app(MockEncoder, eager=False)) as c:
        resp = c.get("/health")
        assert resp.status_code == 503
        assert "error" in resp.json()
        # first embed triggers the lazy load; health recovers
        assert embed(c, ["a"]).status_code == 200
        assert c.get("/health").status_code == 200


def test_encoder_failure_is_500_with_error_body():
    class Broken:
        dim = 4
        name = "broken"

        def encode(self, sentences):
            raise RuntimeError("boom")

    with TestClient(create_app(Broken), raise_server_exceptions=False) as c:
        resp = embed(c, ["a"])
        assert resp.status_code == 500
        assert "boom" in resp.json()["error"]


def test_mock_matches_client_builtin_encoder_float32():
    anchorpath_text = pytest.importorskip("anchorpath.text")
    rng = random.Random(7)
    words = ["alpha", "beta", "gamma", "delta", "eps", "[Q]", "x-1", "42"]
    sentences = [
        " ".join(rng.choice(words) for _ in range(rng.randint(1, 12))) for _ in range(100)
    ]
    ours = MockEncoder().encode(sentences)
    theirs = np.stack(
        [anchorpath_text.hashed_embedding(s) for s in sentences]
    ).astype(np.float32)
    assert ours.dtype == np.float32
    assert np.array_equal(ours, theirs)


def test_mock_zero_feature_fallback():
    vec = mock_embedding("")
    assert vec[0] == 1.0 and np.count_nonzero(vec) == 1


def test_transformer_encoder_serves_protocol(tiny_model_dir):
    with TestClient(create_app(lambda: TransformerEncoder(tiny_model_dir))) as c:
        health = c.get("/health").json()
        assert health["status"] == "ok" and health["model"] == tiny_model_dir
        body = embed(c, ["a b c", "a b c", "d e"]).json()
        assert body["dim"] == health["dim"] == 32
        assert body["embeddings"][0] == body["embeddings"][1]
        norms = [float(np.linalg.norm(v)) for v in body["embeddings"]]
        assert norms == pytest.approx([1.0, 1.0, 1.0], abs=1e-5)
