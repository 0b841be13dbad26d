"""Embedding backends: a deterministic mock and a transformer model.

The mock reproduces the client package's built-in hashed encoder
bit-for-bit at float32 so protocol tests can run without model weights.
"""

from __future__ import annotations

import hashlib

import numpy as np

MOCK_DIM = 384
MAX_TOKENS = 512


def mock_embedding(text: str, dim: int = MOCK_DIM) -> np.ndarray:
    """Signed-hash embedding over whitespace tokens and adjacent bigrams.

    sha256(feature) -> bucket from the first 4 bytes, sign from byte 4
    parity; L2-normalized. Must stay in lockstep with the client's
    built-in encoder definition.
    """
    tokens = text.split()[:MAX_TOKENS]
    features = list(tokens)
    features.extend(f"{a} {b}" for a, b in zip(tokens, tokens[1:]))
    vec = np.zeros(dim, dtype=np.float64)
    for feat in features:
        digest = hashlib.sha256(feat.encode("utf-8")).digest()
        bucket = int.from_bytes(digest[:4], "big") % dim
        sign = 1.0 if digest[4] % 2 == 0 else -1.0
        vec[bucket] += sign
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        vec[0] = 1.0
        return vec
    return vec / norm


class MockEncoder:
    name = "mock"

    def __init__(self, dim: int = MOCK_DIM):
        self.dim = dim

    def encode(self, sentences: list[str]) -> np.ndarray:
        return np.stack([mock_embedding(s, self.dim) for s in sentences]).astype(np.float32)


class TransformerEncoder:
    """Mean-pooled, L2-normalized transformer sentence embeddings."""

    def __init__(self, model_id: str, device: str = "cpu"):
        import torch
        from transformers import AutoModel, AutoTokenizer

        self.name = model_id
        self.device = device
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModel.from_pretrained(model_id).to(device)
        self.model.eval()
        self.dim = int(self.model.config.hidden_size)
        self._torch = torch

    def encode(self, sentences: list[str]) -> np.ndarray:
        torch = self._torch
        with torch.no_grad():
            emb = embed_batch(self.model, self.tokenizer, sentences, self.device)
        return emb.cpu().numpy().astype(np.float32)


def embed_batch(model, tokenizer, sentences: list[str], device: str = "cpu"):
    """Differentiable batch embedding shared by serving and fine-tuning."""
    import torch

    enc = tokenizer(
        sentences, padding=True, truncation=True, max_length=MAX_TOKENS, return_tensors="pt"
    ).to(device)
    hidden = model(**enc).last_hidden_state
    mask = enc["attention_mask"].unsqueeze(-1).to(hidden.dtype)
    pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1e-9)
    return torch.nn.functional.normalize(pooled, p=2, dim=1)
