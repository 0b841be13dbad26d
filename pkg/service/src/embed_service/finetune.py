"""Offline fine-tuning of the embedding model on exported training pairs.

The pairs file is JSON-lines in the scorer export format: each record has
"query_sentence", "path_sentences" (list), and "label" (1 or -1). Every
(query, path) combination becomes one cosine-embedding-loss pair; records
whose path list is empty contribute nothing.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass

from .encoders import embed_batch

logger = logging.getLogger(__name__)


class PairsFileError(ValueError):
    """The pairs file is missing, empty, or has a malformed record."""


@dataclass(frozen=True)
class SentencePair:
    query: str
    path: str
    label: int  # 1 or -1


def load_pairs(path) -> list[SentencePair]:
    pairs: list[SentencePair] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                query = rec["query_sentence"]
                sentences = rec["path_sentences"]
                label = rec["label"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise PairsFileError(f"{path}:{lineno}: malformed pair record: {exc}") from exc
            if label not in (1, -1):
                raise PairsFileError(f"{path}:{lineno}: label must be 1 or -1, got {label!r}")
            if not isinstance(sentences, list) or not isinstance(query, str):
                raise PairsFileError(f"{path}:{lineno}: wrong field types in pair record")
            pairs.extend(SentencePair(query, s, label) for s in sentences)
    if not pairs:
        raise PairsFileError(f"{path}: no usable (query, path, label) pairs")
    return pairs


def finetune(
    pairs_file,
    model_id: str,
    output_dir,
    epochs: int = 30,
    lr: float = 1e-5,
    margin: float = 0.5,
    batch_size: int = 16,
    seed: int = 42,
    device: str = "cpu",
) -> dict:
    """Train with cosine-embedding loss and write a checkpoint to output_dir.

    Returns {"pairs", "initial_loss", "final_loss", "epoch_losses"};
    initial/final are full-dataset eval passes before and after training,
    epoch_losses are per-epoch means of the optimization loss.
    """
    import torch
    from transformers import AutoModel, AutoTokenizer

    pairs = load_pairs(pairs_file)
    torch.manual_seed(seed)
    rng = random.Random(seed)

    tokenizer = AutoTokenizer.from_pretrained(model_id)
    model = AutoModel.from_pretrained(model_id).to(device)
    loss_fn = torch.nn.CosineEmbeddingLoss(margin=margin)
    optimizer = torch.optim.AdamW(model.parameters(), lr=lr)

    def batches(items):
        for i in range(0, len(items), batch_size):
            yield items[i : i + batch_size]

    def batch_loss(batch: list[SentencePair]) -> torch.Tensor:
        q = embed_batch(model, tokenizer, [p.query for p in batch], device)
        s = embed_batch(model, tokenizer, [p.path for p in batch], device)
        y = torch.tensor([p.label for p in batch], dtype=torch.float32, device=device)
        return loss_fn(q, s, y)

    def eval_mean_loss() -> float:
        model.eval()
        total, n = 0.0, 0
        with torch.no_grad():
            for batch in batches(pairs):
                total += float(batch_loss(batch)) * len(batch)
                n += len(batch)
        return total / n

    initial = eval_mean_loss()
    epoch_losses: list[float] = []
    for epoch in range(epochs):
        model.train()
        order = list(pairs)
        rng.shuffle(order)
        total, n = 0.0, 0
        for batch in batches(order):
            optimizer.zero_grad()
            loss = batch_loss(batch)
            loss.backward()
            optimizer.step()
            total += float(loss.detach()) * len(batch)
            n += len(batch)
        mean = total / n
        epoch_losses.append(mean)
        logger.info("epoch %d/%d mean loss %.6f", epoch + 1, epochs, mean)
    final = eval_mean_loss()

    model.save_pretrained(output_dir)
    tokenizer.save_pretrained(output_dir)
    return {
        "pairs": len(pairs),
        "initial_loss": initial,
        "final_loss": final,
        "epoch_losses": epoch_losses,
    }
