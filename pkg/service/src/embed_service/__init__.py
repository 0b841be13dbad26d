"""Sentence-embedding HTTP sidecar with mock mode and offline fine-tuning."""

from .app import MAX_BATCH, create_app
from .encoders import MOCK_DIM, MockEncoder, TransformerEncoder, mock_embedding
from .finetune import PairsFileError, finetune, load_pairs

__all__ = [
    "MAX_BATCH",
    "MOCK_DIM",
    "MockEncoder",
    "PairsFileError",
    "TransformerEncoder",
    "create_app",
    "finetune",
    "load_pairs",
    "mock_embedding",
]

__version__ = "0.1.0"
