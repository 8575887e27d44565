"""Fine-tune a masked language model on lingvar dataset files and emit
ranked mask-filling predictions the lingvar scorer accepts.

The package adds low-rank adapters to the attention query/value projections
of a Transformer encoder (every other base weight stays frozen) plus a fresh
language-modeling head, trains with masked-token cross-entropy, and decodes
the top-k vocabulary tokens per mask position.
"""

from .config import HarnessConfig, HarnessError
from .data import DataError, MaskedInstance, Vocab, load_vocab, read_dataset
from .model import MaskedWordModel, expected_trainable_count
from .predict import predict
from .train import TrainResult, finetune

__all__ = [
    "DataError",
    "HarnessConfig",
    "HarnessError",
    "MaskedInstance",
    "MaskedWordModel",
    "TrainResult",
    "Vocab",
    "expected_trainable_count",
    "finetune",
    "load_vocab",
    "predict",
    "read_dataset",
]
