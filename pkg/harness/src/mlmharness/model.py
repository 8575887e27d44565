"""Encoder with low-rank attention adapters and a fresh LM head.

Only two parameter groups train: the adapters wrapped around each encoder
layer's attention query and value projections, and a language-modeling head
mapping final hidden states to vocabulary logits. Every base encoder weight
(embeddings, attention, feed-forward, layer norms) is frozen.
"""

from __future__ import annotations

import torch
from torch import nn
from transformers import BertConfig, BertModel

from .config import HarnessConfig
from .data import Vocab
from .lora import LoRALinear

# The two projections adapted in each encoder layer.
ADAPTED_PROJECTIONS = ("query", "value")


def expected_trainable_count(num_layers: int, hidden_size: int, rank: int,
                             vocab_size: int) -> int:
    """Closed-form trainable-parameter count.

    Per layer: 2 adapted projections, each contributing an A matrix
    (rank x hidden) and a B matrix (hidden x rank) -> 2 * rank * hidden * 2.
    Plus the LM head: hidden * vocab weights and vocab biases.
    """
    per_layer = 2 * rank * hidden_size * 2
    head = hidden_size * vocab_size + vocab_size
    return num_layers * per_layer + head


class MaskedWordModel(nn.Module):
    def __init__(self, cfg: HarnessConfig, vocab: Vocab) -> None:
        super().__init__()
        self.cfg = cfg
        encoder_config = BertConfig(
            vocab_size=len(vocab),
            hidden_size=cfg.hidden_size,
            num_hidden_layers=cfg.num_layers,
            num_attention_heads=cfg.num_heads,
            intermediate_size=4 * cfg.hidden_size,
            max_position_embeddings=cfg.max_length,
            pad_token_id=vocab.pad_id,
        )
        self.encoder = BertModel(encoder_config)
        for param in self.encoder.parameters():
            param.requires_grad_(False)
        for layer in self.encoder.encoder.layer:
            attention = layer.attention.self
            for name in ADAPTED_PROJECTIONS:
                setattr(attention, name,
                        LoRALinear(getattr(attention, name), cfg.rank, cfg.alpha))
        self.head = nn.Linear(cfg.hidden_size, len(vocab))

    def forward(self, input_ids: torch.Tensor,
                attention_mask: torch.Tensor) -> torch.Tensor:
        hidden = self.encoder(input_ids=input_ids,
                              attention_mask=attention_mask).last_hidden_state
        return self.head(hidden)

    def trainable_parameters(self) -> list[nn.Parameter]:
        return [p for p in self.parameters() if p.requires_grad]

    def trainable_parameter_count(self) -> int:
        return sum(p.numel() for p in self.trainable_parameters())

    def base_parameter_names(self) -> list[str]:
        return [name for name, p in self.named_parameters() if not p.requires_grad]
