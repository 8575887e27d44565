"""Low-rank adapters over frozen linear projections."""

from __future__ import annotations

import torch
from torch import nn


class LoRALinear(nn.Module):
    """A frozen linear layer plus a trainable low-rank residual.

    The output is ``base(x) + (alpha / rank) * B A x`` where ``A`` has shape
    (rank, in_features) initialized from N(0, 0.02^2) and ``B`` has shape
    (out_features, rank) initialized to zeros, so the wrapped layer starts
    out computing exactly what the base layer computes.
    """

    def __init__(self, base: nn.Linear, rank: int, alpha: int) -> None:
        super().__init__()
        self.base = base
        for param in self.base.parameters():
            param.requires_grad_(False)
        self.rank = rank
        self.scaling = alpha / rank
        self.lora_a = nn.Parameter(torch.empty(rank, base.in_features))
        self.lora_b = nn.Parameter(torch.zeros(base.out_features, rank))
        nn.init.normal_(self.lora_a, mean=0.0, std=0.02)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        down = nn.functional.linear(x, self.lora_a)
        up = nn.functional.linear(down, self.lora_b)
        return self.base(x) + up * self.scaling
