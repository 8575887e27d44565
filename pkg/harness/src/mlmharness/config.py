"""Run configuration for fine-tuning and prediction."""

from __future__ import annotations

from dataclasses import asdict, dataclass

SPLIT_SIZES = ("S", "M", "L")
BASE_MODELS = ("monolingual", "multilingual")

# Learning rate is a function of the training split size, not a free knob.
_LEARNING_RATES = {"S": 7e-4, "M": 5e-4, "L": 5e-4}


class HarnessError(Exception):
    """Invalid configuration or run-level failure."""


@dataclass(frozen=True)
class HarnessConfig:
    """Settings for one fine-tuning run.

    ``rank``/``alpha`` shape the low-rank adapters; the learning rate is
    selected by ``split_size`` (7e-4 for S, 5e-4 for M and L); the schedule
    is a linear decay to zero and the optimizer is AdamW. Epoch count and
    batch size default to desk-scale values and are plain flags. The
    encoder-shape fields exist so small models can be trained on CPU; the
    base weights are randomly initialized and frozen.
    """

    base: str = "monolingual"
    split_size: str = "S"
    rank: int = 8
    alpha: int = 8
    epochs: int = 3
    batch_size: int = 16
    hidden_size: int = 128
    num_layers: int = 12
    num_heads: int = 2
    max_length: int = 512
    seed: int = 0

    def __post_init__(self) -> None:
        if self.base not in BASE_MODELS:
            raise HarnessError(
                f"unknown base model {self.base!r}; expected one of: {', '.join(BASE_MODELS)}"
            )
        if self.split_size not in SPLIT_SIZES:
            raise HarnessError(
                f"unknown split size {self.split_size!r}; expected one of: {', '.join(SPLIT_SIZES)}"
            )
        if self.rank <= 0:
            raise HarnessError(f"adapter rank must be positive, got {self.rank}")
        if self.alpha <= 0:
            raise HarnessError(f"adapter scaling alpha must be positive, got {self.alpha}")
        for name in ("epochs", "batch_size", "hidden_size", "num_layers", "num_heads",
                     "max_length"):
            if getattr(self, name) <= 0:
                raise HarnessError(f"{name} must be positive, got {getattr(self, name)}")
        if self.hidden_size % self.num_heads:
            raise HarnessError(
                f"hidden_size {self.hidden_size} is not divisible by num_heads {self.num_heads}"
            )

    @property
    def learning_rate(self) -> float:
        return _LEARNING_RATES[self.split_size]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "HarnessConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise HarnessError(f"unknown config fields: {', '.join(sorted(unknown))}")
        return cls(**data)
