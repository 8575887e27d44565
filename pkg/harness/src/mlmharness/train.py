"""Fine-tuning: masked-token cross-entropy over the adapter + head parameters.

AdamW with a linear decay-to-zero schedule; the learning rate comes from the
configured split size. The whole run is seeded: base-weight initialization,
adapter initialization, batch shuffling, and dropout draws all derive from
``HarnessConfig.seed``, so identical inputs produce identical checkpoints.
"""

from __future__ import annotations

import json
import math
import random
import shutil
import time
from dataclasses import dataclass
from pathlib import Path

import torch
from torch import nn

from .config import HarnessConfig, HarnessError
from .data import MaskedInstance, Vocab, encode_instance, gold_ids, load_vocab, read_dataset
from .model import MaskedWordModel

CONFIG_FILE = "config.json"
WEIGHTS_FILE = "weights.pt"
VOCAB_FILE = "vocab.txt"


@dataclass(frozen=True)
class TrainResult:
    checkpoint_dir: Path
    instances: int
    steps: int
    epoch_losses: tuple[float, ...]
    seconds: float


@dataclass(frozen=True)
class _Encoded:
    input_ids: list[int]
    positions: tuple[int, ...]
    gold: list[int]


def _encode_all(instances: list[MaskedInstance], vocab: Vocab,
                max_length: int) -> list[_Encoded]:
    return [
        _Encoded(input_ids=encode_instance(inst, vocab, max_length),
                 positions=inst.mask_positions,
                 gold=gold_ids(inst, vocab))
        for inst in instances
    ]


def _collate(batch: list[_Encoded], pad_id: int) -> tuple[torch.Tensor, ...]:
    width = max(len(item.input_ids) for item in batch)
    ids = torch.full((len(batch), width), pad_id, dtype=torch.long)
    mask = torch.zeros((len(batch), width), dtype=torch.long)
    rows: list[int] = []
    cols: list[int] = []
    gold: list[int] = []
    for r, item in enumerate(batch):
        ids[r, : len(item.input_ids)] = torch.tensor(item.input_ids, dtype=torch.long)
        mask[r, : len(item.input_ids)] = 1
        for pos, gid in zip(item.positions, item.gold):
            rows.append(r)
            cols.append(pos)
            gold.append(gid)
    return ids, mask, torch.tensor(rows), torch.tensor(cols), torch.tensor(gold)


def _batches(items: list[_Encoded], size: int) -> list[list[_Encoded]]:
    return [items[i : i + size] for i in range(0, len(items), size)]


def finetune(cfg: HarnessConfig, train_path: str | Path, vocab_path: str | Path,
             out_dir: str | Path) -> TrainResult:
    """Train adapters + head on one dataset file and write a checkpoint."""
    started = time.monotonic()
    vocab = load_vocab(vocab_path)
    instances = read_dataset(train_path)
    encoded = _encode_all(instances, vocab, cfg.max_length)

    torch.manual_seed(cfg.seed)
    model = MaskedWordModel(cfg, vocab)
    model.train()

    optimizer = torch.optim.AdamW(model.trainable_parameters(), lr=cfg.learning_rate)
    steps_per_epoch = math.ceil(len(encoded) / cfg.batch_size)
    total_steps = max(1, steps_per_epoch * cfg.epochs)
    scheduler = torch.optim.lr_scheduler.LambdaLR(
        optimizer, lambda step: max(0.0, (total_steps - step) / total_steps)
    )
    loss_fn = nn.CrossEntropyLoss()

    steps = 0
    epoch_losses: list[float] = []
    order = list(range(len(encoded)))
    for epoch in range(cfg.epochs):
        random.Random(f"{cfg.seed}-epoch-{epoch}").shuffle(order)
        epoch_total = 0.0
        epoch_count = 0
        for batch_indices in _batches(order, cfg.batch_size):
            batch = [encoded[i] for i in batch_indices]
            ids, mask, rows, cols, gold = _collate(batch, vocab.pad_id)
            logits = model(ids, mask)
            loss = loss_fn(logits[rows, cols], gold)
            if not torch.isfinite(loss):
                raise HarnessError(
                    f"non-finite training loss at epoch {epoch} step {steps}"
                )
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            scheduler.step()
            steps += 1
            epoch_total += loss.item() * len(gold)
            epoch_count += len(gold)
        epoch_losses.append(epoch_total / epoch_count)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {"config": cfg.to_dict(), "vocab_size": len(vocab)}
    (out_dir / CONFIG_FILE).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    torch.save(model.state_dict(), out_dir / WEIGHTS_FILE)
    shutil.copyfile(vocab_path, out_dir / VOCAB_FILE)
    return TrainResult(
        checkpoint_dir=out_dir,
        instances=len(instances),
        steps=steps,
        epoch_losses=tuple(epoch_losses),
        seconds=time.monotonic() - started,
    )


def load_checkpoint(checkpoint_dir: str | Path) -> tuple[MaskedWordModel, Vocab, HarnessConfig]:
    checkpoint_dir = Path(checkpoint_dir)
    config_path = checkpoint_dir / CONFIG_FILE
    if not config_path.exists():
        raise HarnessError(f"not a checkpoint directory (no {CONFIG_FILE}): {checkpoint_dir}")
    payload = json.loads(config_path.read_text(encoding="utf-8"))
    cfg = HarnessConfig.from_dict(payload["config"])
    vocab = load_vocab(checkpoint_dir / VOCAB_FILE)
    if len(vocab) != payload["vocab_size"]:
        raise HarnessError(
            f"checkpoint vocabulary has {len(vocab)} entries, config says "
            f"{payload['vocab_size']}: {checkpoint_dir}"
        )
    model = MaskedWordModel(cfg, vocab)
    state = torch.load(checkpoint_dir / WEIGHTS_FILE, weights_only=True)
    model.load_state_dict(state)
    model.eval()
    return model, vocab, cfg
