"""Top-k mask-filling prediction in the scorer's wire format.

For every mask position the k highest-scoring vocabulary tokens are emitted
in rank order; equal scores are broken by vocabulary index (lower id first).
Output records are ``{"id", "candidates"}`` with one ranked list per mask
position, in the input file's instance order. Evaluation is deterministic:
the same checkpoint and test file always produce byte-identical output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import torch

from .config import HarnessError
from .data import DataError, Vocab, encode_instance, read_dataset
from .train import load_checkpoint

DEFAULT_K = 5
_EVAL_BATCH = 32


@dataclass(frozen=True)
class PredictResult:
    output_path: Path
    instances: int
    positions: int


def _top_k_tokens(scores: torch.Tensor, vocab: Vocab, k: int) -> list[str]:
    # Stable descending sort keeps ties in original (vocabulary) order.
    ranked = torch.argsort(scores, descending=True, stable=True)[:k]
    return [vocab.tokens[int(idx)] for idx in ranked]


def predict(checkpoint_dir: str | Path, test_path: str | Path,
            out_path: str | Path, k: int = DEFAULT_K) -> PredictResult:
    model, vocab, cfg = load_checkpoint(checkpoint_dir)
    if k <= 0:
        raise HarnessError(f"k must be positive, got {k}")
    if k > len(vocab):
        raise HarnessError(f"k={k} exceeds the vocabulary size {len(vocab)}")
    instances = read_dataset(test_path)
    seen: set[str] = set()
    for inst in instances:
        if inst.id in seen:
            raise DataError(f"duplicate instance id {inst.id!r} in {test_path}")
        seen.add(inst.id)

    records: list[str] = []
    positions_total = 0
    model.eval()
    with torch.no_grad():
        for start in range(0, len(instances), _EVAL_BATCH):
            batch = instances[start : start + _EVAL_BATCH]
            encoded = [encode_instance(inst, vocab, cfg.max_length) for inst in batch]
            width = max(len(ids) for ids in encoded)
            ids = torch.full((len(batch), width), vocab.pad_id, dtype=torch.long)
            mask = torch.zeros((len(batch), width), dtype=torch.long)
            for r, row in enumerate(encoded):
                ids[r, : len(row)] = torch.tensor(row, dtype=torch.long)
                mask[r, : len(row)] = 1
            logits = model(ids, mask)
            for r, inst in enumerate(batch):
                candidates = [
                    _top_k_tokens(logits[r, pos], vocab, k)
                    for pos in inst.mask_positions
                ]
                positions_total += len(candidates)
                records.append(json.dumps(
                    {"id": inst.id, "candidates": candidates},
                    ensure_ascii=False, separators=(",", ":"),
                ))

    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text("".join(line + "\n" for line in records), encoding="utf-8")
    return PredictResult(output_path=out_path, instances=len(instances),
                         positions=positions_total)
