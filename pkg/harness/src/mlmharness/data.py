"""Readers for the dataset wire formats and the subword vocabulary.

Dataset files are JSONL with flat subword ``tokens`` carrying ``[MASK]`` at
``mask_positions`` and the replaced subwords in ``gold_tokens``; they arrive
already masked, so nothing here re-masks. Any dataset token absent from the
model vocabulary is a hard error (a vocabulary mismatch means the dataset
was built against a different subword inventory).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

MASK_TOKEN = "[MASK]"
PAD_TOKEN = "[PAD]"


class DataError(Exception):
    """Malformed dataset, prediction, or vocabulary input."""


@dataclass(frozen=True)
class Vocab:
    """Subword vocabulary: file order defines the token ids."""

    tokens: tuple[str, ...]
    index: dict[str, int]

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def mask_id(self) -> int:
        return self.index[MASK_TOKEN]

    @property
    def pad_id(self) -> int:
        return self.index[PAD_TOKEN]

    def id_of(self, token: str) -> int:
        try:
            return self.index[token]
        except KeyError:
            raise DataError(
                f"vocabulary mismatch: token {token!r} is not in the model vocabulary"
            ) from None


def load_vocab(path: str | Path) -> Vocab:
    path = Path(path)
    if not path.exists():
        raise DataError(f"vocabulary path does not exist: {path}")
    tokens: list[str] = []
    index: dict[str, int] = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            token = line.rstrip("\n")
            if not token:
                continue
            if token in index:
                raise DataError(f"{path}:{lineno}: duplicate vocabulary entry {token!r}")
            index[token] = len(tokens)
            tokens.append(token)
    if not tokens:
        raise DataError(f"vocabulary file is empty: {path}")
    for required in (MASK_TOKEN, PAD_TOKEN):
        if required not in index:
            raise DataError(f"vocabulary is missing the required token {required!r}: {path}")
    return Vocab(tokens=tuple(tokens), index=index)


@dataclass(frozen=True)
class MaskedInstance:
    """One masked-prediction instance, as emitted by the dataset builder."""

    id: str
    tokens: tuple[str, ...]
    mask_positions: tuple[int, ...]
    gold_tokens: tuple[str, ...]

    @classmethod
    def from_record(cls, record: dict, where: str) -> "MaskedInstance":
        for key in ("id", "tokens", "mask_positions", "gold_tokens"):
            if key not in record:
                raise DataError(f"{where}: instance record missing field {key!r}")
        tokens = tuple(record["tokens"])
        positions = tuple(record["mask_positions"])
        gold = tuple(record["gold_tokens"])
        if len(positions) != len(gold):
            raise DataError(
                f"{where}: instance {record['id']!r} has {len(positions)} mask positions "
                f"but {len(gold)} gold tokens"
            )
        if not positions:
            raise DataError(f"{where}: instance {record['id']!r} has no mask positions")
        for pos in positions:
            if not isinstance(pos, int) or not 0 <= pos < len(tokens):
                raise DataError(
                    f"{where}: instance {record['id']!r} mask position {pos!r} is out of range"
                )
            if tokens[pos] != MASK_TOKEN:
                raise DataError(
                    f"{where}: instance {record['id']!r} has {tokens[pos]!r} at mask "
                    f"position {pos}, expected {MASK_TOKEN!r}"
                )
        return cls(id=str(record["id"]), tokens=tokens, mask_positions=positions,
                   gold_tokens=gold)


def read_dataset(path: str | Path) -> list[MaskedInstance]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"dataset path does not exist: {path}")
    instances: list[MaskedInstance] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"{path}:{lineno}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{where}: invalid JSON: {exc}") from None
            if not isinstance(record, dict):
                raise DataError(f"{where}: expected a JSON object")
            instances.append(MaskedInstance.from_record(record, where))
    if not instances:
        raise DataError(f"dataset file is empty: {path}")
    return instances


def encode_instance(inst: MaskedInstance, vocab: Vocab, max_length: int) -> list[int]:
    """Token ids for one instance; any unknown token is a vocabulary mismatch."""
    if len(inst.tokens) > max_length:
        raise DataError(
            f"instance {inst.id!r} has {len(inst.tokens)} tokens, longer than the "
            f"model maximum of {max_length}"
        )
    return [vocab.id_of(tok) for tok in inst.tokens]


def gold_ids(inst: MaskedInstance, vocab: Vocab) -> list[int]:
    return [vocab.id_of(tok) for tok in inst.gold_tokens]
