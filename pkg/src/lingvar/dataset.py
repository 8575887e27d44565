"""Masked-language-model dataset construction.

Each instance masks exactly one word per sentence, whole-word style: every
subword piece of the chosen word becomes the mask token and the original
pieces are kept as gold labels.  Training sets come in two compositions —
``mixed`` applies the intervention to a seeded half of the sentences (the
rest stay unmodified), ``full`` applies it everywhere.  Test sets apply one
intervention per emitted file to sentences filtered for eligibility: the
chosen word must change under all nine word-level rewrites and the sentence
must change under the sentence-level rewrite, so every intervention is
guaranteed to be visible at test time.  The same word index is masked for a
sentence across all kinds, which keeps scores comparable column to column.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .corpus import DataSplit, Sentence, tokenize_words
from .interventions import (
    InterventionKind,
    KIND_ORDER,
    LexiconSet,
    TOKEN_KINDS,
    WORD_KINDS,
    apply_to_sentence,
    multi_lite,
    transform_word,
)
from .util import read_jsonl, stable_rng, write_jsonl
from .wordpiece import MASK_TOKEN, Vocab, tokenize_word

MIXED_NAME = "mixed"
FULL_NAME = "full"
COMPOSITIONS = (MIXED_NAME, FULL_NAME)
TEST_SPLIT_NAME = "test"


class DatasetError(ValueError):
    """Raised for domain violations while building or reading datasets."""


@dataclass(frozen=True)
class MaskedInstance:
    """One masked sentence: full token sequence, mask span, gold pieces."""

    id: str
    split: str
    kind: str
    composition: str
    tokens: tuple[str, ...]
    mask_positions: tuple[int, ...]
    gold_tokens: tuple[str, ...]
    masked_word_index: int
    applied: bool

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "split": self.split,
            "kind": self.kind,
            "composition": self.composition,
            "tokens": list(self.tokens),
            "mask_positions": list(self.mask_positions),
            "gold_tokens": list(self.gold_tokens),
            "masked_word_index": self.masked_word_index,
            "applied": self.applied,
        }

    @staticmethod
    def from_record(rec: dict) -> "MaskedInstance":
        try:
            inst = MaskedInstance(
                id=str(rec["id"]),
                split=str(rec["split"]),
                kind=str(rec["kind"]),
                composition=str(rec["composition"]),
                tokens=tuple(rec["tokens"]),
                mask_positions=tuple(int(p) for p in rec["mask_positions"]),
                gold_tokens=tuple(rec["gold_tokens"]),
                masked_word_index=int(rec["masked_word_index"]),
                applied=bool(rec.get("applied", True)),
            )
        except KeyError as exc:
            raise DatasetError(f"instance record missing field {exc}") from None
        _check_instance(inst)
        return inst


def _check_instance(inst: MaskedInstance) -> None:
    if not inst.mask_positions:
        raise DatasetError(f"instance {inst.id}: empty mask span")
    if len(inst.mask_positions) != len(inst.gold_tokens):
        raise DatasetError(f"instance {inst.id}: mask span and gold tokens disagree")
    for pos in inst.mask_positions:
        if not 0 <= pos < len(inst.tokens):
            raise DatasetError(f"instance {inst.id}: mask position {pos} out of range")
        if inst.tokens[pos] != MASK_TOKEN:
            raise DatasetError(f"instance {inst.id}: position {pos} is not masked")
    span = list(inst.mask_positions)
    if span != list(range(span[0], span[0] + len(span))):
        raise DatasetError(f"instance {inst.id}: mask positions are not contiguous")


@dataclass(frozen=True)
class TestSet:
    """Per-kind instances plus bookkeeping from the eligibility filter."""

    instances: dict[str, tuple[MaskedInstance, ...]]
    sampled: int
    retained: int
    dropped_multi: int
    masked_word_by_id: dict[str, int] = field(default_factory=dict)


def _subword_layout(text: str, vocab: Vocab) -> tuple[list[tuple[str, ...]], list[int]]:
    """Subword groups for every surface token plus indices of word groups."""
    groups: list[tuple[str, ...]] = []
    word_group_indices: list[int] = []
    for i, tok in enumerate(tokenize_words(text)):
        groups.append(tokenize_word(tok.surface, vocab).pieces)
        if tok.is_word:
            word_group_indices.append(i)
    return groups, word_group_indices


def _mask_word(
    groups: list[tuple[str, ...]],
    word_group_indices: list[int],
    word_ordinal: int,
    sentence_id: str,
) -> tuple[tuple[str, ...], tuple[int, ...], tuple[str, ...]]:
    if word_ordinal >= len(word_group_indices):
        raise DatasetError(
            f"sentence {sentence_id}: word index {word_ordinal} out of range "
            f"({len(word_group_indices)} words)"
        )
    target_group = word_group_indices[word_ordinal]
    tokens: list[str] = []
    mask_positions: list[int] = []
    gold: list[str] = []
    for gi, group in enumerate(groups):
        if gi == target_group:
            gold.extend(group)
            for _ in group:
                mask_positions.append(len(tokens))
                tokens.append(MASK_TOKEN)
        else:
            tokens.extend(group)
    if not gold:
        raise DatasetError(f"sentence {sentence_id}: masked word produced no subword pieces")
    return tuple(tokens), tuple(mask_positions), tuple(gold)


def _build_instance(
    sentence: Sentence,
    kind: InterventionKind,
    word_ordinal: int,
    split_name: str,
    composition: str,
    applied: bool,
    vocab: Vocab,
    lexicons: LexiconSet,
    seed: int,
    dropout_p: float,
) -> MaskedInstance:
    effective = kind if applied else InterventionKind.NONE
    transformed = apply_to_sentence(
        effective, sentence, lexicons=lexicons, vocab=vocab, seed=seed, dropout_p=dropout_p,
    )
    if transformed.token_groups is not None:
        groups = list(transformed.token_groups)
        word_group_indices = [
            i for i, tok in enumerate(tokenize_words(sentence.text)) if tok.is_word
        ]
    else:
        assert transformed.text is not None
        groups, word_group_indices = _subword_layout(transformed.text, vocab)
    tokens, mask_positions, gold = _mask_word(groups, word_group_indices, word_ordinal, sentence.id)
    return MaskedInstance(
        id=sentence.id,
        split=split_name,
        kind=kind.value,
        composition=composition,
        tokens=tokens,
        mask_positions=mask_positions,
        gold_tokens=gold,
        masked_word_index=word_ordinal,
        applied=applied,
    )


def _pick_word_ordinal(sentence: Sentence, seed: int) -> int:
    """The word (by ordinal among word tokens) to mask in this sentence.

    Keyed by sentence id only, so the same word is masked for a sentence no
    matter which kind or composition is being built.
    """
    n_words = sum(1 for t in tokenize_words(sentence.text) if t.is_word)
    if n_words == 0:
        raise DatasetError(f"sentence {sentence.id} has no word tokens to mask")
    return stable_rng(seed, "mask-word", sentence.id).randrange(n_words)


def build_training_set(
    split: DataSplit,
    sentences_by_id: dict[str, Sentence],
    kind: InterventionKind,
    composition: str,
    vocab: Vocab,
    lexicons: LexiconSet | None = None,
    seed: int = 0,
    dropout_p: float = 0.5,
) -> list[MaskedInstance]:
    """Build one masked training set for (split, kind, composition).

    ``mixed`` applies the intervention to a seeded floor-half of the split's
    sentences; ``full`` applies it to all of them.  One word is masked per
    sentence; instances come out ordered by sentence id.
    """
    if composition not in COMPOSITIONS:
        raise DatasetError(f"unknown composition {composition!r}; expected one of {COMPOSITIONS}")
    lex = lexicons or LexiconSet()
    ids = sorted(split.ids)
    missing = [sid for sid in ids if sid not in sentences_by_id]
    if missing:
        raise DatasetError(f"split {split.name} references unknown sentence ids, e.g. {missing[:3]}")
    if kind is InterventionKind.NONE:
        applied_ids: set[str] = set()
    elif composition == MIXED_NAME:
        rng = stable_rng(seed, "composition", split.name, kind.value)
        applied_ids = set(rng.sample(ids, len(ids) // 2))
    else:
        applied_ids = set(ids)
    instances = []
    for sid in ids:
        sentence = sentences_by_id[sid]
        ordinal = _pick_word_ordinal(sentence, seed)
        instances.append(
            _build_instance(
                sentence, kind, ordinal, split.name, composition,
                applied=sid in applied_ids, vocab=vocab, lexicons=lex,
                seed=seed, dropout_p=dropout_p,
            )
        )
    return instances


def eligible_word_ordinals(sentence: Sentence, lexicons: LexiconSet) -> list[int]:
    """Word ordinals that change under every word-level rewrite.

    Resegmentation eligibility is structural: a word of length >= 2 always
    resegments under the character split, and can resegment under dropout.
    """
    out = []
    ordinal = -1
    for tok in tokenize_words(sentence.text):
        if not tok.is_word:
            continue
        ordinal += 1
        word = tok.surface
        if len(word) < 2:
            continue
        if all(
            transform_word(kind, word, lexicons).changed
            for kind in WORD_KINDS
            if kind not in TOKEN_KINDS
        ):
            out.append(ordinal)
    return out


def build_test_set(
    pool: list[Sentence],
    sample_size: int,
    vocab: Vocab,
    lexicons: LexiconSet,
    seed: int = 0,
    dropout_p: float = 0.5,
    kinds: tuple[InterventionKind, ...] = KIND_ORDER,
) -> TestSet:
    """Sample test sentences, filter for eligibility, and mask across kinds.

    From the held-out pool, ``sample_size`` sentences are drawn (sorted by
    id first, so the draw is order-invariant).  A sentence is retained only
    if at least one word changes under all nine word-level rewrites and the
    sentence changes under the sentence-level rewrite.  One eligible word is
    chosen per sentence and that same index is masked for every kind.  For
    the sentence-level kind, an instance whose chosen word was itself
    rewritten is dropped and counted instead of silently kept.
    """
    ids = sorted({s.id for s in pool})
    if len(ids) != len(pool):
        raise DatasetError("test pool contains duplicate sentence ids")
    if sample_size > len(ids):
        raise DatasetError(
            f"test sample of {sample_size} requested but the pool has only {len(ids)} sentences"
        )
    if sample_size <= 0:
        raise DatasetError("test sample size must be positive")
    by_id = {s.id: s for s in pool}
    sampled_ids = sorted(stable_rng(seed, "testset-sample").sample(ids, sample_size))

    chosen_word: dict[str, int] = {}
    for sid in sampled_ids:
        sentence = by_id[sid]
        if not multi_lite(sentence.text).changed:
            continue
        candidates = eligible_word_ordinals(sentence, lexicons)
        if not candidates:
            continue
        chosen_word[sid] = stable_rng(seed, "testset-word", sid).choice(candidates)

    dropped_multi = 0
    instances: dict[str, list[MaskedInstance]] = {k.value: [] for k in kinds}
    for sid in sorted(chosen_word):
        sentence = by_id[sid]
        ordinal = chosen_word[sid]
        for kind in kinds:
            if kind is InterventionKind.MULTI and _multi_rewrote_word(sentence, ordinal):
                dropped_multi += 1
                continue
            instances[kind.value].append(
                _build_instance(
                    sentence, kind, ordinal, TEST_SPLIT_NAME, FULL_NAME,
                    applied=kind is not InterventionKind.NONE,
                    vocab=vocab, lexicons=lexicons, seed=seed, dropout_p=dropout_p,
                )
            )
    return TestSet(
        instances={k: tuple(v) for k, v in instances.items()},
        sampled=len(sampled_ids),
        retained=len(chosen_word),
        dropped_multi=dropped_multi,
        masked_word_by_id=dict(chosen_word),
    )


def _multi_rewrote_word(sentence: Sentence, word_ordinal: int) -> bool:
    """True when the sentence-level rewrite altered the chosen word itself.

    The chosen word survives only if the rewritten sentence still has the
    same surface at the same word ordinal.
    """
    before = [t.surface for t in tokenize_words(sentence.text) if t.is_word]
    after_text = multi_lite(sentence.text).output
    after = [t.surface for t in tokenize_words(after_text) if t.is_word]
    if word_ordinal >= len(after):
        return True
    return before[word_ordinal] != after[word_ordinal]


def emit_dataset(instances: list[MaskedInstance], path: str | Path) -> int:
    """Write instances as JSONL, ordered by (sentence id, kind)."""
    kind_rank = {k.value: i for i, k in enumerate(KIND_ORDER)}
    ordered = sorted(instances, key=lambda m: (m.id, kind_rank.get(m.kind, len(kind_rank))))
    return write_jsonl(path, (m.to_record() for m in ordered))


def load_dataset(path: str | Path) -> list[MaskedInstance]:
    instances = [MaskedInstance.from_record(rec) for rec in read_jsonl(path)]
    if not instances:
        raise DatasetError(f"{path}: dataset file is empty")
    return instances
