"""Corpus handling: sentence segmentation, word tokenization, splits, stats.

Segmentation is deliberately rule based — a terminator scan with an
abbreviation list — so results are reproducible with no model dependency.
Word tokenization splits on whitespace and then on alphanumeric boundaries;
punctuation characters become individual tokens.  A token counts as a word
when ``str.isalpha`` holds for its surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .util import content_digest, read_jsonl, stable_rng

SPLIT_SIZES = {"S": 264, "M": 2641, "L": 26415}
MIN_SENTENCE_WORDS = 2

TERMINATORS = ".!?"
_CLOSERS = "\"')]}»”’"

# Trailing period after these (case-insensitive, final dot stripped) does not
# end a sentence.  Single letters and dotted initialisms are handled by rule.
DEFAULT_ABBREVIATIONS = frozenset({
    "mr", "mrs", "ms", "dr", "prof", "st", "jr", "sr", "rev", "hon",
    "gen", "col", "sgt", "capt", "lt", "cmdr", "gov", "sen", "rep",
    "vs", "etc", "approx", "dept", "est", "fig", "no", "vol", "pp",
    "inc", "ltd", "co", "corp", "univ", "assn", "bros",
    "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept",
    "oct", "nov", "dec", "mon", "tue", "wed", "thu", "fri", "sat", "sun",
    "e.g", "i.e", "cf", "al", "ca", "resp",
})


class CorpusError(ValueError):
    """Raised for unusable corpus inputs (sizes, formats, empty pools)."""


@dataclass(frozen=True)
class Sentence:
    """One segmented sentence with a content-derived stable id."""

    id: str
    text: str
    source: str

    def to_record(self) -> dict:
        return {"id": self.id, "text": self.text, "source": self.source}

    @staticmethod
    def from_record(rec: dict) -> "Sentence":
        try:
            return Sentence(id=str(rec["id"]), text=str(rec["text"]), source=str(rec["source"]))
        except KeyError as exc:
            raise CorpusError(f"sentence record missing field {exc}") from None


@dataclass(frozen=True)
class WordToken:
    """A surface token with its character span in the sentence."""

    surface: str
    start: int
    end: int

    @property
    def is_word(self) -> bool:
        return self.surface.isalpha()


@dataclass(frozen=True)
class DataSplit:
    """A named, seeded selection of sentence ids."""

    name: str
    seed: int
    ids: tuple[str, ...]

    def to_record(self) -> dict:
        return {"name": self.name, "seed": self.seed, "ids": list(self.ids)}

    @staticmethod
    def from_record(rec: dict) -> "DataSplit":
        try:
            return DataSplit(name=str(rec["name"]), seed=int(rec["seed"]), ids=tuple(rec["ids"]))
        except KeyError as exc:
            raise CorpusError(f"split record missing field {exc}") from None


@dataclass(frozen=True)
class SplitStats:
    """Descriptive statistics over words-per-sentence in a split."""

    name: str
    sentences: int
    words: int
    mean_words: float
    min_words: int
    max_words: int
    percentiles: dict[str, int]

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "sentences": self.sentences,
            "words": self.words,
            "mean_words": self.mean_words,
            "min_words": self.min_words,
            "max_words": self.max_words,
            "percentiles": dict(self.percentiles),
        }


def tokenize_words(text: str) -> list[WordToken]:
    """Split into word and punctuation tokens, preserving character spans.

    Whitespace separates chunks; inside a chunk, maximal alphanumeric runs
    become single tokens and every other character becomes its own token
    ("don't" -> ``don`` ``'`` ``t``).
    """
    tokens: list[WordToken] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isalnum():
            j = i + 1
            while j < n and text[j].isalnum():
                j += 1
            tokens.append(WordToken(text[i:j], i, j))
            i = j
        else:
            tokens.append(WordToken(ch, i, i + 1))
            i += 1
    return tokens


def count_words(text: str) -> int:
    return sum(1 for t in tokenize_words(text) if t.is_word)


def _abbreviation_before(text: str, dot_index: int, abbreviations: frozenset[str]) -> bool:
    """True when the period at ``dot_index`` follows an abbreviation token."""
    j = dot_index
    while j > 0 and (text[j - 1].isalpha() or text[j - 1] == "."):
        j -= 1
    token = text[j:dot_index]
    if not token or not token[0].isalpha():
        return False
    bare = token.rstrip(".").lower()
    if bare in abbreviations:
        return True
    if len(bare) == 1 and token[:1].isupper():  # middle initials: "J."
        return True
    # Dotted initialisms ("U.S.", "a.m"): letters joined by single dots.
    parts = bare.split(".")
    if len(parts) > 1 and all(len(p) == 1 for p in parts):
        return True
    return False


def _segment_offsets(text: str, abbreviations: frozenset[str]) -> list[tuple[int, int]]:
    """Half-open [start, end) spans of candidate sentences in ``text``."""
    spans: list[tuple[int, int]] = []
    n = len(text)
    start = 0
    i = 0
    while i < n:
        ch = text[i]
        if ch not in TERMINATORS:
            i += 1
            continue
        run_start = i
        while i < n and text[i] in TERMINATORS:
            i += 1
        end = i
        while end < n and text[end] in _CLOSERS:
            end += 1
        # A boundary needs trailing whitespace (or end of text).
        if end < n and not text[end].isspace():
            continue
        if text[run_start] == "." and i - run_start == 1 and _abbreviation_before(text, run_start, abbreviations):
            continue
        nxt = end
        while nxt < n and text[nxt].isspace():
            nxt += 1
        if nxt < n and text[nxt].islower():
            continue
        spans.append((start, end))
        start = nxt
        i = end
    if start < n and text[start:].strip():
        spans.append((start, n))
    return spans


def split_sentences(
    text: str,
    source: str = "train-pool",
    doc_ordinal: int = 0,
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS,
    min_words: int = MIN_SENTENCE_WORDS,
) -> list[Sentence]:
    """Segment document text into sentences and drop fragments.

    Sentences with fewer than ``min_words`` word tokens are discarded.  Ids
    combine the document ordinal with a digest of the whitespace-normalized
    sentence text; repeated sentences within one document get a numeric
    suffix so ids stay unique.
    """
    sentences: list[Sentence] = []
    seen: dict[str, int] = {}
    for block in text.split("\n\n"):
        for s_start, s_end in _segment_offsets(block, abbreviations):
            raw = block[s_start:s_end].strip()
            if not raw:
                continue
            if count_words(raw) < min_words:
                continue
            normalized = " ".join(raw.split())
            base = f"{doc_ordinal:04d}-{content_digest(normalized)}"
            bump = seen.get(base, 0)
            seen[base] = bump + 1
            sid = base if bump == 0 else f"{base}-{bump}"
            sentences.append(Sentence(id=sid, text=normalized, source=source))
    return sentences


def read_documents(path: str | Path) -> list[str]:
    """Load raw document texts.

    Accepts a directory of ``.txt`` files (sorted by name, one document
    each), a ``.jsonl`` file with a ``text`` field per line, or a plain text
    file where blank lines separate documents.
    """
    path = Path(path)
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.suffix == ".txt")
        if not files:
            raise CorpusError(f"no .txt documents found in directory {path}")
        return [p.read_text(encoding="utf-8") for p in files]
    if not path.exists():
        raise CorpusError(f"corpus path does not exist: {path}")
    if path.suffix == ".jsonl":
        docs = []
        for rec in read_jsonl(path):
            if "text" not in rec:
                raise CorpusError(f"{path}: document record missing 'text' field")
            docs.append(str(rec["text"]))
        if not docs:
            raise CorpusError(f"{path}: no documents")
        return docs
    blocks = [b for b in path.read_text(encoding="utf-8").split("\n\n") if b.strip()]
    if not blocks:
        raise CorpusError(f"{path}: no documents")
    return blocks


def assign_pools(doc_count: int, seed: int) -> tuple[list[int], list[int]]:
    """Shuffle document ordinals and reserve half for training, half for test.

    With an odd count the training pool receives the extra document.
    """
    if doc_count < 2:
        raise CorpusError(f"need at least 2 documents to form pools, got {doc_count}")
    ordinals = list(range(doc_count))
    stable_rng(seed, "pool-assignment").shuffle(ordinals)
    cut = (doc_count + 1) // 2
    return sorted(ordinals[:cut]), sorted(ordinals[cut:])


def sample_split(pool: list[Sentence], size_name: str, seed: int) -> DataSplit:
    """Draw a named fixed-size split from the pool.

    Sizes are fixed (S=264, M=2641, L=26415); an undersized pool is an error
    rather than a silent truncation.  Candidates are sorted by id before the
    seeded draw, so the result is invariant to the order sentences arrive in.
    """
    try:
        size = SPLIT_SIZES[size_name]
    except KeyError:
        raise CorpusError(f"unknown split size {size_name!r}; expected one of {sorted(SPLIT_SIZES)}") from None
    ids = sorted(s.id for s in pool)
    if len(set(ids)) != len(ids):
        raise CorpusError("sentence pool contains duplicate ids")
    if len(ids) < size:
        raise CorpusError(
            f"split {size_name} requires {size} sentences but the pool has only {len(ids)}"
        )
    rng = stable_rng(seed, "split-sample", size_name)
    chosen = rng.sample(ids, size)
    return DataSplit(name=size_name, seed=seed, ids=tuple(sorted(chosen)))


def _nearest_rank(sorted_values: list[int], pct: float) -> int:
    """Nearest-rank percentile: smallest value with at least pct% mass below-or-at."""
    n = len(sorted_values)
    rank = max(1, math.ceil(pct / 100.0 * n))
    return sorted_values[rank - 1]


def compute_stats(split: DataSplit, sentences_by_id: dict[str, Sentence]) -> SplitStats:
    """Words-per-sentence statistics for a split (nearest-rank percentiles)."""
    counts = []
    for sid in split.ids:
        try:
            sent = sentences_by_id[sid]
        except KeyError:
            raise CorpusError(f"split {split.name} references unknown sentence id {sid}") from None
        counts.append(count_words(sent.text))
    if not counts:
        raise CorpusError(f"split {split.name} is empty")
    ordered = sorted(counts)
    return SplitStats(
        name=split.name,
        sentences=len(counts),
        words=sum(counts),
        mean_words=round(sum(counts) / len(counts), 2),
        min_words=ordered[0],
        max_words=ordered[-1],
        percentiles={f"p{p}": _nearest_rank(ordered, p) for p in (25, 50, 75, 90, 99)},
    )
