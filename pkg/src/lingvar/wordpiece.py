"""Greedy longest-match-first subword tokenization with continuation markers.

The segmenter matches the published uncapitalized behaviour of the standard
BERT-style WordPiece algorithm: at each position take the longest vocabulary
entry (pieces after the first carry a ``##`` prefix); if no entry matches,
the whole word becomes the unknown token.  A dropout variant randomly removes
multi-character entries from the effective vocabulary per call, which splits
words into smaller pieces while keeping every output piece a real vocabulary
entry.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

MARKER = "##"
UNK_TOKEN = "[UNK]"
MASK_TOKEN = "[MASK]"
MAX_WORD_CHARS = 100


class VocabError(ValueError):
    """Raised for unreadable, empty or duplicated vocabulary files."""


@dataclass(frozen=True)
class Vocab:
    """An ordered subword vocabulary with O(1) membership tests."""

    tokens: tuple[str, ...]
    index: dict[str, int] = field(repr=False)
    marker: str = MARKER
    unk_token: str = UNK_TOKEN

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def __len__(self) -> int:
        return len(self.tokens)

    def piece_body(self, token: str) -> str:
        """The piece with any continuation marker stripped."""
        if token.startswith(self.marker):
            return token[len(self.marker):]
        return token


def make_vocab(tokens: list[str] | tuple[str, ...]) -> Vocab:
    index: dict[str, int] = {}
    for i, tok in enumerate(tokens):
        if tok in index:
            raise VocabError(f"duplicate vocabulary entry {tok!r} (lines {index[tok] + 1} and {i + 1})")
        index[tok] = i
    if not index:
        raise VocabError("vocabulary is empty")
    return Vocab(tokens=tuple(tokens), index=index)


def load_vocab(path: str | Path) -> Vocab:
    """Load a one-token-per-line vocabulary file.

    Line order defines token ids.  Blank lines and duplicates are errors:
    silent renumbering would corrupt every downstream id.
    """
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise VocabError(f"cannot read vocabulary file {path}: {exc}") from None
    tokens: list[str] = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        tok = line.strip()
        if not tok:
            raise VocabError(f"{path}:{lineno}: blank vocabulary line")
        tokens.append(tok)
    return make_vocab(tokens)


@dataclass(frozen=True)
class SubwordSeq:
    """Subword pieces for one word plus the word they came from."""

    pieces: tuple[str, ...]
    word: str

    def __len__(self) -> int:
        return len(self.pieces)

    def surface(self, marker: str = MARKER) -> str:
        """Concatenate pieces with continuation markers stripped."""
        out = [self.pieces[0] if self.pieces else ""]
        for p in self.pieces[1:]:
            out.append(p[len(marker):] if p.startswith(marker) else p)
        return "".join(out)

    @property
    def is_unknown(self) -> bool:
        return len(self.pieces) == 1 and self.pieces[0] == UNK_TOKEN


def tokenize_word(word: str, vocab: Vocab) -> SubwordSeq:
    """Greedy longest-match segmentation of a single word.

    Words longer than :data:`MAX_WORD_CHARS` map to the unknown token, as
    does any word with an unmatchable residue.
    """
    if not word:
        raise ValueError("cannot tokenize an empty word")
    return _segment(word, vocab, lambda piece: piece in vocab)


def tokenize_word_dropout(
    word: str,
    vocab: Vocab,
    p: float,
    rng: random.Random,
) -> SubwordSeq:
    """Segment ``word`` while dropping multi-character entries with prob. ``p``.

    Each multi-character vocabulary entry is kept or dropped once per call
    (the first time the matcher asks about it) so repeated queries within one
    segmentation are consistent.  Single-character entries, with or without
    the continuation marker, are never dropped, which keeps every letter
    representable: with ``p == 0`` the output equals :func:`tokenize_word`,
    with ``p == 1`` every in-vocabulary word splits into single characters.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"dropout probability must be in [0, 1], got {p!r}")
    if not word:
        raise ValueError("cannot tokenize an empty word")
    drawn: dict[str, bool] = {}

    def available(piece: str) -> bool:
        if piece not in vocab:
            return False
        body = piece[len(vocab.marker):] if piece.startswith(vocab.marker) else piece
        if len(body) <= 1:
            return True
        if piece not in drawn:
            drawn[piece] = rng.random() >= p
        return drawn[piece]

    return _segment(word, vocab, available)


def _segment(word: str, vocab: Vocab, available) -> SubwordSeq:
    if len(word) > MAX_WORD_CHARS:
        return SubwordSeq((vocab.unk_token,), word)
    pieces: list[str] = []
    start = 0
    while start < len(word):
        end = len(word)
        match = None
        while start < end:
            piece = word[start:end]
            if start > 0:
                piece = vocab.marker + piece
            if available(piece):
                match = piece
                break
            end -= 1
        if match is None:
            return SubwordSeq((vocab.unk_token,), word)
        pieces.append(match)
        start = end
    return SubwordSeq(tuple(pieces), word)
