"""Synthetic linguistic variation for masked-language-model stress testing.

The package induces ten forms of linguistic variation in English text,
builds whole-word-masked fine-tuning and test sets from the results, and
scores prediction files with exact-match and top-k accuracy, including
baseline-relative reporting.
"""

__version__ = "0.1.0"

from .corpus import DataSplit, Sentence, SplitStats, WordToken, sample_split, split_sentences
from .interventions import InterventionKind, LexiconSet, apply_to_sentence
from .metrics import ScoreReport, best_k, exact_match, normalize_relative
from .wordpiece import SubwordSeq, Vocab, load_vocab, tokenize_word, tokenize_word_dropout

__all__ = [
    "__version__",
    "DataSplit",
    "Sentence",
    "SplitStats",
    "WordToken",
    "sample_split",
    "split_sentences",
    "InterventionKind",
    "LexiconSet",
    "apply_to_sentence",
    "ScoreReport",
    "best_k",
    "exact_match",
    "normalize_relative",
    "SubwordSeq",
    "Vocab",
    "load_vocab",
    "tokenize_word",
    "tokenize_word_dropout",
]
