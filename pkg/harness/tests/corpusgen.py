"""Self-contained corpus, vocabulary, and lexicon fixtures.

Generates inputs for the dataset-builder CLI: sentences built around content
words that every word-level rewrite can change (voiced/voiceless letters,
inflection, derivation, hyponym and antonym coverage) inside templates the
grammar rewrite fires on, plus filler the eligibility filter rejects. The
vocabulary is synthesized from scratch: special tokens, single characters
with their continuation pieces, and the content words as whole entries.
"""

from __future__ import annotations

import json
import string
from pathlib import Path

WORDS = [
    "boots", "plants", "drinks", "stones", "papers", "gloves", "bottles",
    "candles", "gardens", "windows", "baskets", "ladders", "mirrors",
    "pillows", "carpets", "buttons", "ribbons", "saddles", "barrels",
    "kettles", "shovels", "blankets", "needles", "hammers", "anchors",
    "feathers", "marbles", "puddles", "turnips", "walnuts", "beetles",
    "spiders", "falcons", "rabbits", "turtles", "donkeys",
]


def sentence_for(i: int) -> str:
    w = WORDS[i % len(WORDS)]
    slot = i % 5
    if slot == 0:
        return f"There is not any {w} in bin {i}."
    if slot == 1:
        return f"He hasn't seen any {w} since day {i}."
    if slot == 2:
        return f"There are {w} near gate {i}."
    if slot == 3:
        return f"She did not want any {w} for stall {i}."
    return f"People walk home quietly on lane {i}."


def build_corpus(path: Path, n_sentences: int = 600, doc_size: int = 100) -> Path:
    with path.open("w", encoding="utf-8") as fh:
        for at in range(0, n_sentences, doc_size):
            text = " ".join(sentence_for(i) for i in range(at, at + doc_size))
            fh.write(json.dumps({"text": text}) + "\n")
    return path


def build_vocab(path: Path) -> Path:
    entries: list[str] = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    singles = list(string.ascii_lowercase) + list(string.ascii_uppercase) + \
        list(string.digits) + list(".,'!?-")
    entries.extend(singles)
    entries.extend("##" + ch for ch in string.ascii_lowercase)
    entries.extend("##" + ch for ch in string.digits)
    entries.extend(WORDS)
    path.write_text("\n".join(entries) + "\n", encoding="utf-8")
    return path


def build_lexicons(directory: Path) -> dict[str, Path]:
    directory.mkdir(parents=True, exist_ok=True)
    inflections = directory / "inflections.tsv"
    derivations = directory / "derivations.tsv"
    wordnet = directory / "wordnet.tsv"
    with inflections.open("w", encoding="utf-8") as fh:
        for w in WORDS:
            fh.write(f"{w[:-1]}\t{w}\tN;PL\n")
    with derivations.open("w", encoding="utf-8") as fh:
        for w in WORDS:
            fh.write(f"{w[:-1]}\t{w}\ts\tsuffix\n")
        # Two extra affixes so the suffix inventory has a non-trivial cycle.
        fh.write("slow\tslowly\tly\tsuffix\n")
        fh.write("kind\tkindness\tness\tsuffix\n")
    with wordnet.open("w", encoding="utf-8") as fh:
        for w in WORDS:
            fh.write(f"{w}\thyponym\t{w}let\n")
            fh.write(f"{w}\tantonym\tun{w}\n")
    return {"inflections": inflections, "derivations": derivations, "wordnet": wordnet}
