import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the synth helper module

from lingvar.interventions import LexiconSet
from lingvar.lexicons import (
    load_morphynet_derivations,
    load_morphynet_inflections,
    load_wordnet,
    parse_cycle_override,
)
from lingvar.wordpiece import load_vocab

import synth

DATA_DIR = Path(__file__).parent / "data"

# The full published base-cased vocabulary (28,996 entries) is not shipped
# with the repository.  Tests that want it look here, in order.
REAL_VOCAB_ENV = "LINGVAR_BERT_VOCAB"
REAL_VOCAB_CANDIDATES = [
    DATA_DIR / "bert-base-cased-vocab.txt",
    Path.home() / ".cache" / "lingvar" / "bert-base-cased-vocab.txt",
]


def find_real_vocab() -> Path | None:
    env = os.environ.get(REAL_VOCAB_ENV)
    if env and Path(env).is_file():
        return Path(env)
    for cand in REAL_VOCAB_CANDIDATES:
        if cand.is_file():
            return cand
    return None


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def excerpt_vocab():
    return load_vocab(DATA_DIR / "vocab_excerpt.txt")


@pytest.fixture(scope="session")
def reference_lexicons() -> LexiconSet:
    """The committed fixtures behind the documented rewrite examples."""
    override = parse_cycle_override(DATA_DIR / "cycle_override.tsv")
    return LexiconSet(
        inflections=load_morphynet_inflections(DATA_DIR / "inflections.tsv"),
        affixes=load_morphynet_derivations(DATA_DIR / "derivations.tsv", cycle_override=override),
        senses=load_wordnet(DATA_DIR / "wordnet.tsv"),
    )


class SynthEnv:
    """Paths of the generated synthetic corpus environment."""

    def __init__(self, root: Path):
        self.root = root
        self.corpus = root / "corpus.jsonl"
        self.vocab = root / "vocab.txt"
        lex = synth.build_lexicons(root / "lexicons")
        self.inflections = lex["inflections"]
        self.derivations = lex["derivations"]
        self.wordnet = lex["wordnet"]
        self.sentences = synth.build_corpus(self.corpus)
        synth.build_vocab(self.vocab, DATA_DIR / "vocab_excerpt.txt")

    def lexicon_set(self) -> LexiconSet:
        return LexiconSet(
            inflections=load_morphynet_inflections(self.inflections),
            affixes=load_morphynet_derivations(self.derivations),
            senses=load_wordnet(self.wordnet),
        )


@pytest.fixture(scope="session")
def synth_env(tmp_path_factory) -> SynthEnv:
    return SynthEnv(tmp_path_factory.mktemp("synth"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance criterion after the run."""
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
