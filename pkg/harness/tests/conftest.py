"""Shared fixtures: dataset files produced by driving the `lingvar` CLI."""

from __future__ import annotations

import os
import shutil
import subprocess
import sys
from dataclasses import dataclass
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import corpusgen  # noqa: E402


def run_lingvar(*args: str, env: dict | None = None) -> subprocess.CompletedProcess:
    """Invoke the dataset-builder CLI; its console script must be installed."""
    if shutil.which("lingvar") is None:
        raise RuntimeError("the 'lingvar' console script is not installed")
    merged = dict(os.environ)
    if env:
        merged.update(env)
    proc = subprocess.run(["lingvar", *args], capture_output=True, text=True, env=merged)
    if proc.returncode != 0:
        raise RuntimeError(
            f"lingvar {' '.join(args)} failed ({proc.returncode}): {proc.stderr.strip()}"
        )
    return proc


@dataclass(frozen=True)
class Fixture:
    root: Path
    out: Path
    vocab: Path
    train64: Path
    test64: Path
    test3: Path
    lexicon_env: dict


def _slice_jsonl(src: Path, dst: Path, n: int) -> None:
    lines = src.read_text(encoding="utf-8").splitlines()
    if len(lines) < n:
        raise RuntimeError(f"{src} has only {len(lines)} records, need {n}")
    dst.write_text("".join(line + "\n" for line in lines[:n]), encoding="utf-8")


@pytest.fixture(scope="session")
def fixture(tmp_path_factory) -> Fixture:
    """Build 64-instance train/test files through the dataset-builder CLI."""
    root = tmp_path_factory.mktemp("dataset-fixture")
    corpus = corpusgen.build_corpus(root / "corpus.jsonl")
    vocab = corpusgen.build_vocab(root / "vocab.txt")
    corpusgen.build_lexicons(root / "lex")
    env = {"LINGVAR_LEXICON_ROOT": str(root / "lex")}
    out = root / "out"
    run_lingvar("split", "--corpus", str(corpus), "--out", str(out),
                "--seed", "3", "--size", "S", env=env)
    run_lingvar("mask", "--kind", "IPA", "--composition", "mixed",
                "--vocab", str(vocab), "--out", str(out), "--seed", "3", env=env)
    run_lingvar("testset", "--vocab", str(vocab), "--sample", "120",
                "--out", str(out), "--seed", "3", env=env)
    train64 = root / "train64.jsonl"
    test64 = root / "test64.jsonl"
    test3 = root / "test3.jsonl"
    _slice_jsonl(out / "train_S_IPA_mixed.jsonl", train64, 64)
    _slice_jsonl(out / "test_IPA.jsonl", test64, 64)
    _slice_jsonl(out / "test_IPA.jsonl", test3, 3)
    return Fixture(root=root, out=out, vocab=vocab, train64=train64,
                   test64=test64, test3=test3, lexicon_env=env)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance criterion after the run."""
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
