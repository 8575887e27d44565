"""Pipeline stages gluing corpus, lexicons, interventions, datasets, metrics.

Each stage validates its slice of :class:`RunConfig`, does exactly one unit
of work, writes its outputs under the configured directory, and returns a
JSON-serializable summary.  All stages are deterministic for a given config
and inputs: files are written in canonical order with no timestamps, so
rerunning a stage overwrites its outputs with identical bytes.  Every stage
also drops a ``<stage>.meta.json`` sidecar recording the seed and parameters
it ran with.
"""

from __future__ import annotations

import os
import shlex
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from functools import lru_cache
from pathlib import Path

from . import corpus as corpus_mod
from . import dataset as dataset_mod
from . import metrics as metrics_mod
from .corpus import DataSplit, Sentence
from .interventions import (
    InterventionKind,
    KIND_ORDER,
    LexiconSet,
    apply_to_sentence,
    parse_kind,
    run_sentence_plugin,
)
from .lexicons import (
    load_morphynet_derivations,
    load_morphynet_inflections,
    load_wordnet,
    parse_cycle_override,
)
from .metrics import CellKey, ScoreReport, emit_report, load_predictions, load_report, score_all
from .util import read_jsonl, write_json, write_jsonl
from .wordpiece import Vocab, load_vocab

LEXICON_ROOT_ENV = "LINGVAR_LEXICON_ROOT"
DEFAULT_TEST_SAMPLE = 10000


class PipelineError(ValueError):
    """Raised for invalid configuration or unusable stage inputs."""


@dataclass
class RunConfig:
    """Settings shared by all pipeline stages; stages use the slice they need.

    Unset paths fall back to conventional names under ``out`` (for files an
    earlier stage produced) or under the ``LINGVAR_LEXICON_ROOT`` directory
    (for lexical resources).
    """

    corpus: str | None = None
    sentences: str | None = None
    splits: str | None = None
    vocab: str | None = None
    inflections: str | None = None
    derivations: str | None = None
    wordnet: str | None = None
    cycle_override: str | None = None
    pred: str | None = None
    gold: str | None = None
    report: str | None = None
    plugin: str | None = None
    out: str = "out"
    seed: int = 0
    kind: str | None = None
    composition: str | None = None
    size: str | None = None
    dropout: float = 0.5
    workers: int = 1
    sample: int = DEFAULT_TEST_SAMPLE
    model: str = "model"

    @staticmethod
    def field_names() -> tuple[str, ...]:
        return tuple(f.name for f in fields(RunConfig))


def parse_config_file(path: str | Path) -> dict:
    """Parse a flat ``key=value`` config file (``#`` comments, blank lines ok)."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise PipelineError(f"cannot read config file {path}: {exc}") from None
    known = set(RunConfig.field_names())
    out: dict = {}
    for lineno, line in enumerate(raw.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise PipelineError(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key not in known:
            raise PipelineError(f"{path}:{lineno}: unknown config key {key!r}")
        if key in ("seed", "workers", "sample"):
            out[key] = int(value)
        elif key == "dropout":
            out[key] = float(value)
        else:
            out[key] = value
    return out


def _require(cfg: RunConfig, name: str, stage: str) -> str:
    value = getattr(cfg, name)
    if value in (None, ""):
        raise PipelineError(f"stage {stage!r} requires --{name.replace('_', '-')}")
    return value


def _existing_path(value: str, what: str) -> Path:
    path = Path(value)
    if not path.exists():
        raise PipelineError(f"{what} path does not exist: {path}")
    return path


def _lexicon_root_default(name: str) -> str | None:
    root = os.environ.get(LEXICON_ROOT_ENV)
    if not root:
        return None
    candidates = {
        "inflections": ["inflections.tsv"],
        "derivations": ["derivations.tsv"],
        "wordnet": ["wordnet", "wordnet.tsv"],
        "cycle_override": ["cycle_override.tsv"],
    }[name]
    for cand in candidates:
        p = Path(root) / cand
        if p.exists():
            return str(p)
    return None


def _out_default(cfg: RunConfig, filename: str) -> str:
    return str(Path(cfg.out) / filename)


@lru_cache(maxsize=8)
def _cached_vocab(path: str, mtime_ns: int, size: int) -> Vocab:
    return load_vocab(path)


def _load_vocab(cfg: RunConfig, stage: str) -> Vocab:
    path = _existing_path(_require(cfg, "vocab", stage), "vocabulary")
    st = path.stat()
    return _cached_vocab(str(path), st.st_mtime_ns, st.st_size)


@lru_cache(maxsize=8)
def _cached_lexicons(
    inflections: str | None,
    derivations: str | None,
    wordnet: str | None,
    cycle_override: str | None,
    stamp: tuple,
) -> LexiconSet:
    override = parse_cycle_override(cycle_override) if cycle_override else None
    return LexiconSet(
        inflections=load_morphynet_inflections(inflections) if inflections else None,
        affixes=load_morphynet_derivations(derivations, cycle_override=override) if derivations else None,
        senses=load_wordnet(wordnet) if wordnet else None,
    )


def load_lexicons(cfg: RunConfig, required: bool = True, stage: str = "") -> LexiconSet:
    """Resolve and load lexical resources, honoring the env-root default.

    With ``required`` the three resource families must all resolve; without
    it, whatever is configured gets loaded and the rest stay ``None``.
    """
    paths: dict[str, str | None] = {}
    for name in ("inflections", "derivations", "wordnet", "cycle_override"):
        value = getattr(cfg, name) or _lexicon_root_default(name)
        if value is not None:
            _existing_path(value, name.replace("_", " "))
        paths[name] = value
    if required:
        for name in ("inflections", "derivations", "wordnet"):
            if paths[name] is None:
                raise PipelineError(
                    f"stage {stage!r} needs the {name} resource: pass --{name.replace('_', '-')} "
                    f"or set {LEXICON_ROOT_ENV}"
                )
    stamp = tuple(
        (p, Path(p).stat().st_mtime_ns) if p and Path(p).is_file() else (p, 0)
        for p in paths.values()
    )
    return _cached_lexicons(
        paths["inflections"], paths["derivations"], paths["wordnet"], paths["cycle_override"], stamp,
    )


def _load_sentences(cfg: RunConfig, stage: str, source: str | None = None) -> list[Sentence]:
    path = cfg.sentences or _out_default(cfg, "sentences.jsonl")
    sentences = [Sentence.from_record(rec) for rec in read_jsonl(_existing_path(path, "sentences"))]
    if source is not None:
        sentences = [s for s in sentences if s.source == source]
    if not sentences:
        where = f" with source {source!r}" if source else ""
        raise PipelineError(f"no sentences{where} in {path}")
    return sorted(sentences, key=lambda s: s.id)


def _load_split(cfg: RunConfig, stage: str) -> DataSplit:
    path = cfg.splits or _out_default(cfg, "splits.json")
    from .util import read_json

    return DataSplit.from_record(read_json(_existing_path(path, "splits")))


def _pmap(fn, items, workers: int):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _write_meta(cfg: RunConfig, stage: str, params: dict, outputs: list[str]) -> None:
    write_json(
        Path(cfg.out) / f"{stage}.meta.json",
        {"stage": stage, "seed": cfg.seed, "params": params, "outputs": outputs},
    )


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------

def run_split(cfg: RunConfig) -> dict:
    """Segment the corpus, assign document pools, and sample a named split."""
    corpus_path = _existing_path(_require(cfg, "corpus", "split"), "corpus")
    docs = corpus_mod.read_documents(corpus_path)
    train_docs, test_docs = corpus_mod.assign_pools(len(docs), cfg.seed)
    train_set = set(train_docs)
    sentences: list[Sentence] = []
    for ordinal, text in enumerate(docs):
        source = "train-pool" if ordinal in train_set else "test-pool"
        sentences.extend(corpus_mod.split_sentences(text, source=source, doc_ordinal=ordinal))
    sentences.sort(key=lambda s: s.id)
    if not sentences:
        raise PipelineError(f"corpus {corpus_path} produced no usable sentences")
    outputs = ["sentences.jsonl"]
    write_jsonl(_out_default(cfg, "sentences.jsonl"), (s.to_record() for s in sentences))
    summary: dict = {
        "stage": "split",
        "seed": cfg.seed,
        "documents": len(docs),
        "train_documents": len(train_docs),
        "test_documents": len(test_docs),
        "sentences": len(sentences),
        "train_pool": sum(1 for s in sentences if s.source == "train-pool"),
        "test_pool": sum(1 for s in sentences if s.source == "test-pool"),
    }
    if cfg.size:
        pool = [s for s in sentences if s.source == "train-pool"]
        try:
            split = corpus_mod.sample_split(pool, cfg.size, cfg.seed)
        except corpus_mod.CorpusError as exc:
            raise PipelineError(str(exc)) from None
        write_json(_out_default(cfg, "splits.json"), split.to_record())
        outputs.append("splits.json")
        summary["split"] = split.name
        summary["split_size"] = len(split.ids)
    summary["outputs"] = outputs
    _write_meta(cfg, "split", {"corpus": str(corpus_path), "size": cfg.size}, outputs)
    return summary


def run_stats(cfg: RunConfig) -> dict:
    """Describe the sampled split's words-per-sentence distribution."""
    sentences = _load_sentences(cfg, "stats")
    split = _load_split(cfg, "stats")
    by_id = {s.id: s for s in sentences}
    try:
        stats = corpus_mod.compute_stats(split, by_id)
    except corpus_mod.CorpusError as exc:
        raise PipelineError(str(exc)) from None
    write_json(_out_default(cfg, "stats.json"), stats.to_record())
    _write_meta(cfg, "stats", {"split": split.name}, ["stats.json"])
    return {"stage": "stats", "seed": cfg.seed, **stats.to_record(), "outputs": ["stats.json"]}


def run_intervene(cfg: RunConfig) -> dict:
    """Apply one intervention to every sentence and write the transforms."""
    kind = parse_kind(_require(cfg, "kind", "intervene"))
    sentences = _load_sentences(cfg, "intervene")
    plugin_used = False
    if cfg.plugin:
        if kind is not InterventionKind.MULTI:
            raise PipelineError("--plugin only applies to the sentence-level kind (Multi)")
        results = run_sentence_plugin(shlex.split(cfg.plugin), sentences)
        records = []
        changed = 0
        for s in sentences:
            res = results[s.id]
            changed += bool(res.changed)
            records.append(
                {"id": s.id, "kind": kind.value, "text": res.output,
                 "changed_words": [], "changed": res.changed}
            )
        plugin_used = True
    else:
        needs_lex = kind in (
            InterventionKind.END, InterventionKind.AFFIX, InterventionKind.HYP, InterventionKind.ANT,
        )
        lexicons = load_lexicons(cfg, required=needs_lex, stage="intervene")
        vocab = _load_vocab(cfg, "intervene") if kind in (InterventionKind.REG, InterventionKind.CHAR) else None

        def work(sentence: Sentence):
            return apply_to_sentence(
                kind, sentence, lexicons=lexicons, vocab=vocab,
                seed=cfg.seed, dropout_p=cfg.dropout,
            )

        transformed = _pmap(work, sentences, cfg.workers)
        transformed.sort(key=lambda t: t.id)
        records = [t.to_record() for t in transformed]
        changed = sum(1 for t in transformed if t.changed)
    filename = f"transformed_{kind.value}.jsonl"
    write_jsonl(_out_default(cfg, filename), records)
    _write_meta(cfg, "intervene", {"kind": kind.value, "plugin": cfg.plugin}, [filename])
    return {
        "stage": "intervene",
        "seed": cfg.seed,
        "kind": kind.value,
        "sentences": len(records),
        "changed_sentences": changed,
        "plugin_used": plugin_used,
        "outputs": [filename],
    }


def run_mask(cfg: RunConfig) -> dict:
    """Build one masked training set for (split, kind, composition)."""
    kind = parse_kind(_require(cfg, "kind", "mask"))
    composition = _require(cfg, "composition", "mask")
    sentences = _load_sentences(cfg, "mask")
    split = _load_split(cfg, "mask")
    vocab = _load_vocab(cfg, "mask")
    needs_lex = kind in (
        InterventionKind.END, InterventionKind.AFFIX, InterventionKind.HYP, InterventionKind.ANT,
    )
    lexicons = load_lexicons(cfg, required=needs_lex, stage="mask")
    by_id = {s.id: s for s in sentences}
    try:
        instances = dataset_mod.build_training_set(
            split, by_id, kind, composition, vocab,
            lexicons=lexicons, seed=cfg.seed, dropout_p=cfg.dropout,
        )
    except dataset_mod.DatasetError as exc:
        raise PipelineError(str(exc)) from None
    filename = f"train_{split.name}_{kind.value}_{composition}.jsonl"
    dataset_mod.emit_dataset(instances, _out_default(cfg, filename))
    transformed = sum(1 for m in instances if m.applied)
    _write_meta(
        cfg, "mask",
        {"kind": kind.value, "composition": composition, "split": split.name, "dropout": cfg.dropout},
        [filename],
    )
    return {
        "stage": "mask",
        "seed": cfg.seed,
        "kind": kind.value,
        "composition": composition,
        "split": split.name,
        "instances": len(instances),
        "transformed": transformed,
        "outputs": [filename],
    }


def run_testset(cfg: RunConfig) -> dict:
    """Build the eligibility-filtered test set, one file per kind."""
    sentences = _load_sentences(cfg, "testset", source="test-pool")
    vocab = _load_vocab(cfg, "testset")
    lexicons = load_lexicons(cfg, required=True, stage="testset")
    try:
        testset = dataset_mod.build_test_set(
            sentences, cfg.sample, vocab, lexicons, seed=cfg.seed, dropout_p=cfg.dropout,
        )
    except dataset_mod.DatasetError as exc:
        raise PipelineError(str(exc)) from None
    if testset.retained == 0:
        raise PipelineError(
            "no test sentences survived the eligibility filter; "
            "check that the lexicons cover the corpus vocabulary"
        )
    outputs = []
    counts = {}
    for kind in KIND_ORDER:
        instances = list(testset.instances.get(kind.value, ()))
        filename = f"test_{kind.value}.jsonl"
        dataset_mod.emit_dataset(instances, _out_default(cfg, filename))
        outputs.append(filename)
        counts[kind.value] = len(instances)
    _write_meta(cfg, "testset", {"sample": cfg.sample, "dropout": cfg.dropout}, outputs)
    return {
        "stage": "testset",
        "seed": cfg.seed,
        "sampled": testset.sampled,
        "retained": testset.retained,
        "dropped_multi": testset.dropped_multi,
        "instances": counts,
        "outputs": outputs,
    }


def run_score(cfg: RunConfig) -> dict:
    """Score one predictions file against one gold file; merge into a report."""
    pred_path = _existing_path(_require(cfg, "pred", "score"), "predictions")
    gold_path = _existing_path(_require(cfg, "gold", "score"), "gold dataset")
    preds = load_predictions(pred_path)
    try:
        gold = dataset_mod.load_dataset(gold_path)
    except dataset_mod.DatasetError as exc:
        raise PipelineError(str(exc)) from None
    kinds = {g.kind for g in gold}
    splits = {g.split for g in gold}
    compositions = {g.composition for g in gold}
    if len(kinds) != 1 or len(splits) != 1 or len(compositions) != 1:
        raise PipelineError(
            f"gold file {gold_path} mixes kinds/splits/compositions "
            f"({sorted(kinds)}/{sorted(splits)}/{sorted(compositions)}); score one cell at a time"
        )
    try:
        cell_metrics = score_all(preds, gold)
    except metrics_mod.MetricsError as exc:
        raise PipelineError(str(exc)) from None
    report_path = Path(cfg.report or _out_default(cfg, "scores.tsv"))
    report = load_report(report_path) if report_path.exists() else ScoreReport()
    key = CellKey(model=cfg.model, data=next(iter(splits)),
                  composition=next(iter(compositions)), kind=next(iter(kinds)))
    report.set_cell(key, cell_metrics)
    emit_report(report, report_path, fmt="tsv")
    _write_meta(
        cfg, "score",
        {"pred": str(pred_path), "gold": str(gold_path), "model": cfg.model},
        [report_path.name],
    )
    return {
        "stage": "score",
        "seed": cfg.seed,
        "model": key.model,
        "data": key.data,
        "composition": key.composition,
        "kind": key.kind,
        "instances": len(gold),
        "metrics": {m: cell_metrics[m] for m in metrics_mod.METRIC_ORDER},
        "outputs": [report_path.name],
    }


def run_report(cfg: RunConfig) -> dict:
    """Normalize a score report against its baseline and emit TSV + JSONL."""
    report_path = _existing_path(cfg.report or _out_default(cfg, "scores.tsv"), "score report")
    try:
        report = metrics_mod.normalize_relative(load_report(report_path))
    except metrics_mod.MetricsError as exc:
        raise PipelineError(str(exc)) from None
    emit_report(report, _out_default(cfg, "report.tsv"), fmt="tsv")
    emit_report(report, _out_default(cfg, "report.jsonl"), fmt="json")
    outputs = ["report.tsv", "report.jsonl"]
    _write_meta(cfg, "report", {"source": str(report_path)}, outputs)
    return {
        "stage": "report",
        "seed": cfg.seed,
        "rows": len(report.rows()),
        "cells": len(report.scores),
        "outputs": outputs,
    }


STAGES = {
    "split": run_split,
    "stats": run_stats,
    "intervene": run_intervene,
    "mask": run_mask,
    "testset": run_testset,
    "score": run_score,
    "report": run_report,
}
