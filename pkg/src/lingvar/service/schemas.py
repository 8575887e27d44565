"""Request/response models for the HTTP service.

Requests mirror the slice of the run configuration each stage consumes;
responses mirror the stage summaries.  Path fields refer to the server's
filesystem — the service is a thin wrapper for driving pipeline stages on a
machine that holds the corpora and lexicons.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class LexiconPaths(BaseModel):
    """Lexical resource locations; unset fields fall back to the env root."""

    inflections: str | None = None
    derivations: str | None = None
    wordnet: str | None = None
    cycle_override: str | None = None


class SplitRequest(BaseModel):
    corpus: str
    out: str = "out"
    seed: int = 0
    size: str | None = Field(default=None, description="Optional split to sample: S, M, or L")


class SplitResponse(BaseModel):
    stage: Literal["split"]
    seed: int
    documents: int
    train_documents: int
    test_documents: int
    sentences: int
    train_pool: int
    test_pool: int
    split: str | None = None
    split_size: int | None = None
    outputs: list[str]


class StatsRequest(BaseModel):
    out: str = "out"
    sentences: str | None = None
    splits: str | None = None
    seed: int = 0


class StatsResponse(BaseModel):
    stage: Literal["stats"]
    seed: int
    name: str
    sentences: int
    words: int
    mean_words: float
    min_words: int
    max_words: int
    percentiles: dict[str, int]
    outputs: list[str]


class InterveneRequest(LexiconPaths):
    kind: str
    out: str = "out"
    sentences: str | None = None
    vocab: str | None = None
    seed: int = 0
    dropout: float = 0.5
    workers: int = 1
    plugin: str | None = Field(
        default=None, description="External sentence rewriter command (sentence-level kind only)"
    )


class InterveneResponse(BaseModel):
    stage: Literal["intervene"]
    seed: int
    kind: str
    sentences: int
    changed_sentences: int
    plugin_used: bool
    outputs: list[str]


class MaskRequest(LexiconPaths):
    kind: str
    composition: str
    vocab: str
    out: str = "out"
    sentences: str | None = None
    splits: str | None = None
    seed: int = 0
    dropout: float = 0.5
    workers: int = 1


class MaskResponse(BaseModel):
    stage: Literal["mask"]
    seed: int
    kind: str
    composition: str
    split: str
    instances: int
    transformed: int
    outputs: list[str]


class TestsetRequest(LexiconPaths):
    vocab: str
    out: str = "out"
    sentences: str | None = None
    seed: int = 0
    dropout: float = 0.5
    sample: int = 10000
    workers: int = 1


class TestsetResponse(BaseModel):
    stage: Literal["testset"]
    seed: int
    sampled: int
    retained: int
    dropped_multi: int
    instances: dict[str, int]
    outputs: list[str]


class ScoreRequest(BaseModel):
    pred: str
    gold: str
    model: str = "model"
    out: str = "out"
    report: str | None = None
    seed: int = 0


class CellMetrics(BaseModel):
    exact_match: float
    best1: float
    best5: float


class ScoreResponse(BaseModel):
    stage: Literal["score"]
    seed: int
    model: str
    data: str
    composition: str
    kind: str
    instances: int
    metrics: CellMetrics
    outputs: list[str]


class ReportRequest(BaseModel):
    out: str = "out"
    report: str | None = None
    seed: int = 0


class ReportResponse(BaseModel):
    stage: Literal["report"]
    seed: int
    rows: int
    cells: int
    outputs: list[str]


class TransformRequest(LexiconPaths):
    """Transform a single sentence in-memory (no files written)."""

    kind: str
    text: str
    sentence_id: str = "adhoc-0"
    vocab: str | None = None
    seed: int = 0
    dropout: float = 0.5


class TransformResponse(BaseModel):
    kind: str
    text: str | None = None
    tokens: list[str] | None = None
    changed_words: list[int]
    changed: bool


class HealthResponse(BaseModel):
    status: Literal["ok"]
    version: str
