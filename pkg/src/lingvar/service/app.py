"""HTTP service exposing the pipeline stages.

Every pipeline stage is one POST endpoint under ``/v1``; a free-standing
``/v1/transform`` endpoint rewrites a single sentence in-memory for quick
inspection.  Domain errors surface as 400 responses with the underlying
message; everything else is a 500.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..corpus import CorpusError, Sentence
from ..dataset import DatasetError
from ..interventions import (
    InterventionError,
    LexiconSet,
    PluginError,
    apply_to_sentence,
    parse_kind,
)
from ..lexicons import LexiconError
from ..metrics import MetricsError
from ..pipeline import (
    PipelineError,
    RunConfig,
    load_lexicons,
    run_intervene,
    run_mask,
    run_report,
    run_score,
    run_split,
    run_stats,
    run_testset,
)
from ..wordpiece import VocabError, load_vocab
from . import schemas

_DOMAIN_ERRORS = (
    PipelineError, CorpusError, LexiconError, VocabError,
    DatasetError, MetricsError, InterventionError, PluginError,
    ValueError,
)


def _config_from(payload) -> RunConfig:
    data = payload.model_dump(exclude_none=True)
    fields = set(RunConfig.field_names())
    return RunConfig(**{k: v for k, v in data.items() if k in fields})


def create_app() -> FastAPI:
    app = FastAPI(title="lingvar", version=__version__)

    async def _domain_error(request: Request, exc: Exception):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    # registered per class (not on Exception) so the response is returned
    # without re-raising -- in-process ASGI clients then see a clean 400
    for cls in _DOMAIN_ERRORS:
        app.add_exception_handler(cls, _domain_error)

    @app.exception_handler(Exception)
    async def _internal_error(request: Request, exc: Exception):
        return JSONResponse(status_code=500, content={"detail": f"internal error: {exc}"})

    @app.get("/v1/health", response_model=schemas.HealthResponse)
    async def health():
        return {"status": "ok", "version": __version__}

    @app.post("/v1/split", response_model=schemas.SplitResponse)
    async def split(req: schemas.SplitRequest):
        return run_split(_config_from(req))

    @app.post("/v1/stats", response_model=schemas.StatsResponse)
    async def stats(req: schemas.StatsRequest):
        return run_stats(_config_from(req))

    @app.post("/v1/intervene", response_model=schemas.InterveneResponse)
    async def intervene(req: schemas.InterveneRequest):
        return run_intervene(_config_from(req))

    @app.post("/v1/mask", response_model=schemas.MaskResponse)
    async def mask(req: schemas.MaskRequest):
        return run_mask(_config_from(req))

    @app.post("/v1/testset", response_model=schemas.TestsetResponse)
    async def testset(req: schemas.TestsetRequest):
        return run_testset(_config_from(req))

    @app.post("/v1/score", response_model=schemas.ScoreResponse)
    async def score(req: schemas.ScoreRequest):
        return run_score(_config_from(req))

    @app.post("/v1/report", response_model=schemas.ReportResponse)
    async def report(req: schemas.ReportRequest):
        return run_report(_config_from(req))

    @app.post("/v1/transform", response_model=schemas.TransformResponse)
    async def transform(req: schemas.TransformRequest):
        kind = parse_kind(req.kind)
        cfg = _config_from(req)
        lexicons: LexiconSet = load_lexicons(cfg, required=False)
        vocab = load_vocab(req.vocab) if req.vocab else None
        sentence = Sentence(id=req.sentence_id, text=req.text, source="adhoc")
        result = apply_to_sentence(
            kind, sentence, lexicons=lexicons, vocab=vocab,
            seed=req.seed, dropout_p=req.dropout,
        )
        rec = result.to_record()
        return {
            "kind": rec["kind"],
            "text": rec.get("text"),
            "tokens": rec.get("tokens"),
            "changed_words": rec["changed_words"],
            "changed": rec["changed"],
        }

    return app
