"""Accuracy metrics over prediction files and baseline-relative reports.

Three accuracies are computed against a gold dataset file: ``exact_match``
is instance-level (every mask position's rank-1 candidate must equal its
gold token), ``best1``/``best5`` are position-level (the gold token appears
in the top k candidates).  Scores are proportions in [0, 1].  Reports are
keyed by (model tag, data size, composition, kind); ``normalize_relative``
adds percentages of each cell against the same row's untransformed-baseline
cell, rounded to one decimal with ties going away from zero, which matches
how such results are reported in print.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from decimal import Decimal, ROUND_HALF_UP
from pathlib import Path

from .dataset import MaskedInstance
from .interventions import KIND_ORDER
from .util import read_jsonl, write_jsonl

KIND_COLUMNS = tuple(k.value for k in KIND_ORDER)
METRIC_ORDER = ("exact_match", "best1", "best5")
BASELINE_KIND = "None"
_SIZE_RANK = {"S": 0, "M": 1, "L": 2}
_MISSING = "-"


class MetricsError(ValueError):
    """Raised for alignment problems, empty inputs, or bad report cells."""


Candidates = list[list[str]]  # one ranked candidate list per mask position


def load_predictions(path: str | Path) -> dict[str, Candidates]:
    """Load a predictions JSONL file keyed by instance id.

    Each record carries ``candidates``: one ranked token list per mask
    position.  Duplicate ids and empty files are errors.
    """
    preds: dict[str, Candidates] = {}
    for rec in read_jsonl(path):
        try:
            rid = str(rec["id"])
            cands = rec["candidates"]
        except KeyError as exc:
            raise MetricsError(f"{path}: prediction record missing field {exc}") from None
        if rid in preds:
            raise MetricsError(f"{path}: duplicate prediction record for instance {rid!r}")
        if not isinstance(cands, list) or not all(isinstance(c, list) and c for c in cands):
            raise MetricsError(f"{path}: instance {rid!r} has malformed candidate lists")
        preds[rid] = [[str(t) for t in c] for c in cands]
    if not preds:
        raise MetricsError(f"{path}: prediction file is empty")
    return preds


def _aligned(preds: dict[str, Candidates], inst: MaskedInstance) -> Candidates:
    try:
        cands = preds[inst.id]
    except KeyError:
        raise MetricsError(f"no prediction record for instance {inst.id!r}") from None
    if len(cands) != len(inst.mask_positions):
        raise MetricsError(
            f"instance {inst.id!r}: {len(cands)} candidate lists for "
            f"{len(inst.mask_positions)} mask positions"
        )
    return cands


def _check_gold(gold: list[MaskedInstance]) -> None:
    if not gold:
        raise MetricsError("no gold instances to score")
    seen = set()
    for inst in gold:
        if inst.id in seen:
            raise MetricsError(f"duplicate gold instance id {inst.id!r}")
        seen.add(inst.id)


def exact_match(preds: dict[str, Candidates], gold: list[MaskedInstance]) -> float:
    """Fraction of instances whose every rank-1 candidate equals its gold token.

    Comparison is exact, case-sensitive string equality on the canonical
    continuation-marker form.
    """
    _check_gold(gold)
    hits = 0
    for inst in gold:
        cands = _aligned(preds, inst)
        if all(c[0] == g for c, g in zip(cands, inst.gold_tokens)):
            hits += 1
    return hits / len(gold)


def best_k(preds: dict[str, Candidates], gold: list[MaskedInstance], k: int) -> float:
    """Fraction of mask positions whose top-k candidates contain the gold token."""
    if k < 1:
        raise MetricsError(f"k must be >= 1, got {k}")
    _check_gold(gold)
    positions = 0
    hits = 0
    for inst in gold:
        cands = _aligned(preds, inst)
        for c, g in zip(cands, inst.gold_tokens):
            if len(c) < k:
                raise MetricsError(
                    f"instance {inst.id!r}: candidate list of length {len(c)} is shorter than k={k}"
                )
            positions += 1
            if g in c[:k]:
                hits += 1
    if positions == 0:
        raise MetricsError("no mask positions to score")
    return hits / positions


def score_all(preds: dict[str, Candidates], gold: list[MaskedInstance]) -> dict[str, float]:
    """All three metrics for one (predictions, gold) pair."""
    return {
        "exact_match": exact_match(preds, gold),
        "best1": best_k(preds, gold, 1),
        "best5": best_k(preds, gold, 5),
    }


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class CellKey:
    """Identifies one experiment cell."""

    model: str
    data: str
    composition: str
    kind: str


@dataclass
class ScoreReport:
    """Metric values per cell, plus baseline-relative percentages if computed."""

    scores: dict[CellKey, dict[str, float]] = dc_field(default_factory=dict)
    relative: dict[CellKey, dict[str, float]] = dc_field(default_factory=dict)

    def set_cell(self, key: CellKey, metrics: dict[str, float]) -> None:
        self.scores.setdefault(key, {}).update(metrics)

    def rows(self) -> list[tuple[str, str, str]]:
        """Distinct (model, data, composition) triples in canonical order."""
        seen = {(k.model, k.data, k.composition) for k in self.scores}
        return sorted(seen, key=lambda r: (r[0], _SIZE_RANK.get(r[1], 99), r[1], r[2]))


def round_half_away(value: float, decimals: int = 1) -> float:
    """Round with ties away from zero (decimal semantics, not banker's)."""
    q = Decimal(1).scaleb(-decimals)
    return float(Decimal(repr(value)).quantize(q, rounding=ROUND_HALF_UP))


def normalize_relative(report: ScoreReport, baseline_kind: str = BASELINE_KIND) -> ScoreReport:
    """Express every cell as a percentage of its row's baseline cell.

    Every (model, data, composition) group must contain a ``baseline_kind``
    cell with a nonzero value for each metric being normalized.  Returns a
    new report; input scores are untouched.
    """
    out = ScoreReport(scores={k: dict(v) for k, v in report.scores.items()})
    baselines: dict[tuple[str, str, str], dict[str, float]] = {}
    for key, metrics in report.scores.items():
        if key.kind == baseline_kind:
            baselines[(key.model, key.data, key.composition)] = metrics
    for key, metrics in report.scores.items():
        row = (key.model, key.data, key.composition)
        base = baselines.get(row)
        if base is None:
            raise MetricsError(
                f"no {baseline_kind!r} baseline cell for model={key.model} "
                f"data={key.data} composition={key.composition}"
            )
        rel: dict[str, float] = {}
        for metric, value in metrics.items():
            if metric not in base:
                raise MetricsError(
                    f"baseline cell for model={key.model} data={key.data} "
                    f"composition={key.composition} lacks metric {metric!r}"
                )
            denom = base[metric]
            if denom == 0:
                raise MetricsError(
                    f"zero baseline for metric {metric!r} at model={key.model} "
                    f"data={key.data} composition={key.composition}"
                )
            rel[metric] = round_half_away(100.0 * value / denom)
        out.relative[key] = rel
    return out


def _table_rows(report: ScoreReport, which: str) -> list[list[str]]:
    cells = report.scores if which == "scores" else report.relative
    rows = []
    present_rows = sorted(
        {(k.model, k.data, k.composition) for k in cells},
        key=lambda r: (r[0], _SIZE_RANK.get(r[1], 99), r[1], r[2]),
    )
    for model, data, composition in present_rows:
        metrics_present = [
            m for m in METRIC_ORDER
            if any(
                m in cells.get(CellKey(model, data, composition, kind), {})
                for kind in KIND_COLUMNS
            )
        ]
        for metric in metrics_present:
            row = [model, data, composition, ("relative_" if which == "relative" else "") + metric]
            for kind in KIND_COLUMNS:
                value = cells.get(CellKey(model, data, composition, kind), {}).get(metric)
                row.append(_MISSING if value is None else repr(value))
            rows.append(row)
    return rows


def emit_report(report: ScoreReport, path: str | Path, fmt: str = "tsv") -> None:
    """Write a report as TSV or JSONL with a fixed kind-column order.

    Emission is deterministic (sorted rows, shortest round-trip float text),
    so re-emitting an unchanged report reproduces the file byte for byte.
    """
    path = Path(path)
    header = ["model", "data", "composition", "metric", *KIND_COLUMNS]
    rows = _table_rows(report, "scores") + _table_rows(report, "relative")
    if fmt == "tsv":
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write("\t".join(header) + "\n")
            for row in rows:
                fh.write("\t".join(row) + "\n")
    elif fmt == "json":
        records = []
        for row in rows:
            values = {
                kind: (None if cell == _MISSING else float(cell))
                for kind, cell in zip(KIND_COLUMNS, row[4:])
            }
            records.append(
                {"model": row[0], "data": row[1], "composition": row[2],
                 "metric": row[3], "values": values}
            )
        write_jsonl(path, records)
    else:
        raise MetricsError(f"unknown report format {fmt!r}; expected 'tsv' or 'json'")


def load_report(path: str | Path) -> ScoreReport:
    """Read back a TSV or JSONL report written by :func:`emit_report`."""
    path = Path(path)
    report = ScoreReport()

    def absorb(model: str, data: str, composition: str, metric: str, values: dict) -> None:
        target = report.relative if metric.startswith("relative_") else report.scores
        name = metric.removeprefix("relative_")
        for kind, cell in values.items():
            if cell is None:
                continue
            target.setdefault(CellKey(model, data, composition, kind), {})[name] = float(cell)

    if path.suffix == ".tsv":
        lines = path.read_text(encoding="utf-8").splitlines()
        if not lines:
            raise MetricsError(f"{path}: empty report")
        header = lines[0].split("\t")
        if header[:4] != ["model", "data", "composition", "metric"]:
            raise MetricsError(f"{path}: unrecognized report header")
        kinds = header[4:]
        for lineno, line in enumerate(lines[1:], start=2):
            fields = line.split("\t")
            if len(fields) != len(header):
                raise MetricsError(f"{path}:{lineno}: expected {len(header)} columns")
            values = {
                kind: (None if cell == _MISSING else cell)
                for kind, cell in zip(kinds, fields[4:])
            }
            absorb(fields[0], fields[1], fields[2], fields[3], values)
    else:
        for rec in read_jsonl(path):
            absorb(rec["model"], rec["data"], rec["composition"], rec["metric"], rec["values"])
    if not report.scores and not report.relative:
        raise MetricsError(f"{path}: report has no cells")
    return report
