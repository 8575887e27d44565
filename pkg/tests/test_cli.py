import json
from pathlib import Path

import pytest

from lingvar.cli import main
from lingvar.metrics import CellKey, load_report
from lingvar.util import read_jsonl, write_jsonl


def run_cli(capsys, *argv: str) -> tuple[int, dict | None, str]:
    rc = main(list(argv))
    captured = capsys.readouterr()
    summary = json.loads(captured.out) if rc == 0 and captured.out.strip() else None
    return rc, summary, captured.err


def write_perfect_predictions(gold_path: Path, pred_path: Path) -> None:
    """Rank-1-correct five-deep candidate lists for every gold instance."""
    records = []
    for rec in read_jsonl(gold_path):
        cands = []
        for g in rec["gold_tokens"]:
            ranked = [g] + [f"pad{i}" for i in range(5)]
            cands.append([t for t in dict.fromkeys(ranked)][:5])
        records.append({"id": rec["id"], "candidates": cands})
    write_jsonl(pred_path, records)


class TestCliBasics:
    def test_split_prints_summary_json(self, synth_env, tmp_path, capsys):
        rc, summary, _ = run_cli(
            capsys, "split", "--corpus", str(synth_env.corpus),
            "--out", str(tmp_path), "--seed", "11", "--size", "S",
        )
        assert rc == 0
        assert summary["stage"] == "split"
        assert summary["documents"] == 12
        assert summary["split_size"] == 264

    def test_transform_round_trip(self, capsys):
        rc, summary, _ = run_cli(capsys, "transform", "--kind", "IPA", "--text", "boots")
        assert rc == 0
        assert summary["text"] == "poodz"

    def test_missing_required_flags(self, capsys):
        rc, _, err = run_cli(capsys, "score")
        assert rc == 1
        assert "--pred" in err and "--gold" in err

    def test_domain_error_surfaces_detail(self, tmp_path, capsys):
        rc, _, err = run_cli(
            capsys, "intervene", "--kind", "Banana", "--out", str(tmp_path),
        )
        assert rc == 1
        assert "HTTP 400" in err
        assert "unknown intervention kind" in err

    def test_invalid_choice_rejected_by_parser(self, synth_env, tmp_path):
        with pytest.raises(SystemExit):
            main(["split", "--corpus", str(synth_env.corpus),
                  "--out", str(tmp_path), "--size", "XL"])

    def test_unreachable_server(self, capsys):
        rc, _, err = run_cli(
            capsys, "--server", "http://127.0.0.1:9", "transform",
            "--kind", "IPA", "--text", "boots",
        )
        assert rc == 1
        assert "request to /v1/transform failed" in err


class TestConfigFile:
    def test_config_supplies_settings(self, synth_env, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            f"corpus={synth_env.corpus}\nout={tmp_path / 'out'}\nseed=11\nsize=S\n",
            encoding="utf-8",
        )
        rc, summary, _ = run_cli(capsys, "split", "--config", str(cfg))
        assert rc == 0
        assert summary["seed"] == 11
        assert summary["split_size"] == 264

    def test_flags_override_config(self, synth_env, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            f"corpus={synth_env.corpus}\nout={tmp_path / 'out'}\nseed=11\n",
            encoding="utf-8",
        )
        rc, summary, _ = run_cli(capsys, "split", "--config", str(cfg), "--seed", "42")
        assert rc == 0
        assert summary["seed"] == 42

    def test_unknown_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("velocity=9\n", encoding="utf-8")
        rc, _, err = run_cli(capsys, "split", "--config", str(cfg))
        assert rc == 1
        assert "unknown config key" in err

    def test_irrelevant_config_keys_filtered(self, synth_env, tmp_path, capsys):
        # keys for other stages (kind, composition) must not leak into split
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            f"corpus={synth_env.corpus}\nout={tmp_path / 'out'}\n"
            "kind=IPA\ncomposition=full\nvocab=nowhere.txt\n",
            encoding="utf-8",
        )
        rc, summary, _ = run_cli(capsys, "split", "--config", str(cfg))
        assert rc == 0
        assert summary["stage"] == "split"


class TestCliChain:
    def test_split_mask_score_report(self, synth_env, tmp_path, capsys):
        out = tmp_path / "out"
        args = ["--out", str(out), "--seed", "11"]
        lex = ["--inflections", str(synth_env.inflections),
               "--derivations", str(synth_env.derivations),
               "--wordnet", str(synth_env.wordnet)]

        rc, _, err = run_cli(capsys, "split", "--corpus", str(synth_env.corpus),
                             "--size", "S", *args)
        assert rc == 0, err

        for kind in ("None", "IPA"):
            rc, summary, err = run_cli(
                capsys, "mask", "--kind", kind, "--composition", "full",
                "--vocab", str(synth_env.vocab), *lex, *args,
            )
            assert rc == 0, err
            assert summary["instances"] == 264
            gold = out / f"train_S_{kind}_full.jsonl"
            pred = tmp_path / f"pred_{kind}.jsonl"
            write_perfect_predictions(gold, pred)
            rc, summary, err = run_cli(
                capsys, "score", "--pred", str(pred), "--gold", str(gold),
                "--model", "bert", *args,
            )
            assert rc == 0, err
            assert summary["metrics"]["exact_match"] == 1.0

        rc, summary, err = run_cli(capsys, "report", *args)
        assert rc == 0, err
        assert summary["cells"] == 2
        report = load_report(out / "report.tsv")
        assert report.relative[CellKey("bert", "S", "full", "None")]["best1"] == 100.0
        assert report.relative[CellKey("bert", "S", "full", "IPA")]["best1"] == 100.0
