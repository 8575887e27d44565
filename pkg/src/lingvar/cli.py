"""Command-line frontend: a thin client over the HTTP service.

Each subcommand performs one pipeline stage and prints the stage summary as
a single JSON line on stdout.  By default requests are served in-process
(the service app is mounted on an in-memory transport, no sockets); pass
``--server http://host:port`` to drive a remote instance instead.  Settings
may come from a flat ``key=value`` config file; explicit flags win.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

import httpx

from .pipeline import PipelineError, parse_config_file

_TIMEOUT = 600.0


class CliError(Exception):
    pass


async def _post_async(server: str | None, path: str, payload: dict) -> dict:
    if server:
        client = httpx.AsyncClient(base_url=server.rstrip("/"), timeout=_TIMEOUT)
    else:
        from .service.app import create_app

        transport = httpx.ASGITransport(app=create_app())
        client = httpx.AsyncClient(transport=transport, base_url="http://lingvar", timeout=_TIMEOUT)
    try:
        try:
            resp = await client.post(path, json=payload)
        except httpx.HTTPError as exc:
            raise CliError(f"request to {path} failed: {exc}") from None
        if resp.status_code == 200:
            return resp.json()
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        raise CliError(f"{path} -> HTTP {resp.status_code}: {detail}")
    finally:
        await client.aclose()


def _post(server: str | None, path: str, payload: dict) -> dict:
    return asyncio.run(_post_async(server, path, payload))


_LEXICON_KEYS = ("inflections", "derivations", "wordnet", "cycle_override")

_COMMAND_KEYS = {
    "split": ("corpus", "out", "seed", "size"),
    "stats": ("out", "sentences", "splits", "seed"),
    "intervene": ("kind", "out", "sentences", "vocab", "seed", "dropout", "workers", "plugin",
                  *_LEXICON_KEYS),
    "mask": ("kind", "composition", "vocab", "out", "sentences", "splits", "seed", "dropout",
             "workers", *_LEXICON_KEYS),
    "testset": ("vocab", "out", "sentences", "seed", "dropout", "sample", "workers",
                *_LEXICON_KEYS),
    "score": ("pred", "gold", "model", "out", "report", "seed"),
    "report": ("out", "report", "seed"),
    "transform": ("kind", "text", "sentence_id", "vocab", "seed", "dropout", *_LEXICON_KEYS),
}

_REQUIRED = {
    "split": ("corpus",),
    "stats": (),
    "intervene": ("kind",),
    "mask": ("kind", "composition", "vocab"),
    "testset": ("vocab",),
    "score": ("pred", "gold"),
    "report": (),
    "transform": ("kind", "text"),
}


def _add_lexicon_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--inflections", help="inflection table TSV")
    p.add_argument("--derivations", help="derivation table TSV")
    p.add_argument("--wordnet", help="sense database directory or fixture TSV")
    p.add_argument("--cycle-override", dest="cycle_override", help="affix successor overrides TSV")


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file; flags override it")
    p.add_argument("--seed", type=int, help="global random seed (default 0)")
    p.add_argument("--out", help="output directory (default ./out)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lingvar",
        description="Induce linguistic variation, build masked-LM datasets, score predictions.",
    )
    parser.add_argument("--server", help="base URL of a running service; default runs in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split", help="segment a corpus, assign pools, sample a split")
    _add_common_flags(p)
    p.add_argument("--corpus", help="corpus path (.txt, .jsonl, or directory of .txt)")
    p.add_argument("--size", choices=("S", "M", "L"), help="split to sample from the train pool")

    p = sub.add_parser("stats", help="describe a sampled split")
    _add_common_flags(p)
    p.add_argument("--sentences", help="sentences JSONL (default <out>/sentences.jsonl)")
    p.add_argument("--splits", help="split JSON (default <out>/splits.json)")

    p = sub.add_parser("intervene", help="apply one intervention to every sentence")
    _add_common_flags(p)
    p.add_argument("--kind", help="intervention kind")
    p.add_argument("--sentences", help="sentences JSONL (default <out>/sentences.jsonl)")
    p.add_argument("--vocab", help="subword vocabulary (required for Reg/Char)")
    p.add_argument("--dropout", type=float, help="subword dropout probability (default 0.5)")
    p.add_argument("--workers", type=int, help="worker threads (outputs unchanged)")
    p.add_argument("--plugin", help="external sentence rewriter command (Multi only)")
    _add_lexicon_flags(p)

    p = sub.add_parser("mask", help="build one masked training set")
    _add_common_flags(p)
    p.add_argument("--kind", help="intervention kind")
    p.add_argument("--composition", choices=("mixed", "full"), help="application policy")
    p.add_argument("--vocab", help="subword vocabulary file")
    p.add_argument("--sentences", help="sentences JSONL (default <out>/sentences.jsonl)")
    p.add_argument("--splits", help="split JSON (default <out>/splits.json)")
    p.add_argument("--dropout", type=float, help="subword dropout probability (default 0.5)")
    p.add_argument("--workers", type=int, help="worker threads (outputs unchanged)")
    _add_lexicon_flags(p)

    p = sub.add_parser("testset", help="build the eligibility-filtered test set (all kinds)")
    _add_common_flags(p)
    p.add_argument("--vocab", help="subword vocabulary file")
    p.add_argument("--sentences", help="sentences JSONL (default <out>/sentences.jsonl)")
    p.add_argument("--sample", type=int, help="test-pool sample size (default 10000)")
    p.add_argument("--dropout", type=float, help="subword dropout probability (default 0.5)")
    p.add_argument("--workers", type=int, help="worker threads (outputs unchanged)")
    _add_lexicon_flags(p)

    p = sub.add_parser("score", help="score a predictions file against a gold dataset")
    _add_common_flags(p)
    p.add_argument("--pred", help="predictions JSONL")
    p.add_argument("--gold", help="gold dataset JSONL")
    p.add_argument("--model", help="model tag for the report cell (default 'model')")
    p.add_argument("--report", help="score report TSV to merge into (default <out>/scores.tsv)")

    p = sub.add_parser("report", help="normalize scores against the baseline column")
    _add_common_flags(p)
    p.add_argument("--report", help="score report TSV (default <out>/scores.tsv)")

    p = sub.add_parser("transform", help="rewrite one sentence in-memory and print the result")
    _add_common_flags(p)
    p.add_argument("--kind", help="intervention kind")
    p.add_argument("--text", help="sentence text")
    p.add_argument("--sentence-id", dest="sentence_id", help="id used for seeded draws")
    p.add_argument("--vocab", help="subword vocabulary (required for Reg/Char)")
    p.add_argument("--dropout", type=float, help="subword dropout probability (default 0.5)")
    _add_lexicon_flags(p)

    return parser


def _build_payload(args: argparse.Namespace) -> dict:
    keys = _COMMAND_KEYS[args.command]
    payload: dict = {}
    if getattr(args, "config", None):
        file_values = parse_config_file(args.config)
        payload.update({k: v for k, v in file_values.items() if k in keys})
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            payload[key] = value
    missing = [k for k in _REQUIRED[args.command] if k not in payload]
    if missing:
        flags = ", ".join("--" + m.replace("_", "-") for m in missing)
        raise CliError(f"missing required settings for '{args.command}': {flags}")
    return payload


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload = _build_payload(args)
        summary = _post(args.server, f"/v1/{args.command}", payload)
    except (CliError, PipelineError) as exc:
        print(f"lingvar {args.command}: error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(summary, ensure_ascii=False, separators=(",", ":")))
    return 0


if __name__ == "__main__":
    sys.exit(main())
