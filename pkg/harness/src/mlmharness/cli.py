"""Command-line frontend: ``finetune`` and ``predict``.

Each subcommand prints a one-line JSON summary on stdout and exits nonzero
with a message on stderr for domain errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import HarnessConfig, HarnessError
from .data import DataError
from .predict import DEFAULT_K, predict
from .train import finetune


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlm-harness",
        description="Fine-tune a masked LM with low-rank adapters and emit "
                    "top-k mask-filling predictions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("finetune", help="train adapters + LM head on a dataset file")
    p.add_argument("--train", required=True, help="training dataset JSONL")
    p.add_argument("--vocab", required=True, help="subword vocabulary file")
    p.add_argument("--out", required=True, help="checkpoint directory to write")
    p.add_argument("--size", default="S", choices=("S", "M", "L"),
                   help="training split size; selects the learning rate")
    p.add_argument("--base", default="monolingual",
                   choices=("monolingual", "multilingual"), help="base model tag")
    p.add_argument("--rank", type=int, default=8, help="adapter rank (default 8)")
    p.add_argument("--alpha", type=int, default=8, help="adapter scaling (default 8)")
    p.add_argument("--epochs", type=int, default=3, help="training epochs (default 3)")
    p.add_argument("--batch-size", type=int, default=16, help="batch size (default 16)")
    p.add_argument("--hidden-size", type=int, default=128, help="encoder width")
    p.add_argument("--layers", type=int, default=12, help="encoder layers")
    p.add_argument("--heads", type=int, default=2, help="attention heads")
    p.add_argument("--max-length", type=int, default=512, help="maximum sequence length")
    p.add_argument("--seed", type=int, default=0, help="seed for all random draws")

    p = sub.add_parser("predict", help="emit top-k predictions for a test dataset file")
    p.add_argument("--checkpoint", required=True, help="checkpoint directory")
    p.add_argument("--test", required=True, help="test dataset JSONL")
    p.add_argument("--out", required=True, help="predictions JSONL to write")
    p.add_argument("--k", type=int, default=DEFAULT_K,
                   help=f"candidates per mask position (default {DEFAULT_K})")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "finetune":
            cfg = HarnessConfig(
                base=args.base,
                split_size=args.size,
                rank=args.rank,
                alpha=args.alpha,
                epochs=args.epochs,
                batch_size=args.batch_size,
                hidden_size=args.hidden_size,
                num_layers=args.layers,
                num_heads=args.heads,
                max_length=args.max_length,
                seed=args.seed,
            )
            result = finetune(cfg, args.train, args.vocab, args.out)
            summary = {
                "command": "finetune",
                "checkpoint": str(result.checkpoint_dir),
                "instances": result.instances,
                "steps": result.steps,
                "epoch_losses": [round(x, 6) for x in result.epoch_losses],
                "seconds": round(result.seconds, 3),
                "learning_rate": cfg.learning_rate,
                "seed": cfg.seed,
            }
        else:
            result = predict(args.checkpoint, args.test, args.out, k=args.k)
            summary = {
                "command": "predict",
                "output": str(result.output_path),
                "instances": result.instances,
                "positions": result.positions,
                "k": args.k,
            }
    except (HarnessError, DataError) as exc:
        print(f"mlm-harness {args.command}: error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(summary, ensure_ascii=False, separators=(",", ":")))
    return 0


if __name__ == "__main__":
    sys.exit(main())
