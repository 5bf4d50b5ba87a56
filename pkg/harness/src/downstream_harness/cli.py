"""Harness command line.

Reads the pipeline's JSONL artifacts, fine-tunes the task model, and writes
an evaluation record as JSON.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .classify import finetune_classifier
from .data import SchemaError, load_test_sentences
from .lm import eval_next_word, finetune_lm


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="downstream-harness",
        description="Fine-tune small models on released or full training data and report metrics.",
    )
    parser.add_argument("--task", choices=("classification", "lm"), required=True)
    parser.add_argument("--train", required=True, help="release JSONL or full-text document JSONL")
    parser.add_argument("--test", required=True, help="full-text document JSONL")
    parser.add_argument("--epochs", type=int, default=None)
    parser.add_argument("--lr", type=float, default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--batch-size", type=int, default=None)
    parser.add_argument("--data-variant", choices=("full", "frag"), default="frag")
    parser.add_argument("--out", help="write the evaluation record JSON here (default: stdout)")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.task == "classification":
            result = finetune_classifier(
                args.train,
                args.test,
                epochs=args.epochs if args.epochs is not None else 10,
                lr=args.lr if args.lr is not None else 3e-5,
                seed=args.seed,
                batch_size=args.batch_size if args.batch_size is not None else 16,
                data_variant=args.data_variant,
            )
            record = result.record
            extra = {
                "train_loss_start": result.train_loss_start,
                "train_loss_end": result.train_loss_end,
                "n_train": result.n_train,
                "n_test": result.n_test,
            }
        else:
            trained = finetune_lm(
                args.train,
                epochs=args.epochs if args.epochs is not None else 3,
                lr=args.lr if args.lr is not None else 1e-3,
                seed=args.seed,
                batch_size=args.batch_size if args.batch_size is not None else 3,
            )
            sentences = load_test_sentences(args.test)
            evaluated = eval_next_word(trained.predictor, sentences, data_variant=args.data_variant)
            record = evaluated.record
            extra = {
                "train_loss_start": trained.train_loss_start,
                "train_loss_end": trained.train_loss_end,
                "n_evaluated": evaluated.n_evaluated,
                "n_skipped": evaluated.n_skipped,
            }
    except (SchemaError, ValueError, OSError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 1
    payload = json.loads(record.to_json())
    payload.update(extra)
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        print(text, end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
