"""Command-line entry point: ``python -m app.cli <command> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Sequence

from pydantic import ValidationError

from app.cli.commands import COMMANDS, write_run_stanza
from app.cli.config import RUN_KEYS, TRAIN_KEYS, parse_config
from app.errors import MtcnError

logger = logging.getLogger(__name__)


def _common_flags() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", help="key=value configuration file")
    parser.add_argument("--seed", type=int, help="master seed for every random stream")
    parser.add_argument("--threads", type=int, help="worker threads for cross-validation folds (1 = serial)")
    parser.add_argument("--out", help="output directory")
    return parser


def _data_flags() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--manifest", help="manifest TSV")
    parser.add_argument("--test-manifest", help="manifest TSV of held-out test images")
    parser.add_argument("--task", help="3class, 0-0.1, 0-1 or 0.1-1")
    parser.add_argument("--input-size", type=int, help="square network input size in pixels")
    parser.add_argument("--val-fraction", type=float, help="validation share of the source groups")
    return parser


def _train_flags() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--model", help="'canonical' or a JSON topology file")
    parser.add_argument("--model-path", help="where the trained model file is written")
    parser.add_argument("--lr", type=float)
    parser.add_argument("--batch-size", type=int)
    parser.add_argument("--dropout-rate", type=float)
    parser.add_argument("--l2-lambda", type=float)
    parser.add_argument("--patience-epochs", "--patience", dest="patience_epochs", type=int)
    parser.add_argument("--max-epochs", type=int)
    parser.add_argument("--sharpen", action=argparse.BooleanOptionalAction, default=None)
    parser.add_argument("--rotations", action=argparse.BooleanOptionalAction, default=None)
    parser.add_argument("--folds", type=int, help="number of cross-validation folds")
    return parser


def build_parser() -> argparse.ArgumentParser:
    common, data, training = _common_flags(), _data_flags(), _train_flags()
    parser = argparse.ArgumentParser(prog="mtcn", description="Microtubule image classification pipeline.")
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", parents=[common, data], help="build a manifest from 0/, 0.1/, 1/ image folders")
    ingest.add_argument("source", help="directory holding one subdirectory per class")

    sub.add_parser("sharpen", parents=[common, data], help="apply the sharpening mask to every image")
    sub.add_parser("augment", parents=[common, data], help="add 90/180/270 degree rotations of non-test images")

    split = sub.add_parser("split", parents=[common, data], help="hold out a test set, then split train/validation")
    split.add_argument("--per-class", type=int, help="test images held out per class")

    sub.add_parser("train", parents=[common, data, training], help="train one model with early stopping")
    sub.add_parser("cv", parents=[common, data, training], help="k-fold cross-validation")
    search = sub.add_parser("search", parents=[common, data, training], help="random topology search")
    search.add_argument("--budget", type=int, help="number of topologies to evaluate")
    search.add_argument("--space", help="JSON search space (defaults to the full ranges)")

    evaluate = sub.add_parser("eval", parents=[common, data], help="confusion matrix of a model on test images")
    evaluate.add_argument("--model-path", help="model file")
    evaluate.add_argument("--label", help="row label in the report (default: cnn)")
    predict = sub.add_parser("predict", parents=[common, data], help="per-image class probabilities")
    predict.add_argument("--model-path", help="model file")

    stats = sub.add_parser("stats", parents=[common], help="two-proportion test of two accuracy results")
    stats.add_argument("first", help="first result as k/n, e.g. 104/200")
    stats.add_argument("second", help="second result as k/n, e.g. 141/200")

    report = sub.add_parser("report", parents=[common], help="render confusion matrix files as a report")
    report.add_argument("matrices", nargs="*", help="[label=]confusion file")

    sub.add_parser("fixtures", parents=[common], help="check the published tables for consistency")

    experts = sub.add_parser("experts", parents=[common], help="average, best and voting accuracy of raters")
    experts.add_argument("sheets", help="rater sheet TSV: sample_id, task, rater_id, label")
    experts.add_argument("truth", help="true classes TSV: sample_id, label")
    experts.add_argument("--task", help="3class, 0-0.1, 0-1 or 0.1-1")

    synth = sub.add_parser("synth", parents=[common], help="generate a labeled synthetic dataset")
    synth.add_argument("--per-class", type=int, help="images per class")
    synth.add_argument("--size", dest="input_size", type=int, help="image size in pixels")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, object]:
    return {key: getattr(args, key) for key in sorted(TRAIN_KEYS | RUN_KEYS) if getattr(args, key, None) is not None}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = parse_config(args.config, _overrides(args))
        write_run_stanza(run, args.command)
        return COMMANDS[args.command](args, run)
    except MtcnError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except ValidationError as exc:
        print(f"error: invalid input: {exc.errors()[0]['msg']}", file=sys.stderr)
    except OSError as exc:
        where = f" ({exc.filename})" if exc.filename else ""
        print(f"error: {exc.strerror or exc}{where}", file=sys.stderr)
    logger.debug("Command %s failed", args.command)
    return 1
