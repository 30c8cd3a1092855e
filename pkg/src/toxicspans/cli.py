"""Command line front end: ``toxicspans <subcommand> ...``.

Subcommands: clean, build-vocab, train, predict, eval, ensemble, highlight.
Logs go to stderr; data goes to files or stdout.

Prediction files are TSV without a header, one ``id<TAB>[o1, o2, ...]``
row per comment. ``eval``, ``ensemble`` and ``highlight`` also accept a
gold-style CSV wherever a prediction file is expected.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Sequence

from .checkpoint import load_checkpoint, save_checkpoint
from .corpus import CorpusError, format_offsets, parse_offsets, parse_tsd_csv, write_tsd_csv
from .encoder import EncoderConfig
from .ensemble import vote_corpus
from .highlight import render_html, render_terminal
from .metrics import evaluate_corpus
from .spanclean import CleanReport, clean_corpus
from .tokenizer import build_vocab, load_vocab
from .training import TrainConfig, predict_corpus, train

__all__ = [
    "PipelineConfig",
    "PredictionRecord",
    "cmd_clean",
    "cmd_ensemble",
    "cmd_eval",
    "cmd_highlight",
    "cmd_predict",
    "cmd_train",
    "main",
    "read_predictions",
    "write_predictions",
]

log = logging.getLogger("toxicspans")

SEED_ENV = "TOXICSPANS_SEED"


class CliError(Exception):
    pass


@dataclass(frozen=True)
class PredictionRecord:
    id: int
    offsets: tuple[int, ...]


def write_predictions(path: str | Path | None, records: Sequence[PredictionRecord]) -> None:
    text = "".join(f"{r.id}\t{format_offsets(r.offsets)}\n" for r in records)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def read_predictions(path: str | Path) -> list[PredictionRecord]:
    """Read a prediction TSV, or a gold CSV (ids are row numbers)."""
    with open(path, encoding="utf-8", newline="") as fh:
        first = fh.readline()
    if first.strip().lstrip("\ufeff").replace(" ", "") in ("spans,text", "text,spans"):
        return [PredictionRecord(c.id, c.toxic_offsets) for c in parse_tsd_csv(path)]

    records, seen = [], set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0].strip().isdigit():
                raise CliError(f"{path}:{lineno}: expected 'id<TAB>[offsets]'")
            rid = int(parts[0])
            if rid in seen:
                raise CliError(f"{path}:{lineno}: duplicate id {rid}")
            seen.add(rid)
            try:
                records.append(PredictionRecord(rid, parse_offsets(parts[1])))
            except CorpusError as exc:
                raise CliError(f"{path}:{lineno}: id {rid}: {exc}") from None
    return records


def _align(ids: Sequence[int], records: Sequence[PredictionRecord], what: str) -> list[tuple[int, ...]]:
    by_id = {r.id: r.offsets for r in records}
    missing = [i for i in ids if i not in by_id]
    extra = sorted(set(by_id) - set(ids))
    if missing or extra:
        parts = []
        if missing:
            parts.append(f"missing ids {missing}")
        if extra:
            parts.append(f"unexpected ids {extra}")
        raise CliError(f"{what}: " + "; ".join(parts))
    return [by_id[i] for i in ids]


# -- configuration -----------------------------------------------------------

@dataclass
class PipelineConfig:
    paths: dict = field(default_factory=dict)
    encoder: dict = field(default_factory=dict)
    training: dict = field(default_factory=dict)
    ensemble: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | Path | None) -> PipelineConfig:
        if path is None:
            return cls()
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise CliError(f"{path}: unknown config sections {sorted(unknown)}")
        return cls(**data)

    def validate(self, required_paths: Sequence[str]) -> list[str]:
        errors = []
        for key in required_paths:
            value = self.paths.get(key)
            if not value:
                errors.append(f"paths.{key} is not set")
            elif not Path(value).exists():
                errors.append(f"paths.{key}: {value} does not exist")
        try:
            TrainConfig(**self.training)
        except (TypeError, ValueError) as exc:
            errors.append(f"training: {exc}")
        encoder = dict(self.encoder)
        last_n = encoder.pop("last_n", None)
        try:
            if last_n is not None:
                EncoderConfig.last_n(int(last_n), vocab_size=1, **encoder)
            else:
                EncoderConfig(vocab_size=1, **encoder)
        except (TypeError, ValueError) as exc:
            errors.append(f"encoder: {exc}")
        return errors


# -- subcommands ---------------------------------------------------------------

def cmd_clean(in_csv, out_csv, discard_partial: bool = False) -> CleanReport:
    comments = parse_tsd_csv(in_csv)
    cleaned, report = clean_corpus(comments, discard_partial=discard_partial)
    write_tsd_csv(out_csv, cleaned)
    return report


def cmd_build_vocab(corpora: Sequence[str], out_path, min_count: int = 2) -> int:
    texts = [c.text for path in corpora for c in parse_tsd_csv(path)]
    vocab = build_vocab(texts, min_count=min_count)
    vocab.save(out_path)
    return len(vocab)


def cmd_train(config: PipelineConfig):
    errors = config.validate(["train", "trial", "vocab"])
    if not config.paths.get("checkpoint"):
        errors.append("paths.checkpoint is not set")
    if errors:
        raise CliError("invalid configuration:\n  " + "\n  ".join(errors))

    vocab = load_vocab(config.paths["vocab"])
    train_corpus = parse_tsd_csv(config.paths["train"])
    trial_corpus = parse_tsd_csv(config.paths["trial"])
    encoder_fields = dict(config.encoder)
    last_n = encoder_fields.pop("last_n", None)
    if last_n is not None:
        encoder_config = EncoderConfig.last_n(int(last_n), vocab_size=len(vocab), **encoder_fields)
    else:
        encoder_config = EncoderConfig(vocab_size=len(vocab), **encoder_fields)
    train_config = TrainConfig(**config.training)

    log_path = config.paths.get("log")
    log_fh = open(log_path, "w", encoding="utf-8") if log_path else None
    try:
        def record(r):
            if log_fh:
                log_fh.write(f"epoch={r['epoch']} loss={r['loss']:.6f} trial_f1={r['trial_f1']:.4f}\n")

        ckpt = train(encoder_config, train_corpus, trial_corpus, vocab, train_config, on_epoch=record)
    finally:
        if log_fh:
            log_fh.close()
    save_checkpoint(config.paths["checkpoint"], ckpt)
    return ckpt


def cmd_predict(checkpoint_path, corpus_path, vocab_path, out_path=None) -> list[PredictionRecord]:
    ckpt = load_checkpoint(checkpoint_path)
    vocab = load_vocab(vocab_path)
    if ckpt.encoder_config.vocab_size != len(vocab) or (
        ckpt.vocab_fingerprint and ckpt.vocab_fingerprint != vocab.fingerprint()
    ):
        raise CliError(f"checkpoint {checkpoint_path} was trained with a different vocabulary than {vocab_path}")
    comments = parse_tsd_csv(corpus_path)
    preds = predict_corpus(ckpt.params, ckpt.encoder_config, comments, vocab)
    records = [PredictionRecord(c.id, p) for c, p in zip(comments, preds)]
    write_predictions(out_path, records)
    return records


def cmd_eval(gold_csv, pred_path, per_comment_path=None) -> float:
    gold = parse_tsd_csv(gold_csv)
    preds = _align([c.id for c in gold], read_predictions(pred_path), str(pred_path))
    result = evaluate_corpus([c.toxic_offsets for c in gold], preds)
    if per_comment_path:
        with open(per_comment_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("id\tf1\n")
            for c, f1 in zip(gold, result.per_comment_f1):
                fh.write(f"{c.id}\t{f1:.6f}\n")
    return result.mean_f1


def cmd_ensemble(pred_paths: Sequence[str], out_path=None) -> list[PredictionRecord]:
    members = [read_predictions(p) for p in pred_paths]
    ids = [r.id for r in members[0]]
    aligned = [_align(ids, m, str(p)) for m, p in zip(members, pred_paths)]
    records = [PredictionRecord(i, o) for i, o in zip(ids, vote_corpus(aligned))]
    write_predictions(out_path, records)
    return records


def cmd_highlight(gold_csv, pred_path, fmt: str = "terminal") -> str:
    gold = parse_tsd_csv(gold_csv)
    preds = _align([c.id for c in gold], read_predictions(pred_path), str(pred_path))
    if fmt == "html":
        return render_html([(c.id, c.text, c.toxic_offsets, p) for c, p in zip(gold, preds)])
    if fmt == "terminal":
        return "".join(f"{c.id}\t{render_terminal(c.text, c.toxic_offsets, p)}\n" for c, p in zip(gold, preds))
    raise CliError(f"unknown format {fmt!r}")


# -- argument parsing ----------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toxicspans", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("clean", help="clean span annotations of a corpus CSV")
    p.add_argument("--in", dest="in_csv", required=True)
    p.add_argument("--out", dest="out_csv", required=True)
    p.add_argument("--discard-partial", action="store_true",
                   help="drop partially marked words instead of expanding them")

    p = sub.add_parser("build-vocab", help="frequency vocabulary from corpus CSVs")
    p.add_argument("--corpus", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--min-count", type=int, default=2)

    p = sub.add_parser("train", help="train a model; paths and settings come from --config and flags")
    p.add_argument("--config")
    p.add_argument("--train")
    p.add_argument("--trial")
    p.add_argument("--vocab")
    p.add_argument("--checkpoint")
    p.add_argument("--log")
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--dropout", type=float)
    p.add_argument("--last-n", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("predict", help="write predicted offsets for a corpus")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", default="-")

    p = sub.add_parser("eval", help="mean per-comment F1 of predictions against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--per-comment")

    p = sub.add_parser("ensemble", help="majority vote over prediction files")
    p.add_argument("--pred", nargs="+", required=True)
    p.add_argument("--out", default="-")

    p = sub.add_parser("highlight", help="show gold (underlined) vs predicted (red) spans")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--format", choices=["terminal", "html"], default="terminal")
    p.add_argument("--out", default="-")
    return parser


def _train_config_from_args(args) -> PipelineConfig:
    config = PipelineConfig.load(args.config)
    for key in ("train", "trial", "vocab", "checkpoint", "log"):
        if getattr(args, key):
            config.paths[key] = getattr(args, key)
    overrides = {"num_epochs": args.epochs, "learning_rate": args.lr, "batch_size": args.batch_size,
                 "epsilon": args.epsilon, "dropout_rate": args.dropout}
    config.training.update({k: v for k, v in overrides.items() if v is not None})
    seed = args.seed if args.seed is not None else os.environ.get(SEED_ENV)
    if seed is not None:
        config.training["seed"] = int(seed)
    if args.last_n is not None:
        config.encoder.pop("depth_set", None)
        config.encoder["last_n"] = args.last_n
    return config


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        if args.command == "clean":
            report = cmd_clean(args.in_csv, args.out_csv, args.discard_partial)
            print(report.summary())
        elif args.command == "build-vocab":
            size = cmd_build_vocab(args.corpus, args.out, args.min_count)
            log.info("wrote %d pieces to %s", size, args.out)
        elif args.command == "train":
            ckpt = cmd_train(_train_config_from_args(args))
            log.info("best epoch %d, trial F1 %.4f", ckpt.epoch, ckpt.trial_f1)
        elif args.command == "predict":
            cmd_predict(args.checkpoint, args.corpus, args.vocab, args.out)
        elif args.command == "eval":
            print(f"{cmd_eval(args.gold, args.pred, args.per_comment):.4f}")
        elif args.command == "ensemble":
            cmd_ensemble(args.pred, args.out)
        elif args.command == "highlight":
            rendered = cmd_highlight(args.gold, args.pred, args.format)
            if args.out == "-":
                sys.stdout.write(rendered)
            else:
                Path(args.out).write_text(rendered, encoding="utf-8")
    except (CliError, CorpusError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
