"""Per-comment character-offset F1, averaged over a corpus."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = ["EvalResult", "brute_force_f1", "comment_f1", "evaluate_corpus"]


@dataclass(frozen=True)
class EvalResult:
    per_comment_f1: tuple[float, ...]
    mean_f1: float
    empty_gold: int
    empty_pred: int


def comment_f1(gold: Iterable[int], pred: Iterable[int]) -> float:
    """F1 between two offset sets.

    Both empty scores 1; exactly one empty scores 0.
    """
    gold, pred = set(gold), set(pred)
    if not gold and not pred:
        return 1.0
    if not gold or not pred:
        return 0.0
    hits = len(gold & pred)
    if hits == 0:
        return 0.0
    precision = hits / len(pred)
    recall = hits / len(gold)
    return 2 * precision * recall / (precision + recall)


def brute_force_f1(gold: Iterable[int], pred: Iterable[int]) -> float:
    """Same contract as :func:`comment_f1`, by walking every index.

    Deliberately shares no code with :func:`comment_f1`; used as its oracle.
    """
    gold, pred = list(gold), list(pred)
    size = max(gold + pred, default=-1) + 1
    in_gold = np.zeros(size, dtype=bool)
    in_pred = np.zeros(size, dtype=bool)
    in_gold[gold] = True
    in_pred[pred] = True
    tp = fp = fn = 0
    for i in range(size):
        if in_gold[i] and in_pred[i]:
            tp += 1
        elif in_pred[i]:
            fp += 1
        elif in_gold[i]:
            fn += 1
    if tp + fp + fn == 0:
        return 1.0
    # Dice form: 2TP / (2TP + FP + FN), equal to the harmonic mean of P and R
    return 2.0 * tp / (2.0 * tp + fp + fn)


def evaluate_corpus(golds: Sequence[Iterable[int]], preds: Sequence[Iterable[int]]) -> EvalResult:
    if len(golds) != len(preds):
        raise ValueError(f"{len(golds)} gold sets but {len(preds)} predictions")
    if not golds:
        raise ValueError("cannot average F1 over an empty corpus")
    golds = [set(g) for g in golds]
    preds = [set(p) for p in preds]
    scores = tuple(comment_f1(g, p) for g, p in zip(golds, preds))
    return EvalResult(
        per_comment_f1=scores,
        mean_f1=float(np.mean(scores)),
        empty_gold=sum(not g for g in golds),
        empty_pred=sum(not p for p in preds),
    )
