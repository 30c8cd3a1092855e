"""Training loop: label-smoothed CE, Adam, best-trial-F1 checkpoint selection."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .corpus import Comment
from .encoder import EncoderConfig, Parameters, backward, init_parameters, predict_labels
from .labeling import LabeledSequence, labels_to_offsets, offsets_to_labels
from .loss import smoothed_ce_loss, smoothed_targets
from .metrics import evaluate_corpus
from .tokenizer import TokenAlignment, Vocab, tokenize

__all__ = [
    "AdamState",
    "Checkpoint",
    "EncodedComment",
    "TrainConfig",
    "adam_step",
    "encode_corpus",
    "layer_selection",
    "make_batches",
    "predict_corpus",
    "select_best_epoch",
    "smoothed_ce_loss",
    "smoothed_targets",
    "train",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    epsilon: float = 0.1
    learning_rate: float = 1e-5
    batch_size: int = 8
    num_epochs: int = 8
    dropout_rate: float = 0.25
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self) -> None:
        problems = []
        if not 0.0 <= self.epsilon < 1.0:
            problems.append(f"epsilon must lie in [0, 1), got {self.epsilon}")
        if self.batch_size < 1:
            problems.append("batch_size must be at least 1")
        if self.num_epochs < 1:
            problems.append("num_epochs must be at least 1")
        if not 0.0 <= self.dropout_rate < 1.0:
            problems.append(f"dropout_rate must lie in [0, 1), got {self.dropout_rate}")
        if self.learning_rate <= 0:
            problems.append("learning_rate must be positive")
        if problems:
            raise ValueError("; ".join(problems))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class AdamState:
    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    step: int = 0

    @classmethod
    def zeros_like(cls, params: Parameters) -> AdamState:
        return cls({k: np.zeros_like(p) for k, p in params.items()},
                   {k: np.zeros_like(p) for k, p in params.items()})


def adam_step(
    params: Parameters,
    grads: Parameters,
    state: AdamState,
    lr: float,
    betas: tuple[float, float] = (0.9, 0.999),
    eps: float = 1e-8,
) -> tuple[Parameters, AdamState]:
    """One bias-corrected Adam update. Inputs are left untouched."""
    b1, b2 = betas
    step = state.step + 1
    new_params, m, v = {}, {}, {}
    for k, p in params.items():
        g = grads[k]
        m[k] = b1 * state.m[k] + (1 - b1) * g
        v[k] = b2 * state.v[k] + (1 - b2) * g * g
        m_hat = m[k] / (1 - b1**step)
        v_hat = v[k] / (1 - b2**step)
        new_params[k] = (p - lr * m_hat / (np.sqrt(v_hat) + eps)).astype(p.dtype)
    return new_params, AdamState(m, v, step)


@dataclass
class Checkpoint:
    params: Parameters
    encoder_config: EncoderConfig
    train_config: TrainConfig
    epoch: int
    trial_f1: float
    vocab_fingerprint: str = ""
    history: list[dict] = field(default_factory=list)


@dataclass(frozen=True)
class EncodedComment:
    comment: Comment
    tokens: tuple[TokenAlignment, ...]
    ids: np.ndarray
    labels: np.ndarray


def encode_corpus(comments: Sequence[Comment], vocab: Vocab) -> list[EncodedComment]:
    out = []
    for c in comments:
        tokens = tuple(tokenize(c.text, vocab))
        seq = offsets_to_labels(tokens, c.toxic_offsets)
        out.append(EncodedComment(
            c,
            tokens,
            np.array([t.piece_id for t in tokens], dtype=np.int64),
            np.array(seq.labels, dtype=np.int64),
        ))
    return out


def _chunks(encoded: Sequence[EncodedComment], max_len: int):
    """``(comment index, ids, labels)`` windows of at most ``max_len`` tokens."""
    for i, e in enumerate(encoded):
        for s in range(0, max(len(e.ids), 1), max_len):
            yield i, e.ids[s:s + max_len], e.labels[s:s + max_len]


def make_batches(rows, pad_id: int):
    """Right-pad ``(ids, labels)`` rows to the longest in the batch."""
    width = max(1, max(len(ids) for ids, _ in rows))
    ids = np.full((len(rows), width), pad_id, dtype=np.int64)
    labels = np.zeros((len(rows), width), dtype=np.int64)
    mask = np.zeros((len(rows), width), dtype=bool)
    for r, (row_ids, row_labels) in enumerate(rows):
        ids[r, :len(row_ids)] = row_ids
        labels[r, :len(row_labels)] = row_labels
        mask[r, :len(row_ids)] = True
    return ids, labels, mask


def predict_corpus(
    params: Parameters,
    config: EncoderConfig,
    comments: Sequence[Comment],
    vocab: Vocab,
    batch_size: int = 32,
    fill: bool = True,
) -> list[tuple[int, ...]]:
    """Predicted toxic offsets per comment, with whitespace filling."""
    encoded = encode_corpus(comments, vocab)
    chunks = list(_chunks(encoded, config.max_len))
    token_labels = [[] for _ in encoded]
    for s in range(0, len(chunks), batch_size):
        part = chunks[s:s + batch_size]
        ids, _, mask = make_batches([(c[1], c[2]) for c in part], vocab.pad_id)
        pred = predict_labels(params, config, ids, mask)
        for row, (i, row_ids, _) in enumerate(part):
            token_labels[i].extend(pred[row, :len(row_ids)].tolist())
    return [
        labels_to_offsets(e.comment.text, LabeledSequence(e.tokens, tuple(lab)), fill=fill)
        for e, lab in zip(encoded, token_labels)
    ]


def select_best_epoch(f1_by_epoch: Sequence[float]) -> int:
    """1-based epoch with the highest F1; the earliest wins ties."""
    if not f1_by_epoch:
        raise ValueError("no epochs to choose from")
    return int(np.argmax(np.asarray(f1_by_epoch))) + 1


def train(
    encoder_config: EncoderConfig,
    train_corpus: Sequence[Comment],
    trial_corpus: Sequence[Comment],
    vocab: Vocab,
    train_config: TrainConfig,
    dtype=np.float32,
    on_epoch: Callable[[dict], None] | None = None,
) -> Checkpoint:
    """Train from scratch and return the epoch with the best trial F1.

    Corpora should already be cleaned. Every random choice (init, shuffle,
    dropout masks) derives from ``train_config.seed``.
    """
    if not train_corpus:
        raise ValueError("training corpus is empty")
    if not trial_corpus:
        raise ValueError("trial corpus is empty")
    if encoder_config.vocab_size != len(vocab):
        raise ValueError(
            f"encoder vocab_size {encoder_config.vocab_size} != vocabulary size {len(vocab)}"
        )
    config = replace(encoder_config, dropout_rate=train_config.dropout_rate)
    rng = np.random.default_rng(train_config.seed)
    params = init_parameters(config, int(rng.integers(2**31)), dtype=dtype)
    state = AdamState.zeros_like(params)
    rows = [(ids, labels) for _, ids, labels in _chunks(encode_corpus(train_corpus, vocab), config.max_len)]
    trial_gold = [c.toxic_offsets for c in trial_corpus]
    betas = (train_config.beta1, train_config.beta2)

    history: list[dict] = []
    best: Checkpoint | None = None
    for epoch in range(1, train_config.num_epochs + 1):
        order = rng.permutation(len(rows))
        losses = []
        for s in range(0, len(order), train_config.batch_size):
            ids, labels, mask = make_batches([rows[j] for j in order[s:s + train_config.batch_size]], vocab.pad_id)
            loss, grads = backward(params, config, ids, mask, labels, train_config.epsilon,
                                   train_mode=True, seed=int(rng.integers(2**31)))
            params, state = adam_step(params, grads, state, train_config.learning_rate,
                                      betas, train_config.adam_eps)
            losses.append(loss)

        preds = predict_corpus(params, config, trial_corpus, vocab)
        f1 = evaluate_corpus(trial_gold, preds).mean_f1
        record = {"epoch": epoch, "loss": float(np.mean(losses)), "trial_f1": f1}
        history.append(record)
        log.info("epoch=%d loss=%.6f trial_f1=%.4f", epoch, record["loss"], f1)
        if on_epoch is not None:
            on_epoch(record)
        if best is None or f1 > best.trial_f1:
            best = Checkpoint({k: v.copy() for k, v in params.items()}, config, train_config, epoch, f1)

    best.vocab_fingerprint = vocab.fingerprint()
    best.history = history
    return best


def layer_selection(
    base_config: EncoderConfig,
    train_corpus: Sequence[Comment],
    trial_corpus: Sequence[Comment],
    vocab: Vocab,
    train_config: TrainConfig,
    depths: Sequence[int] | None = None,
) -> list[dict]:
    """Train one model per "last N blocks" head and report each best trial F1."""
    depths = depths or range(1, base_config.num_blocks + 1)
    fields = {k: v for k, v in base_config.to_dict().items() if k != "depth_set"}
    rows = []
    for n in depths:
        ckpt = train(EncoderConfig.last_n(n, **fields), train_corpus, trial_corpus, vocab, train_config)
        rows.append({"last_n": n, "depth_set": ckpt.encoder_config.depth_set,
                     "trial_f1": ckpt.trial_f1, "best_epoch": ckpt.epoch})
        log.info("last_n=%d trial_f1=%.4f epoch=%d", n, ckpt.trial_f1, ckpt.epoch)
    return rows
