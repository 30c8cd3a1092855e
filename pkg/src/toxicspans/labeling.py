"""Character offsets to per-token labels and back again."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .spanclean import is_whitespace
from .tokenizer import TokenAlignment

__all__ = [
    "NON_TOXIC",
    "TOXIC",
    "LabeledSequence",
    "labels_to_offsets",
    "offsets_to_labels",
    "whitespace_fill",
]

NON_TOXIC = 0
TOXIC = 1


@dataclass(frozen=True)
class LabeledSequence:
    tokens: tuple[TokenAlignment, ...]
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "labels", tuple(int(x) for x in self.labels))
        if len(self.tokens) != len(self.labels):
            raise ValueError(f"{len(self.tokens)} tokens but {len(self.labels)} labels")
        if any(x not in (NON_TOXIC, TOXIC) for x in self.labels):
            raise ValueError("labels must be 0 or 1")


def offsets_to_labels(tokens: Sequence[TokenAlignment], toxic: Iterable[int]) -> LabeledSequence:
    """A token is toxic when any of its characters is."""
    toxic = set(toxic)
    labels = [
        TOXIC if any(i in toxic for i in range(t.start, t.end + 1)) else NON_TOXIC
        for t in tokens
    ]
    return LabeledSequence(tuple(tokens), tuple(labels))


def whitespace_fill(text: str, seq: LabeledSequence, offsets: Iterable[int]) -> tuple[int, ...]:
    """Add whitespace lying between two consecutive toxic tokens."""
    out = set(offsets)
    pairs = zip(seq.tokens, seq.labels, seq.tokens[1:], seq.labels[1:])
    for left, left_label, right, right_label in pairs:
        if left_label == TOXIC and right_label == TOXIC:
            out.update(i for i in range(left.end + 1, right.start) if is_whitespace(text[i]))
    return tuple(sorted(out))


def labels_to_offsets(text: str, seq: LabeledSequence, *, fill: bool = True) -> tuple[int, ...]:
    offsets: set[int] = set()
    for tok, label in zip(seq.tokens, seq.labels):
        if label == TOXIC:
            offsets.update(range(tok.start, tok.end + 1))
    if fill:
        return whitespace_fill(text, seq, offsets)
    return tuple(sorted(offsets))
