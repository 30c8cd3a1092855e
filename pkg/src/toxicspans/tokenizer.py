"""Offset-preserving lowercase WordPiece tokenization."""

from __future__ import annotations

import hashlib
import unicodedata
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .spanclean import is_whitespace

__all__ = [
    "CONTINUATION",
    "MAX_WORD_CHARS",
    "PAD",
    "UNK",
    "TokenAlignment",
    "Vocab",
    "VocabError",
    "basic_split",
    "build_vocab",
    "demo_vocab",
    "load_vocab",
    "lowercase",
    "tokenize",
    "wordpiece_word",
]

PAD = "[PAD]"
UNK = "[UNK]"
CONTINUATION = "##"
MAX_WORD_CHARS = 100


class VocabError(ValueError):
    pass


class Vocab:
    """Ordered piece list; a piece's id is its position."""

    def __init__(self, pieces: Sequence[str]):
        self.pieces = tuple(pieces)
        self.index: dict[str, int] = {}
        for i, p in enumerate(self.pieces):
            if p in self.index:
                raise VocabError(f"duplicate piece {p!r} at line {i + 1}")
            self.index[p] = i
        for special in (PAD, UNK):
            if special not in self.index:
                raise VocabError(f"vocab lacks {special}")

    def __len__(self) -> int:
        return len(self.pieces)

    def __contains__(self, piece: str) -> bool:
        return piece in self.index

    def __getitem__(self, piece: str) -> int:
        return self.index[piece]

    @property
    def pad_id(self) -> int:
        return self.index[PAD]

    @property
    def unk_id(self) -> int:
        return self.index[UNK]

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for p in self.pieces:
                fh.write(p + "\n")

    def fingerprint(self) -> str:
        return hashlib.sha256("\n".join(self.pieces).encode("utf-8")).hexdigest()


def load_vocab(path: str | Path) -> Vocab:
    with open(path, encoding="utf-8") as fh:
        pieces = [line.rstrip("\r\n") for line in fh]
    return Vocab([p for p in pieces if p])


def demo_vocab() -> Vocab:
    """Small hand-built vocabulary shipped with the package."""
    text = resources.files("toxicspans").joinpath("data/demo_vocab.txt").read_text("utf-8")
    return Vocab([line for line in text.splitlines() if line])


@dataclass(frozen=True)
class TokenAlignment:
    piece_id: int
    start: int
    end: int
    is_continuation: bool = False


def lowercase(text: str) -> str:
    """Character-wise lowercasing that never changes the string length."""
    out = []
    for ch in text:
        low = ch.lower()
        out.append(low if len(low) == 1 else ch)
    return "".join(out)


def _is_punctuation(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def basic_split(text: str) -> list[tuple[str, int, int]]:
    """Split on whitespace and isolate punctuation; ranges are inclusive."""
    words: list[tuple[str, int, int]] = []
    start = None
    for i, ch in enumerate(text):
        if is_whitespace(ch) or _is_punctuation(ch):
            if start is not None:
                words.append((text[start:i], start, i - 1))
                start = None
            if not is_whitespace(ch):
                words.append((ch, i, i))
        elif start is None:
            start = i
    if start is not None:
        words.append((text[start:], start, len(text) - 1))
    return words


def wordpiece_word(word: str, vocab: Vocab) -> list[tuple[str, int, int]]:
    """Greedy longest-match-first split of one word into ``(piece, start, end)``."""
    if len(word) > MAX_WORD_CHARS:
        return [(UNK, 0, len(word) - 1)]
    pieces = []
    cursor = 0
    while cursor < len(word):
        end = len(word)
        match = None
        while end > cursor:
            sub = word[cursor:end]
            if cursor > 0:
                sub = CONTINUATION + sub
            if sub in vocab:
                match = sub
                break
            end -= 1
        if match is None:
            return [(UNK, 0, len(word) - 1)]
        pieces.append((match, cursor, end - 1))
        cursor = end
    return pieces


def tokenize(text: str, vocab: Vocab) -> list[TokenAlignment]:
    """Lowercase, pre-split and WordPiece ``text``.

    Token ranges index the original string, which is possible because
    :func:`lowercase` keeps every character in place.
    """
    lowered = lowercase(text)
    tokens = []
    for word, w_start, _ in basic_split(lowered):
        for piece, s, e in wordpiece_word(word, vocab):
            tokens.append(TokenAlignment(vocab[piece], w_start + s, w_start + e, s > 0))
    return tokens


def build_vocab(texts: Iterable[str], min_count: int = 2) -> Vocab:
    """Frequency vocabulary: frequent whole words plus every character.

    Each seen character appears both bare and as a ``##`` continuation,
    so any word made of seen characters can always be tokenized.
    """
    words: Counter[str] = Counter()
    chars: set[str] = set()
    for text in texts:
        for word, _, _ in basic_split(lowercase(text)):
            words[word] += 1
            chars.update(word)
    pieces = [PAD, UNK]
    pieces += sorted(w for w, n in words.items() if n >= min_count and len(w) > 1)
    pieces += sorted(chars)
    pieces += sorted(CONTINUATION + c for c in chars)
    return Vocab(pieces)
